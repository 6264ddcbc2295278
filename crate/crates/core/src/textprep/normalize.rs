use rust_stemmers::Algorithm;

use super::{TermSequence, WordList};

/// Maps a lower-cased token to its index form.
pub trait Stemmer: Send + Sync {
    fn stem(&self, token: &str) -> String;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityStemmer;

impl Stemmer for IdentityStemmer {
    fn stem(&self, token: &str) -> String {
        token.to_owned()
    }
}

/// Snowball suffix stripper for the supported languages.
pub struct SnowballStemmer(rust_stemmers::Stemmer);

impl SnowballStemmer {
    pub fn for_language(language: &str) -> Option<Self> {
        let algo = match language {
            "en" => Algorithm::English,
            "fr" => Algorithm::French,
            "it" => Algorithm::Italian,
            "de" => Algorithm::German,
            "es" => Algorithm::Spanish,
            "nl" => Algorithm::Dutch,
            _ => return None,
        };
        Some(SnowballStemmer(rust_stemmers::Stemmer::create(algo)))
    }

    /// Snowball stemmer when one exists for `language`, identity otherwise.
    pub fn boxed(language: &str) -> Box<dyn Stemmer> {
        match Self::for_language(language) {
            Some(s) => Box::new(s),
            None => Box::new(IdentityStemmer),
        }
    }
}

impl Stemmer for SnowballStemmer {
    fn stem(&self, token: &str) -> String {
        // Elided articles carry an apostrophe the stemmer would mangle.
        if token.ends_with('\'') || token.starts_with('\'') {
            return token.to_owned();
        }
        self.0.stem(token).into_owned()
    }
}

/// Stems to a fixed point (bounded) so normalizing a term sequence twice is a no-op.
fn stem_stable(stemmer: &dyn Stemmer, token: &str) -> String {
    let mut cur = stemmer.stem(token);
    for _ in 0..4 {
        let next = stemmer.stem(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Lower-cases, stems and removes stopwords, preserving order. A token is
/// dropped when either its lower-cased form or its stem is on the stoplist,
/// or when it has no alphanumeric character left.
pub fn normalize(tokens: &[String], stemmer: &dyn Stemmer, stoplist: &WordList, language: &str) -> TermSequence {
    let terms = tokens
        .iter()
        .filter_map(|tok| {
            let lower = tok.to_lowercase();
            if stoplist.contains(&lower) {
                return None;
            }
            let stem = stem_stable(stemmer, &lower);
            if stem.is_empty() || !stem.chars().any(char::is_alphanumeric) || stoplist.contains(&stem) {
                return None;
            }
            Some(stem)
        })
        .collect();
    TermSequence {
        terms,
        language: language.to_owned(),
    }
}

//! Page-to-terms preprocessing: markup extraction, sentence segmentation,
//! tokenization, stemming and stopword removal.

mod corpus;
mod extract;
mod normalize;
mod segment;
mod tokenize;

use std::collections::HashSet;
use std::path::Path;

pub use corpus::{read_corpus, write_corpus, CorpusDoc};
pub use extract::{
    anchor_texts, extract_plain, extract_structured, extract_text, is_well_formed, tag_sequence, text_content,
};
pub use normalize::{normalize, IdentityStemmer, SnowballStemmer, Stemmer};
pub use segment::{segment, segment_document};
pub use tokenize::tokenize;

use crate::error::{Error, Result};

/// Position of a sentence in its source document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Origin {
    pub doc: String,
    pub paragraph: usize,
    pub sentence: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub text: String,
    pub tokens: Vec<String>,
    pub char_length: usize,
    pub origin: Origin,
}

impl Sentence {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text, "");
        let char_length = text.chars().count();
        Sentence {
            text,
            tokens,
            char_length,
            origin: Origin::default(),
        }
    }
}

/// Normalized index terms of one text unit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TermSequence {
    pub terms: Vec<String>,
    pub language: String,
}

/// A set of lower-cased words, loaded from a one-per-line file.
#[derive(Debug, Clone, Default)]
pub struct WordList(HashSet<String>);

impl WordList {
    pub fn parse(text: &str) -> Self {
        WordList(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&decode_bytes(&text)))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_set(&self) -> &HashSet<String> {
        &self.0
    }
}

impl<S: Into<String>> FromIterator<S> for WordList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        WordList(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

/// Built-in stoplist for `en`, `fr` or `it`; empty for anything else.
pub fn default_stoplist(language: &str) -> WordList {
    WordList::parse(match language {
        "en" => include_str!("../../data/stoplists/en.txt"),
        "fr" => include_str!("../../data/stoplists/fr.txt"),
        "it" => include_str!("../../data/stoplists/it.txt"),
        _ => "",
    })
}

/// Built-in abbreviation list for `en`, `fr` or `it`; empty for anything else.
pub fn default_abbreviations(language: &str) -> WordList {
    WordList::parse(match language {
        "en" => include_str!("../../data/abbrev/en.txt"),
        "fr" => include_str!("../../data/abbrev/fr.txt"),
        "it" => include_str!("../../data/abbrev/it.txt"),
        _ => "",
    })
}

/// Decodes UTF-8, falling back to ISO-8859-1 when the bytes are not valid UTF-8.
pub fn decode_bytes(bytes: &[u8]) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.to_owned(),
        Err(_) => bytes.iter().map(|&b| b as char).collect(),
    }
}

/// Tokenizer, stemmer and stoplist for one language.
pub struct Analyzer {
    language: String,
    stemmer: Box<dyn Stemmer>,
    stoplist: WordList,
}

impl Analyzer {
    /// Snowball stemming and the built-in stoplist.
    pub fn new(language: &str) -> Self {
        Analyzer {
            language: language.to_owned(),
            stemmer: SnowballStemmer::boxed(language),
            stoplist: default_stoplist(language),
        }
    }

    /// Tokenize and lower-case only.
    pub fn plain(language: &str) -> Self {
        Analyzer {
            language: language.to_owned(),
            stemmer: Box::new(IdentityStemmer),
            stoplist: WordList::default(),
        }
    }

    pub fn with_parts(language: &str, stemmer: Box<dyn Stemmer>, stoplist: WordList) -> Self {
        Analyzer {
            language: language.to_owned(),
            stemmer,
            stoplist,
        }
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn analyze(&self, text: &str) -> TermSequence {
        let tokens = tokenize(text, &self.language);
        normalize(&tokens, self.stemmer.as_ref(), &self.stoplist, &self.language)
    }
}

impl std::fmt::Debug for Analyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Analyzer")
            .field("language", &self.language)
            .field("stoplist", &self.stoplist.len())
            .finish()
    }
}

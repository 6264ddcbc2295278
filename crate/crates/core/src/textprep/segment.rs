use super::{tokenize, Origin, Sentence, WordList};

const CLOSERS: &[char] = &['"', '\'', ')', ']', '»', '”', '’'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '«', '“', '‘', '¿', '¡'];

fn strip_closers(word: &str) -> &str {
    word.trim_end_matches(CLOSERS)
}

fn ends_sentence(word: &str) -> bool {
    strip_closers(word).ends_with(['.', '!', '?'])
}

fn starts_sentence(word: &str) -> bool {
    word.trim_start_matches(OPENERS)
        .chars()
        .next()
        .is_some_and(|c| c.is_uppercase() || c.is_ascii_digit())
}

/// Splits a paragraph into sentences.
///
/// A boundary follows a word ending in `.`, `!` or `?` when the next word
/// starts with an upper-case letter or digit and the terminated word is
/// not a listed abbreviation. Paragraphs with no terminal punctuation
/// (headings, list labels) are kept whole.
pub fn segment(paragraph: &str, abbreviations: &WordList) -> Vec<Sentence> {
    let words: Vec<&str> = paragraph.split_whitespace().collect();
    if words.is_empty() {
        return Vec::new();
    }
    if !ends_sentence(words[words.len() - 1]) {
        return vec![make_sentence(&words, 0)];
    }
    let mut out = Vec::new();
    let mut start = 0;
    for i in 0..words.len() {
        let last = i + 1 == words.len();
        let boundary = last
            || (ends_sentence(words[i])
                && starts_sentence(words[i + 1])
                && !abbreviations.contains(&strip_closers(words[i]).to_lowercase()));
        if boundary {
            out.push(make_sentence(&words[start..=i], out.len()));
            start = i + 1;
        }
    }
    out
}

fn make_sentence(words: &[&str], index: usize) -> Sentence {
    let text = words.join(" ");
    Sentence {
        tokens: tokenize(&text, ""),
        char_length: text.chars().count(),
        text,
        origin: Origin {
            doc: String::new(),
            paragraph: 0,
            sentence: index,
        },
    }
}

/// Segments every paragraph of a document and fills in sentence origins.
/// Sentences without any word token are dropped.
pub fn segment_document(doc: &str, paragraphs: &[String], abbreviations: &WordList) -> Vec<Sentence> {
    paragraphs
        .iter()
        .enumerate()
        .flat_map(|(p, para)| {
            segment(para, abbreviations).into_iter().map(move |mut s| {
                s.origin.doc = doc.to_owned();
                s.origin.paragraph = p;
                s
            })
        })
        .filter(|s| !s.tokens.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(v: &[Sentence]) -> Vec<&str> {
        v.iter().map(|s| s.text.as_str()).collect()
    }

    #[test]
    fn abbreviation_blocks_split() {
        let abbr: WordList = ["dr."].into_iter().collect();
        let s = segment("I saw Dr. Smith. He left.", &abbr);
        assert_eq!(texts(&s), vec!["I saw Dr. Smith.", "He left."]);
    }

    #[test]
    fn no_terminator_is_one_sentence() {
        let s = segment("Hello world", &WordList::default());
        assert_eq!(texts(&s), vec!["Hello world"]);
        assert_eq!(s[0].char_length, 11);
        assert_eq!(s[0].tokens, vec!["Hello", "world"]);
    }

    #[test]
    fn initials_split_without_abbreviations() {
        let s = segment("A. B. C.", &WordList::default());
        assert_eq!(texts(&s), vec!["A.", "B.", "C."]);
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        let s = segment("It cost 3.5 dollars. then it rose! Again?", &WordList::default());
        assert_eq!(texts(&s), vec!["It cost 3.5 dollars. then it rose!", "Again?"]);
    }

    #[test]
    fn quotes_around_boundaries() {
        let s = segment("He said \"stop.\" \"Why?\" she asked.", &WordList::default());
        assert_eq!(texts(&s), vec!["He said \"stop.\"", "\"Why?\" she asked."]);
    }

    #[test]
    fn document_origins() {
        let paras = vec!["Title".to_owned(), "One. Two.".to_owned()];
        let s = segment_document("d1", &paras, &WordList::default());
        assert_eq!(s.len(), 3);
        assert_eq!(
            s[2].origin,
            Origin {
                doc: "d1".into(),
                paragraph: 1,
                sentence: 1
            }
        );
        assert!(segment("", &WordList::default()).is_empty());
    }
}

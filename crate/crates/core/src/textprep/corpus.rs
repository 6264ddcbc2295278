//! Sentence-per-line corpus files.
//!
//! ```text
//! #doc page1.html
//! First sentence.
//! Second sentence.
//!
//! #doc page2.html
//! ...
//! ```
//!
//! `#` lines before the first `#doc` are a free-form header.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusDoc {
    pub id: String,
    pub sentences: Vec<String>,
}

pub fn write_corpus(docs: &[CorpusDoc]) -> String {
    let mut out = String::new();
    for (i, doc) in docs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "#doc {}", doc.id);
        for s in &doc.sentences {
            // one sentence per line is the format's only framing
            let flat: String = s.split_whitespace().collect::<Vec<_>>().join(" ");
            let _ = writeln!(out, "{flat}");
        }
    }
    out
}

pub fn read_corpus(text: &str) -> Result<Vec<CorpusDoc>> {
    let mut docs: Vec<CorpusDoc> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if let Some(id) = line.strip_prefix("#doc ") {
            docs.push(CorpusDoc {
                id: id.trim().to_owned(),
                sentences: Vec::new(),
            });
            continue;
        }
        if line.trim().is_empty() || (docs.is_empty() && line.starts_with('#')) {
            continue;
        }
        match docs.last_mut() {
            Some(doc) => doc.sentences.push(line.trim().to_owned()),
            None => return Err(Error::parse("corpus", n + 1, "sentence before the first #doc header")),
        }
    }
    Ok(docs)
}

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Term statistics of a document collection.
///
/// Document models are maximum-likelihood estimates c(t,D)/|D|; the
/// collection (background) model is the collection term frequency over
/// the total number of tokens.
#[derive(Debug, Clone, Default)]
pub struct Index {
    doc_ids: Vec<String>,
    doc_lens: Vec<u64>,
    postings: HashMap<String, Vec<(u32, u32)>>,
    coll_freq: HashMap<String, u64>,
    total_tokens: u64,
}

/// Builds an index over `(document id, terms)` pairs.
pub fn build_index<I, D, T>(documents: I) -> Result<Index>
where
    I: IntoIterator<Item = (D, Vec<T>)>,
    D: Into<String>,
    T: AsRef<str>,
{
    let mut index = Index::default();
    let mut seen = HashSet::new();
    for (id, terms) in documents {
        let id = id.into();
        if !seen.insert(id.clone()) {
            return Err(Error::Index(format!("duplicate document id {id:?}")));
        }
        let doc = index.doc_ids.len() as u32;
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        for t in &terms {
            *counts.entry(t.as_ref()).or_insert(0) += 1;
        }
        for (term, c) in counts {
            index.postings.entry(term.to_owned()).or_default().push((doc, c));
            *index.coll_freq.entry(term.to_owned()).or_insert(0) += u64::from(c);
        }
        index.doc_ids.push(id);
        index.doc_lens.push(terms.len() as u64);
        index.total_tokens += terms.len() as u64;
    }
    if index.doc_ids.is_empty() {
        return Err(Error::Index("no documents".into()));
    }
    if index.total_tokens == 0 {
        return Err(Error::Index("every document is empty".into()));
    }
    Ok(index)
}

impl Index {
    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_id(&self, doc: usize) -> &str {
        &self.doc_ids[doc]
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_len(&self, doc: usize) -> u64 {
        self.doc_lens[doc]
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn postings(&self, term: &str) -> &[(u32, u32)] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    pub fn term_count(&self, term: &str, doc: usize) -> u32 {
        let p = self.postings(term);
        p.binary_search_by_key(&(doc as u32), |&(d, _)| d).map_or(0, |i| p[i].1)
    }

    pub fn collection_freq(&self, term: &str) -> u64 {
        self.coll_freq.get(term).copied().unwrap_or(0)
    }

    /// P(term | M_C).
    pub fn collection_prob(&self, term: &str) -> f64 {
        self.collection_freq(term) as f64 / self.total_tokens as f64
    }

    /// P(term | M_D), zero for empty documents.
    pub fn doc_prob(&self, term: &str, doc: usize) -> f64 {
        let len = self.doc_lens[doc];
        if len == 0 {
            return 0.0;
        }
        self.term_count(term, doc) as f64 / len as f64
    }

    /// Sorted vocabulary.
    pub fn vocabulary(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.coll_freq.keys().map(String::as_str).collect();
        v.sort_unstable();
        v
    }

    /// The document's maximum-likelihood model.
    pub fn doc_model(&self, doc: usize) -> BTreeMap<&str, f64> {
        let len = self.doc_lens[doc] as f64;
        self.postings
            .iter()
            .filter_map(|(t, p)| {
                p.binary_search_by_key(&(doc as u32), |&(d, _)| d)
                    .ok()
                    .map(|i| (t.as_str(), p[i].1 as f64 / len))
            })
            .collect()
    }

    /// Document terms, sorted, with their counts.
    fn doc_terms(&self) -> Vec<Vec<(&str, u32)>> {
        let mut out: Vec<Vec<(&str, u32)>> = vec![Vec::new(); self.doc_ids.len()];
        for (term, plist) in &self.postings {
            for &(d, c) in plist {
                out[d as usize].push((term.as_str(), c));
            }
        }
        for terms in &mut out {
            terms.sort_unstable();
        }
        out
    }
}

/// Serializes an index as `docid<TAB>length<TAB>term:count ...` lines.
pub fn write_index(index: &Index, header: &[(String, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "#docs={}", index.num_docs());
    for (k, v) in header {
        let _ = writeln!(out, "#{k}={v}");
    }
    for (d, terms) in index.doc_terms().into_iter().enumerate() {
        let body: Vec<String> = terms.iter().map(|(t, c)| format!("{t}:{c}")).collect();
        let _ = writeln!(out, "{}\t{}\t{}", index.doc_ids[d], index.doc_lens[d], body.join(" "));
    }
    out
}

pub fn read_index(text: &str) -> Result<Index> {
    let mut docs: Vec<(String, Vec<String>)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse("index", n + 1, "expected docid<TAB>length<TAB>terms"));
        }
        let len: usize = cols[1]
            .parse()
            .map_err(|_| Error::parse("index", n + 1, "bad document length"))?;
        let mut terms = Vec::with_capacity(len);
        for item in cols[2].split_whitespace() {
            let (t, c) = item
                .rsplit_once(':')
                .ok_or_else(|| Error::parse("index", n + 1, format!("bad posting {item:?}")))?;
            let c: usize = c
                .parse()
                .map_err(|_| Error::parse("index", n + 1, format!("bad count in {item:?}")))?;
            terms.extend(std::iter::repeat_n(t.to_owned(), c));
        }
        if terms.len() != len {
            return Err(Error::parse("index", n + 1, "term counts do not add up to the length"));
        }
        docs.push((cols[0].to_owned(), terms));
    }
    build_index(docs)
}

//! Pairing files whose names differ only by a language marker.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Parallel lists of source/target name markers. Affixes apply to the file
/// name without its extension; path segments replace whole directory names.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NamingRules {
    pub source_prefixes: Vec<String>,
    pub target_prefixes: Vec<String>,
    pub source_suffixes: Vec<String>,
    pub target_suffixes: Vec<String>,
    pub path_segment_pairs: Vec<(String, String)>,
}

fn language_names(lang: &str) -> (&'static str, &'static str) {
    // (one-letter code, English name)
    match lang {
        "en" => ("e", "english"),
        "fr" => ("f", "french"),
        "it" => ("i", "italian"),
        "de" => ("d", "german"),
        "es" => ("s", "spanish"),
        "nl" => ("n", "dutch"),
        _ => ("", ""),
    }
}

impl NamingRules {
    /// Common markers for a language pair: `x.html`/`x_f.html`,
    /// `x_e.html`/`x_f.html`, `x-en.html`/`x-fr.html`, `en_x.html`/`fr_x.html`,
    /// `en/x.html`/`fr/x.html` and similar.
    pub fn for_pair(source: &str, target: &str) -> Self {
        let (s1, sname) = language_names(source);
        let (t1, tname) = language_names(target);
        let letters = !s1.is_empty() && !t1.is_empty();
        let mut rules = NamingRules::default();
        let mut suffix = |s: String, t: String| {
            rules.source_suffixes.push(s);
            rules.target_suffixes.push(t);
        };
        if letters {
            suffix(String::new(), format!("_{t1}"));
            suffix(format!("_{s1}"), format!("_{t1}"));
        }
        for sep in ["_", "-", "."] {
            suffix(format!("{sep}{source}"), format!("{sep}{target}"));
        }
        let mut prefix = |s: String, t: String| {
            rules.source_prefixes.push(s);
            rules.target_prefixes.push(t);
        };
        if letters {
            prefix(format!("{s1}_"), format!("{t1}_"));
        }
        prefix(format!("{source}_"), format!("{target}_"));
        let segments = [(source, target), (s1, t1), (sname, tname)];
        rules.path_segment_pairs = segments
            .iter()
            .filter(|(s, t)| !s.is_empty() && !t.is_empty())
            .map(|(s, t)| ((*s).to_owned(), (*t).to_owned()))
            .collect();
        rules
    }

    pub fn validate(&self) -> Result<()> {
        if self.source_prefixes.len() != self.target_prefixes.len()
            || self.source_suffixes.len() != self.target_suffixes.len()
        {
            return Err(Error::Config("source and target affix lists differ in length".into()));
        }
        let same = |a: &[String], b: &[String]| a.iter().zip(b).any(|(x, y)| x == y);
        if same(&self.source_prefixes, &self.target_prefixes) || same(&self.source_suffixes, &self.target_suffixes) {
            return Err(Error::Config("a source affix equals its target counterpart".into()));
        }
        if self
            .path_segment_pairs
            .iter()
            .any(|(s, t)| s.is_empty() || t.is_empty() || s == t)
        {
            return Err(Error::Config("path segments must be non-empty and distinct".into()));
        }
        Ok(())
    }
}

fn split_path(path: &str) -> (&str, &str, &str) {
    // (directory with trailing slash, stem, extension with dot)
    let (dir, file) = match path.rfind('/') {
        Some(i) => (&path[..=i], &path[i + 1..]),
        None => ("", path),
    };
    match file.rfind('.') {
        Some(i) if i > 0 => (dir, &file[..i], &file[i..]),
        _ => (dir, file, ""),
    }
}

/// Candidate counterparts of `path` with the marker length that produced each.
fn counterparts(path: &str, rules: &NamingRules) -> Vec<(String, usize)> {
    let (dir, stem, ext) = split_path(path);
    let mut out = Vec::new();
    for (s, t) in rules.source_suffixes.iter().zip(&rules.target_suffixes) {
        if let Some(base) = stem.strip_suffix(s.as_str()) {
            if !base.is_empty() {
                out.push((format!("{dir}{base}{t}{ext}"), s.len() + t.len()));
            }
        }
    }
    for (s, t) in rules.source_prefixes.iter().zip(&rules.target_prefixes) {
        if let Some(base) = stem.strip_prefix(s.as_str()) {
            if !base.is_empty() {
                out.push((format!("{dir}{t}{base}{ext}"), s.len() + t.len()));
            }
        }
    }
    let parts: Vec<&str> = path.split('/').collect();
    for (s, t) in &rules.path_segment_pairs {
        for (i, part) in parts.iter().enumerate().take(parts.len().saturating_sub(1)) {
            if part == s {
                let mut p = parts.clone();
                p[i] = t;
                out.push((p.join("/"), s.len() + t.len()));
            }
        }
    }
    out
}

/// Pairs each file with a counterpart whose name differs by a source-to-target
/// marker substitution. Candidates are taken by decreasing marker length,
/// then path order, while both files have fewer than `max_pairings` pairs.
/// The result is sorted and does not depend on listing order.
pub fn scan_pairs<S: AsRef<str>>(listing: &[S], rules: &NamingRules, max_pairings: usize) -> Vec<(String, String)> {
    let files: BTreeSet<&str> = listing.iter().map(AsRef::as_ref).collect();
    let mut candidates: Vec<(usize, &str, String)> = Vec::new();
    for &a in &files {
        for (b, weight) in counterparts(a, rules) {
            if b != a && files.contains(b.as_str()) {
                candidates.push((weight, a, b));
            }
        }
    }
    candidates.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(y.1)).then_with(|| x.2.cmp(&y.2)));
    candidates.dedup_by(|x, y| x.1 == y.1 && x.2 == y.2);
    let mut used: HashMap<String, usize> = HashMap::new();
    let mut pairs = Vec::new();
    for (_, a, b) in candidates {
        let ua = used.get(a).copied().unwrap_or(0);
        let ub = used.get(&b).copied().unwrap_or(0);
        if ua >= max_pairings || ub >= max_pairings {
            continue;
        }
        *used.entry(a.to_owned()).or_insert(0) += 1;
        *used.entry(b.clone()).or_insert(0) += 1;
        pairs.push((a.to_owned(), b));
    }
    pairs.sort();
    pairs
}

//! Tab-separated model files.
//!
//! ```text
//! #source_lang=en
//! #target_lang=fr
//! #entries=2
//! drug    drogue    0.550000
//! drug    médicament    0.450000
//! ```
//!
//! Marginals and expected counts live in sibling files of
//! `term<TAB>value` and `source<TAB>target<TAB>count` lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Direction, ExpectedCounts, TranslationModel};
use crate::error::{Error, Result};

/// Formats a value with six significant digits.
pub(crate) fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

fn header_lines(out: &mut String, header: &[(String, String)]) {
    for (k, v) in header {
        let _ = writeln!(out, "#{k}={v}");
    }
}

/// Serializes a model. `header` holds extra `key=value` lines (for
/// example the effective run configuration) written after the standard ones.
pub fn write_model(model: &TranslationModel, header: &[(String, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "#source_lang={}", model.direction.source);
    let _ = writeln!(out, "#target_lang={}", model.direction.target);
    let _ = writeln!(out, "#entries={}", model.num_entries());
    let _ = writeln!(out, "#source_vocab={}", model.source_vocab_size());
    let _ = writeln!(out, "#target_vocab={}", model.target_vocab_size());
    header_lines(&mut out, header);
    for (s, t, p) in model.entries() {
        let _ = writeln!(out, "{s}\t{t}\t{}", sig6(p));
    }
    out
}

fn parse_f64(what: &str, line: usize, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(what, line, format!("bad number {s:?}")))
}

pub fn read_model(text: &str) -> Result<TranslationModel> {
    let mut headers: BTreeMap<&str, &str> = BTreeMap::new();
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if let Some(h) = line.strip_prefix('#') {
            if let Some((k, v)) = h.split_once('=') {
                headers.entry(k.trim()).or_insert(v.trim());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(s), Some(t), Some(p), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
            return Err(Error::parse(
                "model",
                n + 1,
                "expected source<TAB>target<TAB>probability",
            ));
        };
        entries.push((s.to_owned(), t.to_owned(), parse_f64("model", n + 1, p)?));
    }
    let source = headers.get("source_lang").copied().unwrap_or("");
    let target = headers.get("target_lang").copied().unwrap_or("");
    let mut model = TranslationModel::from_entries(Direction::new(source, target), entries);
    if let Some(declared) = headers.get("entries") {
        let declared: usize = declared
            .parse()
            .map_err(|_| Error::parse("model", 0, "bad #entries header"))?;
        if declared != model.num_entries() {
            return Err(Error::parse(
                "model",
                0,
                format!("#entries={declared} but {} entries read", model.num_entries()),
            ));
        }
    }
    let vocab = |k: &str, fallback: usize| headers.get(k).and_then(|v| v.parse().ok()).unwrap_or(fallback);
    let (sv, tv) = (
        vocab("source_vocab", model.source_vocab_size()),
        vocab("target_vocab", model.target_vocab_size()),
    );
    model.set_vocab_sizes(sv, tv);
    Ok(model)
}

pub fn write_marginals(model: &TranslationModel) -> String {
    let mut out = String::new();
    for (term, f) in model.marginals() {
        let _ = writeln!(out, "{term}\t{}", sig6(*f));
    }
    out
}

pub fn read_marginals(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let Some((term, f)) = line.split_once('\t') else {
            return Err(Error::parse("marginals", n + 1, "expected term<TAB>frequency"));
        };
        out.insert(term.to_owned(), parse_f64("marginals", n + 1, f)?);
    }
    Ok(out)
}

pub fn write_counts(counts: &ExpectedCounts) -> String {
    let mut out = String::new();
    for (s, t, c) in counts.iter() {
        let _ = writeln!(out, "{s}\t{t}\t{}", sig6(c));
    }
    out
}

pub fn read_counts(text: &str) -> Result<ExpectedCounts> {
    let mut out = ExpectedCounts::default();
    for (n, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse("counts", n + 1, "expected source<TAB>target<TAB>count"));
        }
        out.insert(cols[0], cols[1], parse_f64("counts", n + 1, cols[2])?);
    }
    Ok(out)
}

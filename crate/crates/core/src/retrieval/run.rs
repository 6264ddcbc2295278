//! TREC run files: `topic Q0 docid rank score tag`, optionally preceded by
//! `#key=value` lines describing the configuration that produced them.

use std::fmt::Write as _;

use super::{RankedRun, ScoredDoc};
use crate::error::{Error, Result};

pub fn write_run(run: &RankedRun, header: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "#{k}={v}");
    }
    let tag = if run.tag.is_empty() { "run" } else { run.tag.as_str() };
    for (topic, docs) in &run.topics {
        for (rank, d) in docs.iter().enumerate() {
            let _ = writeln!(out, "{topic} Q0 {} {} {:.6} {tag}", d.doc, rank + 1, d.score);
        }
    }
    out
}

/// Reads a run, ordering each topic by the rank column. Lines starting with
/// `#` are skipped.
pub fn read_run(text: &str) -> Result<RankedRun> {
    let mut run = RankedRun::default();
    let mut ranked: std::collections::BTreeMap<String, Vec<(u64, ScoredDoc)>> = Default::default();
    for (n, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 6 {
            return Err(Error::parse("run", n + 1, "expected topic Q0 docid rank score tag"));
        }
        let rank: u64 = cols[3]
            .parse()
            .map_err(|_| Error::parse("run", n + 1, format!("bad rank {:?}", cols[3])))?;
        let score: f64 = cols[4]
            .parse()
            .map_err(|_| Error::parse("run", n + 1, format!("bad score {:?}", cols[4])))?;
        if run.tag.is_empty() {
            run.tag = cols[5].to_owned();
        }
        let docs = ranked.entry(cols[0].to_owned()).or_default();
        if docs.iter().any(|(_, d)| d.doc == cols[2]) {
            return Err(Error::parse("run", n + 1, format!("document {} listed twice", cols[2])));
        }
        docs.push((
            rank,
            ScoredDoc {
                doc: cols[2].to_owned(),
                score,
            },
        ));
    }
    for (topic, mut docs) in ranked {
        docs.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.doc.cmp(&b.1.doc)));
        run.topics.insert(topic, docs.into_iter().map(|(_, d)| d).collect());
    }
    Ok(run)
}

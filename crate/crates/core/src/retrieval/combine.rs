use std::collections::BTreeMap;

use super::{sort_and_truncate, RankedRun, ScoredDoc};
use crate::error::{Error, Result};

/// Gap below a run's lowest score assigned to documents it did not return.
const MISSING_EPSILON: f64 = 1e-6;

/// Interpolates two runs: alpha * a + (1 - alpha) * b. A document absent
/// from one run takes that run's minimum score on the topic minus a small
/// epsilon. Documents only one run returned are left out when that run has
/// zero weight.
pub fn combine(a: &RankedRun, b: &RankedRun, alpha: f64, top_k: usize, tag: &str) -> Result<RankedRun> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha must lie in [0,1], got {alpha}")));
    }
    let mut missing: Vec<String> = a
        .topics
        .keys()
        .filter(|t| !b.topics.contains_key(*t))
        .chain(b.topics.keys().filter(|t| !a.topics.contains_key(*t)))
        .cloned()
        .collect();
    if !missing.is_empty() {
        missing.sort();
        return Err(Error::TopicMismatch(missing));
    }

    let mut out = RankedRun::new(tag);
    for (topic, docs_a) in &a.topics {
        let docs_b = &b.topics[topic];
        let floor = |docs: &[ScoredDoc]| docs.iter().map(|d| d.score).fold(f64::INFINITY, f64::min) - MISSING_EPSILON;
        let (min_a, min_b) = (floor(docs_a), floor(docs_b));
        let mut scores: BTreeMap<&str, (Option<f64>, Option<f64>)> = BTreeMap::new();
        for d in docs_a {
            scores.entry(&d.doc).or_default().0 = Some(d.score);
        }
        for d in docs_b {
            scores.entry(&d.doc).or_default().1 = Some(d.score);
        }
        let mut merged: Vec<ScoredDoc> = scores
            .into_iter()
            .filter(|(_, (sa, sb))| (sa.is_some() && alpha > 0.0) || (sb.is_some() && alpha < 1.0))
            .map(|(doc, (sa, sb))| ScoredDoc {
                doc: doc.to_owned(),
                score: alpha * sa.unwrap_or(min_a) + (1.0 - alpha) * sb.unwrap_or(min_b),
            })
            .collect();
        sort_and_truncate(&mut merged, top_k);
        out.topics.insert(topic.clone(), merged);
    }
    for run in [a, b] {
        for (topic, terms) in &run.skipped {
            let entry = out.skipped.entry(topic.clone()).or_default();
            for t in terms {
                if !entry.contains(t) {
                    entry.push(t.clone());
                }
            }
        }
    }
    Ok(out)
}

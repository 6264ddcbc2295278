//! Effectiveness measures and significance testing for ranked runs.

mod significance;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

pub use significance::{fisher_lsd, friedman, sign_test, Friedman, Lsd};

use crate::error::{Error, Result};
use crate::retrieval::RankedRun;
use crate::tm::{QueryModel, TranslationModel};

/// Default evaluation depth.
pub const DEFAULT_CUTOFF: usize = 1000;

/// Binary relevance judgments. Unjudged documents count as non-relevant.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Qrels {
    relevant: BTreeMap<String, HashSet<String>>,
    judged_topics: BTreeSet<String>,
}

impl Qrels {
    /// Parses `topic iteration docid relevance` lines. Any relevance above
    /// zero counts as relevant.
    pub fn parse(text: &str) -> Result<Self> {
        let mut q = Qrels::default();
        for (n, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 4 {
                return Err(Error::parse("qrels", n + 1, "expected topic 0 docid relevance"));
            }
            let rel: i64 = cols[3]
                .parse()
                .map_err(|_| Error::parse("qrels", n + 1, format!("bad relevance {:?}", cols[3])))?;
            q.judged_topics.insert(cols[0].to_owned());
            if rel > 0 {
                q.add(cols[0], cols[2]);
            }
        }
        Ok(q)
    }

    pub fn add(&mut self, topic: &str, doc: &str) {
        self.judged_topics.insert(topic.to_owned());
        self.relevant
            .entry(topic.to_owned())
            .or_default()
            .insert(doc.to_owned());
    }

    pub fn relevant(&self, topic: &str) -> Option<&HashSet<String>> {
        self.relevant.get(topic).filter(|s| !s.is_empty())
    }

    pub fn is_relevant(&self, topic: &str, doc: &str) -> bool {
        self.relevant.get(topic).is_some_and(|s| s.contains(doc))
    }

    /// Topics with at least one relevant document, sorted.
    pub fn topics(&self) -> impl Iterator<Item = &str> {
        self.relevant
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(t, _)| t.as_str())
    }

    /// Judged topics without any relevant document.
    pub fn empty_topics(&self) -> Vec<&str> {
        self.judged_topics
            .iter()
            .filter(|t| self.relevant(t).is_none())
            .map(String::as_str)
            .collect()
    }
}

/// Uninterpolated average precision: the mean, over all relevant
/// documents, of the precision at the rank where each is retrieved, with
/// zero for relevant documents not retrieved within `cutoff`.
pub fn average_precision<S: AsRef<str>>(ranked: &[S], relevant: &HashSet<String>, cutoff: usize) -> Result<f64> {
    if relevant.is_empty() {
        return Err(Error::Eval(
            "average precision needs at least one relevant document".into(),
        ));
    }
    let mut found = 0usize;
    let mut sum = 0.0;
    let mut seen = HashSet::new();
    for (i, doc) in ranked.iter().take(cutoff).enumerate() {
        let doc = doc.as_ref();
        if !seen.insert(doc) {
            return Err(Error::Eval(format!("document {doc} ranked twice")));
        }
        if relevant.contains(doc) {
            found += 1;
            sum += found as f64 / (i + 1) as f64;
        }
    }
    Ok(sum / relevant.len() as f64)
}

/// Which topics a mean is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopicSet {
    /// Topics that the run answers and that have a relevant document.
    #[default]
    Retrieved,
    /// Every topic with a relevant document; unanswered topics score 0.
    Judged,
}

/// Per-topic AP over the chosen topic set.
pub fn per_topic_ap(run: &RankedRun, qrels: &Qrels, cutoff: usize, set: TopicSet) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for topic in qrels.topics() {
        let relevant = qrels.relevant(topic).expect("listed topics have relevant documents");
        match run.topics.get(topic) {
            Some(docs) => {
                let ids: Vec<&str> = docs.iter().map(|d| d.doc.as_str()).collect();
                out.insert(topic.to_owned(), average_precision(&ids, relevant, cutoff)?);
            }
            None if set == TopicSet::Judged => {
                out.insert(topic.to_owned(), 0.0);
            }
            None => {}
        }
    }
    Ok(out)
}

/// Mean average precision.
pub fn mean_ap(run: &RankedRun, qrels: &Qrels, cutoff: usize, set: TopicSet) -> Result<f64> {
    let aps = per_topic_ap(run, qrels, cutoff, set)?;
    if aps.is_empty() {
        return Err(Error::Eval(format!(
            "run {:?} shares no topic with relevant documents",
            run.tag
        )));
    }
    Ok(aps.values().sum::<f64>() / aps.len() as f64)
}

/// Coverage of the query vocabulary by a translation model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationStats {
    pub unique_terms: usize,
    pub missed: usize,
    pub percent_missed: f64,
    /// Mean number of entries per unique term, missed terms counting 0.
    pub avg_translations: f64,
}

pub fn translation_stats(queries: &[QueryModel], model: &TranslationModel) -> TranslationStats {
    let terms: BTreeSet<&str> = queries
        .iter()
        .flat_map(|q| q.distribution().keys())
        .map(String::as_str)
        .collect();
    let missed = terms.iter().filter(|t| !model.contains_source(t)).count();
    let entries: usize = terms.iter().map(|t| model.translations(t).len()).sum();
    let n = terms.len();
    let ratio = |a: usize| if n == 0 { 0.0 } else { a as f64 / n as f64 };
    TranslationStats {
        unique_terms: n,
        missed,
        percent_missed: 100.0 * ratio(missed),
        avg_translations: ratio(entries),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunEval {
    pub tag: String,
    pub per_topic: BTreeMap<String, f64>,
    pub map: f64,
    pub translation: Option<TranslationStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Significance {
    pub alpha: f64,
    /// Topics the AP matrix was built on, in row order.
    pub topics: Vec<String>,
    pub friedman: Friedman,
    pub lsd: Lsd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub cutoff: usize,
    pub runs: Vec<RunEval>,
    pub significance: Option<Significance>,
}

/// Evaluates runs; with `alpha` set and two or more runs, also tests them
/// for significant differences. The AP matrix covers every topic with a
/// relevant document that some run answers; a run missing a topic scores 0
/// on it.
pub fn evaluate(
    runs: &[RankedRun],
    qrels: &Qrels,
    cutoff: usize,
    set: TopicSet,
    alpha: Option<f64>,
) -> Result<EvalReport> {
    if runs.is_empty() {
        return Err(Error::Eval("no runs to evaluate".into()));
    }
    let mut evals = Vec::with_capacity(runs.len());
    for run in runs {
        let per_topic = per_topic_ap(run, qrels, cutoff, set)?;
        let map = mean_ap(run, qrels, cutoff, set)?;
        evals.push(RunEval {
            tag: run.tag.clone(),
            per_topic,
            map,
            translation: None,
        });
    }
    let significance = match alpha {
        Some(alpha) if runs.len() >= 2 => {
            let topics: Vec<String> = evals
                .iter()
                .flat_map(|e| e.per_topic.keys().cloned())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let matrix: Vec<Vec<f64>> = topics
                .iter()
                .map(|t| {
                    evals
                        .iter()
                        .map(|e| e.per_topic.get(t).copied().unwrap_or(0.0))
                        .collect()
                })
                .collect();
            Some(Significance {
                alpha,
                friedman: friedman(&matrix)?,
                lsd: fisher_lsd(&matrix, alpha)?,
                topics,
            })
        }
        _ => None,
    };
    Ok(EvalReport {
        cutoff,
        runs: evals,
        significance,
    })
}

impl EvalReport {
    /// `key=value` lines followed by the significance table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cutoff={}", self.cutoff);
        for r in &self.runs {
            let _ = writeln!(out, "run={} map={:.4} topics={}", r.tag, r.map, r.per_topic.len());
            if let Some(t) = &r.translation {
                let _ = writeln!(
                    out,
                    "run={} unique_terms={} percent_missed={:.1} avg_translations={:.2}",
                    r.tag, t.unique_terms, t.percent_missed, t.avg_translations
                );
            }
        }
        for r in &self.runs {
            for (topic, ap) in &r.per_topic {
                let _ = writeln!(out, "ap run={} topic={topic} value={ap:.4}", r.tag);
            }
        }
        if let Some(s) = &self.significance {
            let f = &s.friedman;
            let _ = writeln!(out, "friedman_chi2={:.4}", f.chi_square);
            let _ = writeln!(out, "friedman_f={:.4}", f.statistic);
            let _ = writeln!(out, "friedman_df=({},{})", f.runs - 1, (f.runs - 1) * (f.topics - 1));
            let _ = writeln!(out, "friedman_p={:.6}", f.p_value);
            let _ = writeln!(out, "alpha={}", s.alpha);
            let _ = writeln!(
                out,
                "lsd=|R_i-R_j| > t(1-alpha/2,(n-1)(k-1)) * sqrt(2(n*A1-sum R_j^2)/((n-1)(k-1)))"
            );
            let _ = writeln!(out, "lsd_critical={:.4}", s.lsd.critical);
            let _ = writeln!(out, "lsd_applied={}", s.lsd.gated);
            let width = self.runs.iter().map(|r| r.tag.len()).max().unwrap_or(0).max(3);
            let lwidth = s.lsd.letters.iter().map(String::len).max().unwrap_or(1);
            for &i in &s.lsd.order {
                let r = &self.runs[i];
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>lwidth$}: {:.4}  rank_sum={:.1}",
                    r.tag, s.lsd.letters[i], r.map, f.rank_sums[i]
                );
            }
        }
        out
    }
}

//! Language-model retrieval: documents are smoothed unigram models ranked
//! by the normalized log-likelihood ratio of the query, with translation
//! embedded on the query side (QT) or the document side (DT, SYN).

mod combine;
mod index;
mod run;
mod score;
mod topics;

use std::collections::BTreeMap;
use std::str::FromStr;

pub use combine::combine;
pub use index::{build_index, read_index, write_index, Index};
pub use run::{read_run, write_run};
pub use score::{
    naive_query, score_classes, score_dt, score_mono, score_naive, score_qt, score_syn, ClassTable, Ranking, Searcher,
};
pub use topics::{parse_topics, Topic};

use crate::error::Error;
use crate::tm::OovPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    E,
    Two,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalParams {
    /// Weight of the collection model in the smoothed document model.
    pub lambda: f64,
    pub top_k: usize,
    pub oov: OovPolicy,
    pub log_base: LogBase,
}

impl Default for RetrievalParams {
    fn default() -> Self {
        RetrievalParams {
            lambda: 0.7,
            top_k: 1000,
            oov: OovPolicy::PassThrough,
            log_base: LogBase::E,
        }
    }
}

impl RetrievalParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::Config(format!("lambda must lie in (0,1), got {}", self.lambda)));
        }
        if self.top_k == 0 {
            return Err(Error::Config("top_k must be positive".into()));
        }
        Ok(())
    }
}

/// Ranking model selected for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Mono,
    Qt,
    Dt,
    Syn,
    QtBm,
    QtEq,
    Naive,
    /// Queries already translated by an external system.
    External,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Mono,
        Method::Qt,
        Method::Dt,
        Method::Syn,
        Method::QtBm,
        Method::QtEq,
        Method::Naive,
        Method::External,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mono => "mono",
            Method::Qt => "qt",
            Method::Dt => "dt",
            Method::Syn => "syn",
            Method::QtBm => "qt-bm",
            Method::QtEq => "qt-eq",
            Method::Naive => "naive",
            Method::External => "external",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc {
    pub doc: String,
    pub score: f64,
}

/// Per-topic rankings of one system run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RankedRun {
    pub tag: String,
    pub topics: BTreeMap<String, Vec<ScoredDoc>>,
    /// Query terms that contributed nothing, per topic.
    pub skipped: BTreeMap<String, Vec<String>>,
}

impl RankedRun {
    pub fn new(tag: &str) -> Self {
        RankedRun {
            tag: tag.to_owned(),
            ..Default::default()
        }
    }

    pub fn insert(&mut self, topic: &str, ranking: Ranking) {
        if !ranking.skipped_terms.is_empty() {
            self.skipped.insert(topic.to_owned(), ranking.skipped_terms);
        }
        self.topics.insert(topic.to_owned(), ranking.docs);
    }

    pub fn ranked_ids(&self, topic: &str) -> Vec<&str> {
        self.topics
            .get(topic)
            .map(|v| v.iter().map(|d| d.doc.as_str()).collect())
            .unwrap_or_default()
    }
}

/// Sorts by descending score, ties by ascending document id, and truncates.
pub(crate) fn sort_and_truncate(docs: &mut Vec<ScoredDoc>, top_k: usize) {
    docs.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.doc.cmp(&b.doc)));
    docs.truncate(top_k);
}

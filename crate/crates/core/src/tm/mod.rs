//! Word translation models: IBM Model 1 training, pruning, and projection
//! of query models from the source to the target language.

mod io;
mod project;
mod prune;
mod train;

use std::collections::BTreeMap;
use std::fmt;

pub use io::{read_counts, read_marginals, read_model, write_counts, write_marginals, write_model};
pub use project::{derive_variant, project_query, OovPolicy, Variant};
pub use prune::{prune_noise, prune_threshold, prune_topn, prune_topn_by};
pub use train::{log_likelihood, train, LogLikelihood, TrainConfig, TrainOutput, NULL_TOKEN};

/// Source and target language codes, e.g. `en-fr`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Direction {
    pub source: String,
    pub target: String,
}

impl Direction {
    pub fn new(source: &str, target: &str) -> Self {
        Direction {
            source: source.to_owned(),
            target: target.to_owned(),
        }
    }

    pub fn reversed(&self) -> Self {
        Direction::new(&self.target, &self.source)
    }

    /// Parses `src-tgt`.
    pub fn parse(s: &str) -> Option<Self> {
        let (a, b) = s.split_once('-')?;
        (!a.is_empty() && !b.is_empty()).then(|| Direction::new(a, b))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.source, self.target)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub target: String,
    pub prob: f64,
}

/// Sparse conditional table P(target | source).
///
/// Each source term's translations are kept sorted by descending
/// probability, ties by target term. Except for the SYN variant, every
/// source row sums to one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TranslationModel {
    pub direction: Direction,
    table: BTreeMap<String, Vec<Translation>>,
    source_marginal: BTreeMap<String, f64>,
    source_vocab_size: usize,
    target_vocab_size: usize,
}

impl TranslationModel {
    pub fn new(direction: Direction) -> Self {
        TranslationModel {
            direction,
            ..Default::default()
        }
    }

    /// Builds a model from `(source, target, probability)` triples.
    /// Duplicate pairs are summed; zero or negative probabilities are dropped.
    pub fn from_entries<I, S, T>(direction: Direction, entries: I) -> Self
    where
        I: IntoIterator<Item = (S, T, f64)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut rows: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (s, t, p) in entries {
            if p > 0.0 {
                *rows.entry(s.into()).or_default().entry(t.into()).or_insert(0.0) += p;
            }
        }
        let mut model = TranslationModel::new(direction);
        let mut targets = std::collections::BTreeSet::new();
        for (s, row) in rows {
            targets.extend(row.keys().cloned());
            let row = row
                .into_iter()
                .map(|(target, prob)| Translation { target, prob })
                .collect();
            model.set_row(s, row);
        }
        model.source_vocab_size = model.table.len();
        model.target_vocab_size = targets.len();
        model
    }

    /// Each term translates to itself with probability one.
    pub fn identity<I, S>(direction: Direction, terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let terms: std::collections::BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        Self::from_entries(direction, terms.into_iter().map(|t| (t.clone(), t, 1.0)))
    }

    pub(crate) fn set_row(&mut self, source: String, mut row: Vec<Translation>) {
        row.retain(|t| t.prob > 0.0);
        if row.is_empty() {
            self.table.remove(&source);
            return;
        }
        sort_row(&mut row);
        self.table.insert(source, row);
    }

    pub fn translations(&self, source: &str) -> &[Translation] {
        self.table.get(source).map_or(&[], Vec::as_slice)
    }

    pub fn prob(&self, source: &str, target: &str) -> f64 {
        self.translations(source)
            .iter()
            .find(|t| t.target == target)
            .map_or(0.0, |t| t.prob)
    }

    pub fn contains_source(&self, source: &str) -> bool {
        self.table.contains_key(source)
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(String::as_str)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[Translation])> {
        self.table.iter().map(|(s, r)| (s.as_str(), r.as_slice()))
    }

    /// All entries in file order: source ascending, then probability descending.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.table
            .iter()
            .flat_map(|(s, row)| row.iter().map(move |t| (s.as_str(), t.target.as_str(), t.prob)))
    }

    pub fn num_entries(&self) -> usize {
        self.table.values().map(Vec::len).sum()
    }

    pub fn num_sources(&self) -> usize {
        self.table.len()
    }

    /// Relative frequency of `source` in the training corpus, if known.
    pub fn source_marginal(&self, source: &str) -> Option<f64> {
        self.source_marginal.get(source).copied()
    }

    pub fn marginals(&self) -> &BTreeMap<String, f64> {
        &self.source_marginal
    }

    pub fn set_marginals(&mut self, marginals: BTreeMap<String, f64>) {
        self.source_marginal = marginals;
    }

    /// Size of the source vocabulary seen in training (L).
    pub fn source_vocab_size(&self) -> usize {
        self.source_vocab_size
    }

    /// Size of the target vocabulary seen in training (N).
    pub fn target_vocab_size(&self) -> usize {
        self.target_vocab_size
    }

    pub fn set_vocab_sizes(&mut self, source: usize, target: usize) {
        self.source_vocab_size = source;
        self.target_vocab_size = target;
    }

    /// Largest deviation of a row sum from one.
    pub fn max_row_deviation(&self) -> f64 {
        self.table
            .values()
            .map(|row| (row.iter().map(|t| t.prob).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Keeps entries accepted by `keep`, then renormalizes each surviving row.
    pub(crate) fn filter_renormalized(&self, mut keep: impl FnMut(&str, &Translation) -> bool) -> Self {
        let mut out = TranslationModel {
            direction: self.direction.clone(),
            table: BTreeMap::new(),
            source_marginal: self.source_marginal.clone(),
            source_vocab_size: self.source_vocab_size,
            target_vocab_size: self.target_vocab_size,
        };
        for (s, row) in &self.table {
            let mut kept: Vec<Translation> = row.iter().filter(|t| keep(s, t)).cloned().collect();
            let total: f64 = kept.iter().map(|t| t.prob).sum();
            if total <= 0.0 {
                continue;
            }
            for t in &mut kept {
                t.prob /= total;
            }
            out.set_row(s.clone(), kept);
        }
        out
    }

    pub(crate) fn map_rows(&self, mut f: impl FnMut(&[Translation]) -> Vec<Translation>) -> Self {
        let mut out = self.clone();
        out.table.clear();
        for (s, row) in &self.table {
            out.set_row(s.clone(), f(row));
        }
        out
    }
}

fn sort_row(row: &mut [Translation]) {
    row.sort_by(|a, b| b.prob.total_cmp(&a.prob).then_with(|| a.target.cmp(&b.target)));
}

/// Final-iteration expected counts E[c(s, t)] from EM, used as the
/// reliability score for top-N pruning.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpectedCounts(BTreeMap<(String, String), f64>);

impl ExpectedCounts {
    pub fn get(&self, source: &str, target: &str) -> f64 {
        // BTreeMap<(String, String)> cannot be queried by (&str, &str)
        self.0
            .get(&(source.to_owned(), target.to_owned()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn insert(&mut self, source: impl Into<String>, target: impl Into<String>, count: f64) {
        self.0.insert((source.into(), target.into()), count);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.0.iter().map(|((s, t), c)| (s.as_str(), t.as_str(), *c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>, T: Into<String>> FromIterator<(S, T, f64)> for ExpectedCounts {
    fn from_iter<I: IntoIterator<Item = (S, T, f64)>>(iter: I) -> Self {
        let mut c = ExpectedCounts::default();
        for (s, t, v) in iter {
            c.insert(s, t, v);
        }
        c
    }
}

/// Unigram query model P(term | M_Q) together with the raw counts it was
/// estimated from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueryModel {
    pub language: String,
    distribution: BTreeMap<String, f64>,
    raw_counts: BTreeMap<String, f64>,
}

impl QueryModel {
    /// Maximum-likelihood estimate from a term sequence.
    pub fn from_terms<S: AsRef<str>>(language: &str, terms: &[S]) -> Self {
        let mut counts = BTreeMap::new();
        for t in terms {
            *counts.entry(t.as_ref().to_owned()).or_insert(0.0) += 1.0;
        }
        Self::from_counts(language, counts)
    }

    pub fn from_counts(language: &str, counts: BTreeMap<String, f64>) -> Self {
        let counts: BTreeMap<String, f64> = counts.into_iter().filter(|(_, c)| *c > 0.0).collect();
        let total: f64 = counts.values().sum();
        let distribution = counts.iter().map(|(t, c)| (t.clone(), c / total)).collect();
        QueryModel {
            language: language.to_owned(),
            distribution,
            raw_counts: counts,
        }
    }

    /// Uses the given probabilities as-is; raw counts mirror the distribution.
    pub fn from_distribution(language: &str, distribution: BTreeMap<String, f64>) -> Self {
        let distribution: BTreeMap<String, f64> = distribution.into_iter().filter(|(_, p)| *p > 0.0).collect();
        QueryModel {
            language: language.to_owned(),
            raw_counts: distribution.clone(),
            distribution,
        }
    }

    pub fn distribution(&self) -> &BTreeMap<String, f64> {
        &self.distribution
    }

    pub fn raw_counts(&self) -> &BTreeMap<String, f64> {
        &self.raw_counts
    }

    pub fn prob(&self, term: &str) -> f64 {
        self.distribution.get(term).copied().unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.distribution.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.distribution.values().sum()
    }
}

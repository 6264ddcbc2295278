//! NLLR scoring.
//!
//! Every ranking model reduces to the same form. Each query term i carries
//! a weight q_i and a class of document-language terms t_j with weights
//! w_j, and
//!
//! ```text
//! score(D) = sum_i q_i ln( sum_j w_j ((1-l) P(t_j|D) + l P(t_j|C)) / sum_j w_j P(t_j|C) )
//! ```
//!
//! Monolingual and QT runs use singleton classes, DT uses the inverted
//! reverse model, SYN uses unit weights over the forward translations.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;

use super::{sort_and_truncate, Index, LogBase, Method, RankedRun, RetrievalParams, ScoredDoc};
use crate::error::{Error, Result};
use crate::tm::{derive_variant, project_query, OovPolicy, QueryModel, TranslationModel, Variant};

/// The ranked documents of one topic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ranking {
    pub docs: Vec<ScoredDoc>,
    /// Query terms with no collection mass, in query order.
    pub skipped_terms: Vec<String>,
}

/// Maps each query-language term to weighted document-language terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassTable {
    classes: BTreeMap<String, Vec<(String, f64)>>,
}

impl ClassTable {
    /// Inverts a reverse model P(s|t) into classes s -> {(t, P(s|t))}.
    pub fn from_reverse(reverse: &TranslationModel) -> Self {
        let mut classes: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
        for (t, s, p) in reverse.entries() {
            classes.entry(s.to_owned()).or_default().push((t.to_owned(), p));
        }
        for class in classes.values_mut() {
            class.sort_by(|a, b| a.0.cmp(&b.0));
        }
        ClassTable { classes }
    }

    /// Classes s -> {(t, 1)} over the forward translations of s.
    pub fn from_forward_synonyms(forward: &TranslationModel) -> Self {
        let syn = derive_variant(forward, Variant::Synonym);
        let mut classes = BTreeMap::new();
        for (s, row) in syn.rows() {
            let mut class: Vec<(String, f64)> = row.iter().map(|t| (t.target.clone(), t.prob)).collect();
            class.sort_by(|a, b| a.0.cmp(&b.0));
            classes.insert(s.to_owned(), class);
        }
        ClassTable { classes }
    }

    pub fn class(&self, term: &str) -> Option<&[(String, f64)]> {
        self.classes.get(term).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

struct QueryClass<'a> {
    label: &'a str,
    weight: f64,
    terms: Vec<(&'a str, f64)>,
}

fn score_query_classes(classes: &[QueryClass<'_>], index: &Index, params: &RetrievalParams) -> Ranking {
    let lambda = params.lambda;
    let ln_lambda = lambda.ln();
    let n = index.num_docs();
    let total = index.total_tokens() as f64;
    let mut scores = vec![0.0f64; n];
    let mut x = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut skipped = Vec::new();
    let mut any = false;

    for class in classes {
        let den: f64 = class
            .terms
            .iter()
            .map(|&(t, w)| w * (index.collection_freq(t) as f64 / total))
            .sum();
        if den <= 0.0 || class.weight <= 0.0 {
            skipped.push(class.label.to_owned());
            continue;
        }
        any = true;
        for &(t, w) in &class.terms {
            for &(d, c) in index.postings(t) {
                let d = d as usize;
                if x[d] == 0.0 {
                    touched.push(d);
                }
                x[d] += w * (c as f64 / index.doc_len(d) as f64);
            }
        }
        // untouched documents contribute weight * ln(lambda), added below
        for &d in &touched {
            let ratio = lambda + (1.0 - lambda) * x[d] / den;
            scores[d] += class.weight * (ratio.ln() - ln_lambda);
            x[d] = 0.0;
        }
        touched.clear();
        for s in scores.iter_mut() {
            *s += class.weight * ln_lambda;
        }
    }

    if !any {
        return Ranking {
            docs: Vec::new(),
            skipped_terms: skipped,
        };
    }
    let scale = match params.log_base {
        LogBase::E => 1.0,
        LogBase::Two => std::f64::consts::LN_2,
    };
    let mut docs: Vec<ScoredDoc> = scores
        .into_iter()
        .enumerate()
        .map(|(d, s)| ScoredDoc {
            doc: index.doc_id(d).to_owned(),
            score: s / scale,
        })
        .collect();
    sort_and_truncate(&mut docs, params.top_k);
    Ranking {
        docs,
        skipped_terms: skipped,
    }
}

/// Monolingual NLLR ranking.
pub fn score_mono(query: &QueryModel, index: &Index, params: &RetrievalParams) -> Ranking {
    let classes: Vec<QueryClass> = query
        .distribution()
        .iter()
        .map(|(t, &q)| QueryClass {
            label: t,
            weight: q,
            terms: vec![(t.as_str(), 1.0)],
        })
        .collect();
    score_query_classes(&classes, index, params)
}

/// Ranks with an arbitrary class table. Query terms without a class are
/// matched as surface forms or dropped, depending on `params.oov`.
pub fn score_classes(query: &QueryModel, table: &ClassTable, index: &Index, params: &RetrievalParams) -> Ranking {
    let mut classes = Vec::new();
    let mut dropped = Vec::new();
    for (s, &q) in query.distribution() {
        let terms: Vec<(&str, f64)> = match table.class(s) {
            Some(class) => class.iter().map(|(t, w)| (t.as_str(), *w)).collect(),
            None if params.oov == OovPolicy::PassThrough => vec![(s.as_str(), 1.0)],
            None => {
                dropped.push(s.clone());
                continue;
            }
        };
        classes.push(QueryClass {
            label: s,
            weight: q,
            terms,
        });
    }
    let mut ranking = score_query_classes(&classes, index, params);
    ranking.skipped_terms.extend(dropped);
    ranking
}

/// Query translation: the query model is projected through P(t|s) and
/// ranked monolingually.
pub fn score_qt(query: &QueryModel, forward: &TranslationModel, index: &Index, params: &RetrievalParams) -> Ranking {
    score_mono(&project_query(query, forward, params.oov), index, params)
}

/// Document translation with a reverse model P(s|t).
pub fn score_dt(query: &QueryModel, reverse: &TranslationModel, index: &Index, params: &RetrievalParams) -> Ranking {
    score_classes(query, &ClassTable::from_reverse(reverse), index, params)
}

/// Synonym-class matching: every forward translation of a query term
/// counts as an occurrence of it.
pub fn score_syn(query: &QueryModel, forward: &TranslationModel, index: &Index, params: &RetrievalParams) -> Ranking {
    score_classes(query, &ClassTable::from_forward_synonyms(forward), index, params)
}

/// Builds the unweighted replacement bag: each occurrence of a source term
/// adds one count to every one of its translations.
pub fn naive_query(query: &QueryModel, forward: &TranslationModel, oov: OovPolicy) -> QueryModel {
    let mut bag: BTreeMap<String, f64> = BTreeMap::new();
    for (s, &c) in query.raw_counts() {
        let row = forward.translations(s);
        if row.is_empty() {
            if oov == OovPolicy::PassThrough {
                *bag.entry(s.clone()).or_insert(0.0) += c;
            }
            continue;
        }
        for t in row {
            *bag.entry(t.target.clone()).or_insert(0.0) += c;
        }
    }
    QueryModel::from_counts(&forward.direction.target, bag)
}

pub fn score_naive(query: &QueryModel, forward: &TranslationModel, index: &Index, params: &RetrievalParams) -> Ranking {
    score_mono(&naive_query(query, forward, params.oov), index, params)
}

/// Runs topics against one index, caching the derived models each method
/// needs.
pub struct Searcher<'a> {
    index: &'a Index,
    params: RetrievalParams,
    forward: Option<&'a TranslationModel>,
    reverse: Option<&'a TranslationModel>,
    best: OnceLock<TranslationModel>,
    equal: OnceLock<TranslationModel>,
    dt_classes: OnceLock<ClassTable>,
    syn_classes: OnceLock<ClassTable>,
}

impl<'a> Searcher<'a> {
    pub fn new(index: &'a Index, params: RetrievalParams) -> Result<Self> {
        params.validate()?;
        Ok(Searcher {
            index,
            params,
            forward: None,
            reverse: None,
            best: OnceLock::new(),
            equal: OnceLock::new(),
            dt_classes: OnceLock::new(),
            syn_classes: OnceLock::new(),
        })
    }

    /// P(t|s), query language to document language.
    pub fn with_forward(mut self, model: &'a TranslationModel) -> Self {
        self.forward = Some(model);
        self
    }

    /// P(s|t), document language to query language.
    pub fn with_reverse(mut self, model: &'a TranslationModel) -> Self {
        self.reverse = Some(model);
        self
    }

    pub fn params(&self) -> &RetrievalParams {
        &self.params
    }

    fn forward(&self, method: Method) -> Result<&'a TranslationModel> {
        self.forward
            .ok_or_else(|| Error::Config(format!("method {} needs a forward translation model", method.name())))
    }

    /// Ranks one query.
    pub fn search(&self, method: Method, query: &QueryModel) -> Result<Ranking> {
        let (index, params) = (self.index, &self.params);
        Ok(match method {
            Method::Mono | Method::External => score_mono(query, index, params),
            Method::Qt => score_qt(query, self.forward(method)?, index, params),
            Method::QtBm => {
                let fwd = self.forward(method)?;
                let m = self.best.get_or_init(|| derive_variant(fwd, Variant::BestMatch));
                score_qt(query, m, index, params)
            }
            Method::QtEq => {
                let fwd = self.forward(method)?;
                let m = self.equal.get_or_init(|| derive_variant(fwd, Variant::Equal));
                score_qt(query, m, index, params)
            }
            Method::Naive => score_naive(query, self.forward(method)?, index, params),
            Method::Syn => {
                let fwd = self.forward(method)?;
                let table = self.syn_classes.get_or_init(|| ClassTable::from_forward_synonyms(fwd));
                score_classes(query, table, index, params)
            }
            Method::Dt => {
                let rev = self
                    .reverse
                    .ok_or_else(|| Error::Config("method dt needs a reverse translation model".into()))?;
                let table = self.dt_classes.get_or_init(|| ClassTable::from_reverse(rev));
                score_classes(query, table, index, params)
            }
        })
    }

    /// Ranks every topic; topics are scored in parallel.
    pub fn run(&self, method: Method, tag: &str, queries: &[(String, QueryModel)]) -> Result<RankedRun> {
        let rankings: Vec<Ranking> = queries
            .par_iter()
            .map(|(_, q)| self.search(method, q))
            .collect::<Result<_>>()?;
        let mut run = RankedRun::new(tag);
        for ((topic, _), ranking) in queries.iter().zip(rankings) {
            run.insert(topic, ranking);
        }
        Ok(run)
    }
}

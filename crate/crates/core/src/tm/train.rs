use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{Direction, ExpectedCounts, Translation, TranslationModel};
use crate::error::{Error, Result};

/// Source-side pseudo word that lets target words align to nothing.
pub const NULL_TOKEN: &str = "<null>";

/// Probability floor applied to target tokens no source word can generate.
const LOG_FLOOR: f64 = 1e-12;

const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub iterations: usize,
    pub use_null_token: bool,
    /// Pairs with fewer tokens than this on either side are skipped.
    pub min_pair_tokens: usize,
    /// Tokens beyond this position on either side are ignored.
    pub max_pair_tokens: usize,
    /// Stop early once the log-likelihood gain of an iteration falls below this.
    pub convergence_delta: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 5,
            use_null_token: false,
            min_pair_tokens: 1,
            max_pair_tokens: 60,
            convergence_delta: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub model: TranslationModel,
    /// Expected counts of the E-step that produced the final parameters.
    pub counts: ExpectedCounts,
    /// Training-set log-likelihood of the initial model and after every
    /// completed iteration.
    pub log_likelihood: Vec<f64>,
    pub pairs_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikelihood {
    pub value: f64,
    /// Target tokens with zero probability under the model.
    pub floored_tokens: usize,
}

struct Vocab {
    ids: HashMap<String, u32>,
    words: Vec<String>,
}

impl Vocab {
    fn new() -> Self {
        Vocab {
            ids: HashMap::new(),
            words: Vec::new(),
        }
    }

    fn id(&mut self, w: &str) -> u32 {
        if let Some(&id) = self.ids.get(w) {
            return id;
        }
        let id = self.words.len() as u32;
        self.ids.insert(w.to_owned(), id);
        self.words.push(w.to_owned());
        id
    }
}

/// Co-occurrence table in compressed rows: row `s` holds the sorted target
/// ids seen with `s`, and `start[s]..start[s+1]` indexes into the
/// parameter vector.
struct Table {
    start: Vec<usize>,
    targets: Vec<u32>,
}

impl Table {
    fn index(&self, s: u32, t: u32) -> usize {
        let lo = self.start[s as usize];
        let hi = self.start[s as usize + 1];
        let pos = self.targets[lo..hi]
            .binary_search(&t)
            .expect("target co-occurs with source");
        lo + pos
    }
}

struct Corpus {
    pairs: Vec<(Vec<u32>, Vec<u32>)>,
    src: Vocab,
    tgt: Vocab,
    null_id: Option<u32>,
}

fn prepare<S: AsRef<str>>(pairs: &[(Vec<S>, Vec<S>)], config: &TrainConfig) -> Corpus {
    let mut src = Vocab::new();
    let mut tgt = Vocab::new();
    let null_id = config.use_null_token.then(|| src.id(NULL_TOKEN));
    let min = config.min_pair_tokens.max(1);
    let mut out = Vec::with_capacity(pairs.len());
    for (s, t) in pairs {
        let s: Vec<&str> = s.iter().map(AsRef::as_ref).take(config.max_pair_tokens).collect();
        let t: Vec<&str> = t.iter().map(AsRef::as_ref).take(config.max_pair_tokens).collect();
        if s.len() < min || t.len() < min {
            continue;
        }
        let mut sids: Vec<u32> = s.iter().map(|w| src.id(w)).collect();
        if let Some(n) = null_id {
            sids.push(n);
        }
        let tids = t.iter().map(|w| tgt.id(w)).collect();
        out.push((sids, tids));
    }
    Corpus {
        pairs: out,
        src,
        tgt,
        null_id,
    }
}

fn cooccurrence(corpus: &Corpus) -> Table {
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); corpus.src.words.len()];
    for (s, t) in &corpus.pairs {
        for &si in s {
            rows[si as usize].extend_from_slice(t);
        }
    }
    let mut start = Vec::with_capacity(rows.len() + 1);
    let mut targets = Vec::new();
    start.push(0);
    for mut row in rows {
        row.sort_unstable();
        row.dedup();
        targets.extend(row);
        start.push(targets.len());
    }
    Table { start, targets }
}

/// One E-step: log-likelihood of the current parameters and the expected
/// counts they imply. Chunks are reduced in order so the result does not
/// depend on thread scheduling.
fn expectation(corpus: &Corpus, table: &Table, probs: &[f64], want_counts: bool) -> (f64, Vec<f64>) {
    let partials: Vec<(f64, HashMap<usize, f64>)> = corpus
        .pairs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut ll = 0.0;
            let mut acc: HashMap<usize, f64> = HashMap::new();
            let mut idx = Vec::new();
            for (s, t) in chunk {
                let norm = s.len() as f64;
                for &tj in t {
                    idx.clear();
                    idx.extend(s.iter().map(|&si| table.index(si, tj)));
                    let denom: f64 = idx.iter().map(|&i| probs[i]).sum();
                    ll += (denom.max(LOG_FLOOR) / norm).ln();
                    if want_counts && denom > 0.0 {
                        for &i in &idx {
                            *acc.entry(i).or_insert(0.0) += probs[i] / denom;
                        }
                    }
                }
            }
            (ll, acc)
        })
        .collect();
    let mut counts = if want_counts {
        vec![0.0; probs.len()]
    } else {
        Vec::new()
    };
    let mut ll = 0.0;
    for (part_ll, acc) in partials {
        ll += part_ll;
        for (i, c) in acc {
            counts[i] += c;
        }
    }
    (ll, counts)
}

fn maximization(table: &Table, counts: &[f64], probs: &mut [f64]) {
    for s in 0..table.start.len() - 1 {
        let range = table.start[s]..table.start[s + 1];
        let total: f64 = counts[range.clone()].iter().sum();
        if total > 0.0 {
            for i in range {
                probs[i] = counts[i] / total;
            }
        }
    }
}

/// Trains P(target | source) with IBM Model 1 EM.
///
/// Parameters start uniform over the targets each source word co-occurs
/// with. Each iteration accumulates, for every target token, the posterior
/// share P(t|s) / sum over the pair's source tokens of P(t|s'), then
/// renormalizes per source word.
pub fn train<S: AsRef<str>>(
    pairs: &[(Vec<S>, Vec<S>)],
    direction: Direction,
    config: &TrainConfig,
) -> Result<TrainOutput> {
    if config.iterations == 0 {
        return Err(Error::Config("iterations must be at least 1".into()));
    }
    let corpus = prepare(pairs, config);
    if corpus.pairs.is_empty() {
        return Err(Error::Training("no usable sentence pairs".into()));
    }
    let table = cooccurrence(&corpus);
    let mut probs = vec![0.0; table.targets.len()];
    for s in 0..table.start.len() - 1 {
        let range = table.start[s]..table.start[s + 1];
        let k = range.len() as f64;
        probs[range].iter_mut().for_each(|p| *p = 1.0 / k);
    }

    let mut trace = Vec::with_capacity(config.iterations + 1);
    let mut last_counts: Option<Vec<f64>> = None;
    let mut converged = false;
    for _ in 0..config.iterations {
        let (ll, counts) = expectation(&corpus, &table, &probs, true);
        if let (Some(delta), Some(&prev)) = (config.convergence_delta, trace.last()) {
            if ll - prev < delta {
                trace.push(ll);
                converged = true;
                break;
            }
        }
        trace.push(ll);
        maximization(&table, &counts, &mut probs);
        last_counts = Some(counts);
    }
    if !converged {
        trace.push(expectation(&corpus, &table, &probs, false).0);
    }
    let counts = last_counts.expect("at least one iteration ran");

    let mut model = TranslationModel::new(direction);
    let mut expected = ExpectedCounts::default();
    for (s, word) in corpus.src.words.iter().enumerate() {
        let range = table.start[s]..table.start[s + 1];
        let row = range
            .clone()
            .map(|i| Translation {
                target: corpus.tgt.words[table.targets[i] as usize].clone(),
                prob: probs[i],
            })
            .collect();
        model.set_row(word.clone(), row);
        for i in range {
            expected.insert(
                word.clone(),
                corpus.tgt.words[table.targets[i] as usize].clone(),
                counts[i],
            );
        }
    }

    let mut freq: BTreeMap<String, f64> = BTreeMap::new();
    let mut total = 0.0;
    for (s, _) in &corpus.pairs {
        for &si in s {
            if Some(si) != corpus.null_id {
                *freq.entry(corpus.src.words[si as usize].clone()).or_insert(0.0) += 1.0;
                total += 1.0;
            }
        }
    }
    freq.values_mut().for_each(|v| *v /= total);
    model.set_marginals(freq);
    let null_words = usize::from(corpus.null_id.is_some());
    model.set_vocab_sizes(corpus.src.words.len() - null_words, corpus.tgt.words.len());

    Ok(TrainOutput {
        model,
        counts: expected,
        log_likelihood: trace,
        pairs_used: corpus.pairs.len(),
    })
}

/// Training-set log-likelihood, up to the constant length terms:
/// the sum over target tokens of log((1/l) * sum_s P(t|s)), where l is the
/// source length (plus one when the model has a NULL row).
pub fn log_likelihood<S: AsRef<str>>(model: &TranslationModel, pairs: &[(Vec<S>, Vec<S>)]) -> LogLikelihood {
    let with_null = model.contains_source(NULL_TOKEN);
    let mut value = 0.0;
    let mut floored = 0;
    for (s, t) in pairs {
        let mut src: Vec<&str> = s.iter().map(AsRef::as_ref).collect();
        if with_null {
            src.push(NULL_TOKEN);
        }
        if src.is_empty() {
            continue;
        }
        let norm = src.len() as f64;
        for tj in t {
            let p: f64 = src.iter().map(|si| model.prob(si, tj.as_ref())).sum::<f64>() / norm;
            if p > 0.0 {
                value += p.ln();
            } else {
                value += LOG_FLOOR.ln();
                floored += 1;
            }
        }
    }
    LogLikelihood {
        value,
        floored_tokens: floored,
    }
}

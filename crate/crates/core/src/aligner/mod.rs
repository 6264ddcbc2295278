//! Sentence alignment by dynamic programming over six translation patterns,
//! scored by pattern prior, a Gaussian length term and a cognate bonus.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::textprep::Sentence;

/// Segment correspondence, written source-target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    OneOne,
    OneZero,
    ZeroOne,
    TwoOne,
    OneTwo,
    TwoTwo,
}

impl Pattern {
    /// Patterns in tie-breaking order.
    pub const ALL: [Pattern; 6] = [
        Pattern::OneOne,
        Pattern::OneZero,
        Pattern::ZeroOne,
        Pattern::TwoOne,
        Pattern::OneTwo,
        Pattern::TwoTwo,
    ];

    pub fn sizes(self) -> (usize, usize) {
        match self {
            Pattern::OneOne => (1, 1),
            Pattern::OneZero => (1, 0),
            Pattern::ZeroOne => (0, 1),
            Pattern::TwoOne => (2, 1),
            Pattern::OneTwo => (1, 2),
            Pattern::TwoTwo => (2, 2),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pattern::OneOne => "1-1",
            Pattern::OneZero => "1-0",
            Pattern::ZeroOne => "0-1",
            Pattern::TwoOne => "2-1",
            Pattern::OneTwo => "1-2",
            Pattern::TwoTwo => "2-2",
        }
    }

    /// The same pattern seen from the other side.
    pub fn transposed(self) -> Pattern {
        match self {
            Pattern::OneZero => Pattern::ZeroOne,
            Pattern::ZeroOne => Pattern::OneZero,
            Pattern::TwoOne => Pattern::OneTwo,
            Pattern::OneTwo => Pattern::TwoOne,
            p => p,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pattern::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown alignment pattern {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignParams {
    priors: [f64; 6],
    pub length_variance: f64,
    pub cognate_weight: f64,
    pub cognate_prefix_len: usize,
}

impl Default for AlignParams {
    fn default() -> Self {
        AlignParams {
            priors: [0.89, 0.005, 0.005, 0.0445, 0.0445, 0.011],
            length_variance: 6.8,
            cognate_weight: 0.3,
            cognate_prefix_len: 4,
        }
    }
}

impl AlignParams {
    pub fn prior(&self, pattern: Pattern) -> f64 {
        self.priors[pattern.index()]
    }

    pub fn set_prior(&mut self, pattern: Pattern, p: f64) {
        self.priors[pattern.index()] = p;
    }

    pub fn validate(&self) -> Result<()> {
        if self.priors.iter().any(|&p| p.is_nan() || p <= 0.0) {
            return Err(Error::Config("pattern priors must be positive".into()));
        }
        let sum: f64 = self.priors.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("pattern priors sum to {sum}, not 1")));
        }
        if self.length_variance.is_nan() || self.length_variance <= 0.0 {
            return Err(Error::Config("length variance must be positive".into()));
        }
        if self.cognate_weight.is_nan() || self.cognate_weight < 0.0 {
            return Err(Error::Config("cognate weight must be nonnegative".into()));
        }
        if self.cognate_prefix_len == 0 {
            return Err(Error::Config("cognate prefix length must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Couple {
    pub pattern: Pattern,
    pub source: Range<usize>,
    pub target: Range<usize>,
    pub score: f64,
}

fn prefix_counts<S: AsRef<str>>(tokens: &[S], prefix_len: usize) -> HashMap<String, usize> {
    let mut out = HashMap::new();
    for t in tokens {
        let lower = t.as_ref().to_lowercase();
        if lower.chars().count() < prefix_len {
            continue;
        }
        let key: String = lower.chars().take(prefix_len).collect();
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

fn matched(a: &HashMap<String, usize>, b: &HashMap<String, usize>) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .map(|(k, &c)| c.min(large.get(k).copied().unwrap_or(0)))
        .sum()
}

/// Size of a one-to-one matching between tokens of at least `prefix_len`
/// characters that share their first `prefix_len` characters, ignoring case.
/// Since matching is by equal prefix key, the greedy matching is maximal.
pub fn cognates<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T], prefix_len: usize) -> usize {
    matched(&prefix_counts(a, prefix_len), &prefix_counts(b, prefix_len))
}

/// Standardized length discrepancy of a segment pair given the expected
/// target/source length ratio. The scale sqrt(r) * (r*lenA + lenB) / 2
/// makes the measure antisymmetric under swapping sides and inverting r.
pub fn length_delta(len_a: f64, len_b: f64, ratio: f64, variance: f64) -> f64 {
    let diff = len_b - ratio * len_a;
    let scale = variance * ratio.sqrt() * (ratio * len_a + len_b) / 2.0;
    if scale <= 0.0 {
        return 0.0;
    }
    diff / scale.sqrt()
}

/// Log of the standard normal density.
pub fn log_phi(x: f64) -> f64 {
    -0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Target/source character-length ratio of a document pair, 1 when either
/// side is empty.
pub fn length_ratio(a: &[Sentence], b: &[Sentence]) -> f64 {
    let la: usize = a.iter().map(|s| s.char_length).sum();
    let lb: usize = b.iter().map(|s| s.char_length).sum();
    if la == 0 || lb == 0 {
        1.0
    } else {
        lb as f64 / la as f64
    }
}

/// Log score of aligning two segments with the given pattern.
pub fn couple_score(a: &[&Sentence], b: &[&Sentence], pattern: Pattern, ratio: f64, params: &AlignParams) -> f64 {
    let prior = params.prior(pattern).ln();
    if a.is_empty() || b.is_empty() {
        return prior;
    }
    let la: usize = a.iter().map(|s| s.char_length).sum();
    let lb: usize = b.iter().map(|s| s.char_length).sum();
    let delta = length_delta(la as f64, lb as f64, ratio, params.length_variance);
    let ta: Vec<&str> = a.iter().flat_map(|s| s.tokens.iter().map(String::as_str)).collect();
    let tb: Vec<&str> = b.iter().flat_map(|s| s.tokens.iter().map(String::as_str)).collect();
    prior + log_phi(delta) + params.cognate_weight * cognates(&ta, &tb, params.cognate_prefix_len) as f64
}

struct Scorer<'a> {
    a: &'a [Sentence],
    b: &'a [Sentence],
    prefixes_a: Vec<HashMap<String, usize>>,
    prefixes_b: Vec<HashMap<String, usize>>,
    ratio: f64,
    params: &'a AlignParams,
    log_priors: [f64; 6],
}

impl<'a> Scorer<'a> {
    fn new(a: &'a [Sentence], b: &'a [Sentence], params: &'a AlignParams) -> Self {
        let k = params.cognate_prefix_len;
        Scorer {
            a,
            b,
            prefixes_a: a.iter().map(|s| prefix_counts(&s.tokens, k)).collect(),
            prefixes_b: b.iter().map(|s| prefix_counts(&s.tokens, k)).collect(),
            ratio: length_ratio(a, b),
            params,
            log_priors: params.priors.map(f64::ln),
        }
    }

    fn merged(maps: &[HashMap<String, usize>]) -> std::borrow::Cow<'_, HashMap<String, usize>> {
        if maps.len() == 1 {
            return std::borrow::Cow::Borrowed(&maps[0]);
        }
        let mut out = maps[0].clone();
        for m in &maps[1..] {
            for (k, c) in m {
                *out.entry(k.clone()).or_insert(0) += c;
            }
        }
        std::borrow::Cow::Owned(out)
    }

    /// Score of the couple ending at (i, j) exclusive.
    fn score(&self, pattern: Pattern, i: usize, j: usize) -> f64 {
        let (da, db) = pattern.sizes();
        let prior = self.log_priors[pattern.index()];
        if da == 0 || db == 0 {
            return prior;
        }
        let la: usize = self.a[i - da..i].iter().map(|s| s.char_length).sum();
        let lb: usize = self.b[j - db..j].iter().map(|s| s.char_length).sum();
        let delta = length_delta(la as f64, lb as f64, self.ratio, self.params.length_variance);
        let mut score = prior + log_phi(delta);
        if self.params.cognate_weight > 0.0 {
            let pa = Self::merged(&self.prefixes_a[i - da..i]);
            let pb = Self::merged(&self.prefixes_b[j - db..j]);
            score += self.params.cognate_weight * matched(&pa, &pb) as f64;
        }
        score
    }
}

/// Finds the highest-scoring monotone segmentation of both sentence lists.
/// On equal scores the pattern listed first in [`Pattern::ALL`] wins.
pub fn align(a: &[Sentence], b: &[Sentence], params: &AlignParams) -> Vec<Couple> {
    let (n, m) = (a.len(), b.len());
    let scorer = Scorer::new(a, b, params);
    let width = m + 1;
    let mut best = vec![f64::NEG_INFINITY; (n + 1) * width];
    let mut back: Vec<Option<(Pattern, f64)>> = vec![None; (n + 1) * width];
    best[0] = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let mut cell = f64::NEG_INFINITY;
            let mut choice = None;
            for p in Pattern::ALL {
                let (da, db) = p.sizes();
                if da > i || db > j {
                    continue;
                }
                let prev = best[(i - da) * width + (j - db)];
                if prev == f64::NEG_INFINITY {
                    continue;
                }
                let s = scorer.score(p, i, j);
                if prev + s > cell {
                    cell = prev + s;
                    choice = Some((p, s));
                }
            }
            best[i * width + j] = cell;
            back[i * width + j] = choice;
        }
    }
    let mut couples = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let (p, score) = back[i * width + j].expect("every cell is reachable through 1-0 and 0-1 moves");
        let (da, db) = p.sizes();
        couples.push(Couple {
            pattern: p,
            source: i - da..i,
            target: j - db..j,
            score,
        });
        i -= da;
        j -= db;
    }
    couples.reverse();
    couples
}

pub fn total_score(couples: &[Couple]) -> f64 {
    couples.iter().map(|c| c.score).sum()
}

/// The 1-1 couples as sentence pairs, in document order.
pub fn extract_training_pairs<'a>(
    couples: &[Couple],
    a: &'a [Sentence],
    b: &'a [Sentence],
) -> Vec<(&'a Sentence, &'a Sentence)> {
    couples
        .iter()
        .filter(|c| c.pattern == Pattern::OneOne)
        .map(|c| (&a[c.source.start], &b[c.target.start]))
        .collect()
}

fn one_line(text: &str) -> String {
    text.split(['\t', '\n', '\r']).collect::<Vec<_>>().join(" ")
}

/// `source<TAB>target` lines.
pub fn write_pairs(pairs: &[(&Sentence, &Sentence)]) -> String {
    let mut out = String::new();
    for (s, t) in pairs {
        let _ = writeln!(out, "{}\t{}", one_line(&s.text), one_line(&t.text));
    }
    out
}

/// Every couple as `pattern<TAB>source span<TAB>target span<TAB>score<TAB>source text<TAB>target text`.
pub fn write_alignment(couples: &[Couple], a: &[Sentence], b: &[Sentence]) -> String {
    let mut out = String::new();
    let span = |r: &Range<usize>| {
        if r.is_empty() {
            "-".to_owned()
        } else {
            format!("{}-{}", r.start, r.end - 1)
        }
    };
    let text = |s: &[Sentence], r: &Range<usize>| {
        one_line(
            &s[r.clone()]
                .iter()
                .map(|x| x.text.as_str())
                .collect::<Vec<_>>()
                .join(" "),
        )
    };
    for c in couples {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.6}\t{}\t{}",
            c.pattern,
            span(&c.source),
            span(&c.target),
            c.score,
            text(a, &c.source),
            text(b, &c.target)
        );
    }
    out
}

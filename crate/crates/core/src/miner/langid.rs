//! Character n-gram language identification with add-delta smoothing.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};

const DELTA: f64 = 0.5;

/// Texts shorter than this many characters get a low-confidence flag.
pub const MIN_RELIABLE_CHARS: usize = 50;

/// Conditional character model P(c | previous n-1 characters).
///
/// Characters outside the training alphabet share one unknown symbol, so
/// each context distributes its mass over `alphabet_size + 1` outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageIdModel {
    pub language: String,
    pub ngram_order: usize,
    alphabet: BTreeSet<char>,
    alphabet_size: usize,
    /// Probabilities of the n-grams seen in training.
    table: HashMap<String, f64>,
    /// Per context, the probability of each outcome not in `table`.
    unseen: HashMap<String, f64>,
}

/// Lowercases, maps every non-letter to a space and collapses spaces.
/// The result is padded so the first letter has a full context.
fn prepare(text: &str, order: usize) -> Vec<char> {
    let mut out: Vec<char> = std::iter::repeat_n(' ', order.saturating_sub(1)).collect();
    for c in text.chars().flat_map(char::to_lowercase) {
        let c = if c.is_alphabetic() { c } else { ' ' };
        if c == ' ' && out.last() == Some(&' ') {
            continue;
        }
        out.push(c);
    }
    if out.last() != Some(&' ') {
        out.push(' ');
    }
    out
}

impl LanguageIdModel {
    /// Estimates a model from sample texts.
    pub fn train<S: AsRef<str>>(language: &str, samples: &[S], order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config("n-gram order must be at least 1".into()));
        }
        if samples.iter().all(|s| s.as_ref().trim().is_empty()) {
            return Err(Error::Training(format!("no training text for language {language}")));
        }
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut alphabet = BTreeSet::new();
        for s in samples {
            let chars = prepare(s.as_ref(), order);
            alphabet.extend(chars.iter().copied());
            for w in chars.windows(order) {
                *counts.entry(w.iter().collect()).or_insert(0) += 1;
            }
        }
        let v = alphabet.len() as f64;
        let mut ctx_total: HashMap<String, (usize, usize)> = HashMap::new();
        for (g, &c) in &counts {
            let e = ctx_total.entry(context_of(g)).or_insert((0, 0));
            e.0 += c;
            e.1 += 1;
        }
        let denom = |ctx: &str| ctx_total[ctx].0 as f64 + DELTA * (v + 1.0);
        let table = counts
            .iter()
            .map(|(g, &c)| (g.clone(), (c as f64 + DELTA) / denom(&context_of(g))))
            .collect();
        let unseen = ctx_total.keys().map(|ctx| (ctx.clone(), DELTA / denom(ctx))).collect();
        Ok(LanguageIdModel {
            language: language.to_owned(),
            ngram_order: order,
            alphabet_size: alphabet.len(),
            alphabet,
            table,
            unseen,
        })
    }

    /// Model trained on the bundled sample text for `language`, if any.
    pub fn bundled(language: &str) -> Option<Self> {
        let text = match language {
            "en" => include_str!("../../data/langid/en.txt"),
            "fr" => include_str!("../../data/langid/fr.txt"),
            "it" => include_str!("../../data/langid/it.txt"),
            _ => return None,
        };
        Self::train(language, &[text], 3).ok()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// P(last char of `ngram` | preceding chars).
    pub fn prob(&self, ngram: &str) -> f64 {
        let ngram: String = ngram
            .chars()
            .map(|c| if self.alphabet.contains(&c) { c } else { '\u{fffd}' })
            .collect();
        if let Some(&p) = self.table.get(&ngram) {
            return p;
        }
        let uniform = 1.0 / (self.alphabet_size as f64 + 1.0);
        self.unseen.get(&context_of(&ngram)).copied().unwrap_or(uniform)
    }

    /// Natural-log likelihood of a text.
    pub fn log_likelihood(&self, text: &str) -> f64 {
        let chars = prepare(text, self.ngram_order);
        chars
            .windows(self.ngram_order)
            .map(|w| self.prob(&w.iter().collect::<String>()).ln())
            .sum()
    }

    /// Sum of P(c | context) over the alphabet and the unknown symbol.
    pub fn context_mass(&self, context: &str) -> f64 {
        let mut total = 0.0;
        for &c in self.alphabet.iter().chain(std::iter::once(&'\u{fffd}')) {
            total += self.prob(&format!("{context}{c}"));
        }
        total
    }

    /// Seen contexts, sorted.
    pub fn contexts(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.unseen.keys().map(String::as_str).collect();
        v.sort_unstable();
        v
    }

    /// `ngram<TAB>probability` lines after a small header. Probability not
    /// listed for a context is shared equally by its unseen outcomes.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#language={}", self.language);
        let _ = writeln!(out, "#order={}", self.ngram_order);
        let alphabet: String = self.alphabet.iter().collect();
        let _ = writeln!(out, "#alphabet={}", alphabet.replace('\\', "\\\\").replace('\n', "\\n"));
        let mut rows: Vec<(&String, &f64)> = self.table.iter().collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        for (g, p) in rows {
            let _ = writeln!(out, "{g}\t{p:e}");
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut language = None;
        let mut order = None;
        let mut alphabet = None;
        let mut table = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            if let Some(h) = line.strip_prefix('#') {
                match h.split_once('=') {
                    Some(("language", v)) => language = Some(v.to_owned()),
                    Some(("order", v)) => {
                        order = Some(
                            v.parse::<usize>()
                                .map_err(|_| Error::parse("langid", n + 1, "bad order"))?,
                        )
                    }
                    Some(("alphabet", v)) => {
                        alphabet = Some(
                            v.replace("\\n", "\n")
                                .replace("\\\\", "\\")
                                .chars()
                                .collect::<BTreeSet<char>>(),
                        )
                    }
                    _ => {}
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (g, p) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::parse("langid", n + 1, "expected ngram<TAB>probability"))?;
            let p: f64 = p
                .parse()
                .map_err(|_| Error::parse("langid", n + 1, "bad probability"))?;
            table.insert(g.to_owned(), p);
        }
        let (Some(language), Some(order), Some(alphabet)) = (language, order, alphabet) else {
            return Err(Error::parse(
                "langid",
                0,
                "missing #language, #order or #alphabet header",
            ));
        };
        let outcomes = alphabet.len() as f64 + 1.0;
        let mut per_ctx: HashMap<String, (f64, usize)> = HashMap::new();
        for (g, p) in &table {
            if g.chars().count() != order {
                return Err(Error::parse(
                    "langid",
                    0,
                    format!("n-gram {g:?} does not have order {order}"),
                ));
            }
            let e = per_ctx.entry(context_of(g)).or_insert((0.0, 0));
            e.0 += p;
            e.1 += 1;
        }
        let unseen = per_ctx
            .into_iter()
            .map(|(ctx, (mass, seen))| {
                let rest = outcomes - seen as f64;
                (ctx, if rest > 0.0 { (1.0 - mass).max(0.0) / rest } else { 0.0 })
            })
            .collect();
        Ok(LanguageIdModel {
            language,
            ngram_order: order,
            alphabet_size: alphabet.len(),
            alphabet,
            table,
            unseen,
        })
    }
}

fn context_of(ngram: &str) -> String {
    let mut chars: Vec<char> = ngram.chars().collect();
    chars.pop();
    chars.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub language: String,
    /// Posterior probability of `language` under uniform priors.
    pub confidence: f64,
    pub low_confidence: bool,
    /// Log-likelihood per model, in model order.
    pub log_likelihoods: Vec<(String, f64)>,
}

/// Picks the most likely language. Ties go to the model listed first.
pub fn detect_language(text: &str, models: &[LanguageIdModel]) -> Result<Detection> {
    if models.is_empty() {
        return Err(Error::Config("language identification needs at least one model".into()));
    }
    if text.trim().is_empty() {
        return Err(Error::Config("cannot identify the language of empty text".into()));
    }
    let lls: Vec<(String, f64)> = models
        .iter()
        .map(|m| (m.language.clone(), m.log_likelihood(text)))
        .collect();
    let mut best = 0;
    for (i, (_, ll)) in lls.iter().enumerate() {
        if *ll > lls[best].1 {
            best = i;
        }
    }
    let max = lls[best].1;
    let z: f64 = lls.iter().map(|(_, ll)| (ll - max).exp()).sum();
    Ok(Detection {
        language: lls[best].0.clone(),
        confidence: 1.0 / z,
        low_confidence: text.chars().count() < MIN_RELIABLE_CHARS,
        log_likelihoods: lls,
    })
}

use std::collections::BTreeMap;
use std::str::FromStr;

use super::{QueryModel, Translation, TranslationModel};
use crate::error::Error;

/// Treatment of query terms the translation model has no entry for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OovPolicy {
    /// Keep the untranslated surface form with its full query mass.
    #[default]
    PassThrough,
    /// Drop the term and renormalize what remains.
    Drop,
}

impl FromStr for OovPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pass-through" | "passthrough" | "keep" => Ok(OovPolicy::PassThrough),
            "drop" => Ok(OovPolicy::Drop),
            other => Err(Error::Config(format!("unknown OOV policy {other:?}"))),
        }
    }
}

/// Maps a source-language query model onto the target vocabulary:
/// P(t|Q) = sum_s P(t|s) P(s|Q).
pub fn project_query(query: &QueryModel, model: &TranslationModel, oov: OovPolicy) -> QueryModel {
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    let mut dropped = false;
    for (s, &ps) in query.distribution() {
        let row = model.translations(s);
        if row.is_empty() {
            match oov {
                OovPolicy::PassThrough => *out.entry(s.clone()).or_insert(0.0) += ps,
                OovPolicy::Drop => dropped = true,
            }
            continue;
        }
        for t in row {
            *out.entry(t.target.clone()).or_insert(0.0) += t.prob * ps;
        }
    }
    if dropped {
        let total: f64 = out.values().sum();
        if total > 0.0 {
            out.values_mut().for_each(|p| *p /= total);
        }
    }
    QueryModel::from_distribution(&model.direction.target, out)
}

/// Derived translation models used by the baseline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Only the most probable translation, with probability one (QT-BM).
    BestMatch,
    /// Uniform probabilities over the retained translations (QT-EQ).
    Equal,
    /// Unit weight for every retained translation, unnormalized (SYN).
    Synonym,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bm" | "best" | "qt-bm" => Ok(Variant::BestMatch),
            "eq" | "equal" | "qt-eq" => Ok(Variant::Equal),
            "syn" | "synonym" => Ok(Variant::Synonym),
            other => Err(Error::Config(format!("unknown model variant {other:?}"))),
        }
    }
}

pub fn derive_variant(model: &TranslationModel, variant: Variant) -> TranslationModel {
    model.map_rows(|row| match variant {
        Variant::BestMatch => {
            // rows are sorted by descending probability, ties by target
            vec![Translation {
                target: row[0].target.clone(),
                prob: 1.0,
            }]
        }
        Variant::Equal => {
            let k = row.len() as f64;
            row.iter()
                .map(|t| Translation {
                    target: t.target.clone(),
                    prob: 1.0 / k,
                })
                .collect()
        }
        Variant::Synonym => row
            .iter()
            .map(|t| Translation {
                target: t.target.clone(),
                prob: 1.0,
            })
            .collect(),
    })
}

use std::collections::HashSet;

use super::{ExpectedCounts, TranslationModel};

/// Drops entries with P(t|s) < `threshold` and renormalizes each row.
/// Rows left empty disappear (their source becomes out-of-vocabulary).
pub fn prune_threshold(model: &TranslationModel, threshold: f64) -> TranslationModel {
    model.filter_renormalized(|_, t| t.prob >= threshold)
}

/// Keeps the `n` globally most reliable entries, scoring each entry by its
/// final expected count.
pub fn prune_topn(model: &TranslationModel, n: usize, counts: &ExpectedCounts) -> TranslationModel {
    prune_topn_by(model, n, |s, t, _| counts.get(s, t))
}

/// Keeps the `n` entries with the highest `score(source, target, prob)`.
/// Ties are broken by source term, then target term.
pub fn prune_topn_by(model: &TranslationModel, n: usize, score: impl Fn(&str, &str, f64) -> f64) -> TranslationModel {
    let mut scored: Vec<(f64, &str, &str)> = model.entries().map(|(s, t, p)| (score(s, t, p), s, t)).collect();
    scored.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| a.1.cmp(b.1))
            .then_with(|| a.2.cmp(b.2))
    });
    let keep: HashSet<(String, String)> = scored
        .into_iter()
        .take(n)
        .map(|(_, s, t)| (s.to_owned(), t.to_owned()))
        .collect();
    model.filter_renormalized(|s, t| keep.contains(&(s.to_owned(), t.target.clone())))
}

/// Removes noisy entries: those whose source or target contains a decimal
/// digit (when `digit_rule` is set) and those whose source word has a
/// training marginal below `marginal_floor`. Sources without a recorded
/// marginal are kept.
pub fn prune_noise(model: &TranslationModel, marginal_floor: f64, digit_rule: bool) -> TranslationModel {
    let has_digit = |w: &str| w.chars().any(|c| c.is_ascii_digit());
    model.filter_renormalized(|s, t| {
        if digit_rule && (has_digit(s) || has_digit(&t.target)) {
            return false;
        }
        model.source_marginal(s).is_none_or(|m| m >= marginal_floor)
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::tm::Direction;

    fn dir() -> Direction {
        Direction::new("en", "fr")
    }

    fn assert_same(a: &TranslationModel, b: &TranslationModel) {
        let ea: Vec<_> = a.entries().collect();
        let eb: Vec<_> = b.entries().collect();
        assert_eq!(ea.len(), eb.len());
        for ((s1, t1, p1), (s2, t2, p2)) in ea.into_iter().zip(eb) {
            assert_eq!((s1, t1), (s2, t2));
            assert!((p1 - p2).abs() < 1e-12);
        }
    }

    #[test]
    fn threshold_keeps_table5_row() {
        let m = TranslationModel::from_entries(dir(), [("drug", "drogue", 0.55), ("drug", "médicament", 0.45)]);
        assert_same(&prune_threshold(&m, 0.1), &m);
    }

    #[test]
    fn threshold_renormalizes() {
        let m = TranslationModel::from_entries(
            dir(),
            [("s", "x", 0.5), ("s", "y", 0.35), ("s", "z", 0.08), ("s", "w", 0.07)],
        );
        let p = prune_threshold(&m, 0.1);
        assert_eq!(p.translations("s").len(), 2);
        assert!((p.prob("s", "x") - 0.5 / 0.85).abs() < 1e-12);
        assert!((p.prob("s", "y") - 0.35 / 0.85).abs() < 1e-12);
        assert!((p.prob("s", "x") - 0.588).abs() < 1e-3);
    }

    #[test]
    fn threshold_edge_cases() {
        let m = TranslationModel::from_entries(dir(), [("s", "x", 1.0)]);
        assert_same(&prune_threshold(&m, 0.99), &m);
        let m = TranslationModel::from_entries(
            dir(),
            [("s", "x", 0.5), ("s", "y", 0.5), ("r", "x", 0.05), ("r", "y", 0.95)],
        );
        assert_same(&prune_threshold(&m, 0.0), &m);
        let p = prune_threshold(&m, 0.6);
        assert!(!p.contains_source("s"));
        assert_eq!(p.prob("r", "y"), 1.0);
    }

    #[test]
    fn topn_by_expected_counts() {
        let m = TranslationModel::from_entries(
            dir(),
            [("a", "x", 10.0 / 11.0), ("a", "y", 1.0 / 11.0), ("b", "z", 1.0)],
        );
        let counts: ExpectedCounts = [("a", "x", 10.0), ("a", "y", 1.0), ("b", "z", 5.0)]
            .into_iter()
            .collect();
        let p = prune_topn(&m, 2, &counts);
        assert_eq!(p.num_entries(), 2);
        assert_eq!(p.prob("a", "x"), 1.0);
        assert_eq!(p.prob("b", "z"), 1.0);
        assert_same(&prune_topn(&m, 3, &counts), &m);
        assert_same(&prune_topn(&m, 1000, &counts), &m);
    }

    #[test]
    fn topn_ties_are_ordered() {
        let m = TranslationModel::from_entries(dir(), [("b", "x", 1.0), ("a", "y", 1.0), ("a", "x", 1.0)]);
        let p = prune_topn_by(&m, 2, |_, _, _| 1.0);
        let kept: Vec<_> = p.entries().map(|(s, t, _)| (s, t)).collect();
        assert_eq!(kept, vec![("a", "x"), ("a", "y")]);
    }

    #[test]
    fn noise_rules() {
        let m = TranslationModel::from_entries(
            dir(),
            [("xç64", "drug", 0.9), ("xç64", "drogue", 0.1), ("drug", "drogue", 1.0)],
        );
        let p = prune_noise(&m, 0.0, true);
        assert!(!p.contains_source("xç64"));
        assert_same(&prune_noise(&m, 0.0, false), &m);

        let mut m =
            TranslationModel::from_entries(dir(), [("rare", "x", 0.5), ("rare", "y", 0.5), ("common", "z", 1.0)]);
        m.set_marginals(BTreeMap::from([("rare".to_owned(), 1e-8), ("common".to_owned(), 0.2)]));
        let p = prune_noise(&m, 1e-6, true);
        assert!(!p.contains_source("rare"));
        assert!(p.contains_source("common"));
        assert_same(&prune_noise(&m, 1e-9, true), &m);
    }

    #[test]
    fn digit_in_target_removes_entry_only() {
        let m = TranslationModel::from_entries(dir(), [("s", "x1", 0.5), ("s", "y", 0.5)]);
        let p = prune_noise(&m, 0.0, true);
        assert_eq!(p.prob("s", "y"), 1.0);
        assert!(p.max_row_deviation() < 1e-12);
    }
}

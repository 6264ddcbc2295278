//! Rank-based significance tests over a topics x runs matrix of AP values.

use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, FisherSnedecor, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Friedman {
    /// Tie-corrected chi-square statistic.
    pub chi_square: f64,
    /// Iman-Davenport statistic, F distributed with (k-1, (k-1)(n-1)) df.
    pub statistic: f64,
    pub p_value: f64,
    /// Per-run sums of within-topic ranks; rank k goes to the best run.
    pub rank_sums: Vec<f64>,
    /// Sum of squared ranks, A1 in Conover's notation.
    pub sum_sq_ranks: f64,
    pub topics: usize,
    pub runs: usize,
}

/// Average ranks (1-based) of the values in a row.
fn rank_row(row: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..row.len()).collect();
    idx.sort_by(|&a, &b| row[a].total_cmp(&row[b]));
    let mut ranks = vec![0.0; row.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && row[idx[j + 1]] == row[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn check_matrix(matrix: &[Vec<f64>]) -> Result<(usize, usize)> {
    let n = matrix.len();
    let k = matrix.first().map_or(0, Vec::len);
    if n < 2 || k < 2 {
        return Err(Error::Eval(format!("need at least 2 topics and 2 runs, got {n}x{k}")));
    }
    if matrix.iter().any(|r| r.len() != k) {
        return Err(Error::Eval("ragged AP matrix".into()));
    }
    if matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Eval("non-finite value in AP matrix".into()));
    }
    Ok((n, k))
}

/// Friedman test on a matrix with one row per topic and one column per run.
pub fn friedman(matrix: &[Vec<f64>]) -> Result<Friedman> {
    let (n, k) = check_matrix(matrix)?;
    let (nf, kf) = (n as f64, k as f64);
    let mut rank_sums = vec![0.0; k];
    let mut a1 = 0.0;
    for row in matrix {
        for (j, r) in rank_row(row).into_iter().enumerate() {
            rank_sums[j] += r;
            a1 += r * r;
        }
    }
    let c1 = nf * kf * (kf + 1.0).powi(2) / 4.0;
    let sum_sq: f64 = rank_sums.iter().map(|r| r * r).sum();
    let mut out = Friedman {
        chi_square: 0.0,
        statistic: 0.0,
        p_value: 1.0,
        rank_sums,
        sum_sq_ranks: a1,
        topics: n,
        runs: k,
    };
    if a1 - c1 <= 1e-12 * c1 {
        // every row fully tied
        return Ok(out);
    }
    let t1 = ((kf - 1.0) * (sum_sq - nf * c1) / (a1 - c1)).max(0.0);
    out.chi_square = t1;
    let denom = nf * (kf - 1.0) - t1;
    if denom <= 1e-12 {
        out.statistic = f64::INFINITY;
        out.p_value = 0.0;
        return Ok(out);
    }
    out.statistic = (nf - 1.0) * t1 / denom;
    let f = FisherSnedecor::new(kf - 1.0, (kf - 1.0) * (nf - 1.0)).map_err(|e| Error::Eval(e.to_string()))?;
    out.p_value = f.sf(out.statistic).clamp(0.0, 1.0);
    Ok(out)
}

/// Outcome of Fisher's LSD over Friedman rank sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Lsd {
    /// Critical difference between two rank sums.
    pub critical: f64,
    /// Equivalence-class letters per run, in input order.
    pub letters: Vec<String>,
    /// Run indices from best to worst mean rank.
    pub order: Vec<usize>,
    /// False when the Friedman test did not reject, so all runs share one class.
    pub gated: bool,
}

/// Fisher's least significant difference on rank sums (Conover):
/// |R_i - R_j| > t(1-alpha/2, (n-1)(k-1)) sqrt(2 (n A1 - sum R_j^2) / ((n-1)(k-1))).
/// Letters are assigned from the best run down; runs sharing a letter do
/// not differ significantly.
pub fn fisher_lsd(matrix: &[Vec<f64>], alpha: f64) -> Result<Lsd> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Eval(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let fr = friedman(matrix)?;
    let (n, k) = (fr.topics as f64, fr.runs as f64);
    let mut order: Vec<usize> = (0..fr.runs).collect();
    order.sort_by(|&a, &b| fr.rank_sums[b].total_cmp(&fr.rank_sums[a]));
    let df = (n - 1.0) * (k - 1.0);
    let sum_sq: f64 = fr.rank_sums.iter().map(|r| r * r).sum();
    let spread = (2.0 * (n * fr.sum_sq_ranks - sum_sq) / df).max(0.0).sqrt();
    let t = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Eval(e.to_string()))?;
    let critical = t.inverse_cdf(1.0 - alpha / 2.0) * spread;

    if fr.p_value > alpha {
        return Ok(Lsd {
            critical,
            letters: vec!["a".to_owned(); fr.runs],
            order,
            gated: false,
        });
    }
    let same = |a: usize, b: usize| (fr.rank_sums[a] - fr.rank_sums[b]).abs() <= critical;
    let mut letters = vec![String::new(); fr.runs];
    let mut last_end = None;
    let mut next = b'a';
    for start in 0..order.len() {
        let mut end = start;
        while end + 1 < order.len() && same(order[start], order[end + 1]) {
            end += 1;
        }
        if last_end.is_some_and(|e| end <= e) {
            continue;
        }
        let letter = if next <= b'z' {
            (next as char).to_string()
        } else {
            format!("<{}>", next - b'a')
        };
        next = next.saturating_add(1);
        for &run in &order[start..=end] {
            letters[run].push_str(&letter);
        }
        last_end = Some(end);
    }
    Ok(Lsd {
        critical,
        letters,
        order,
        gated: true,
    })
}

/// Two-sided exact sign test on paired per-topic values; ties are dropped.
pub fn sign_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Eval(format!(
            "unpaired inputs: {} vs {} topics",
            a.len(),
            b.len()
        )));
    }
    let wins = a.iter().zip(b).filter(|(x, y)| x > y).count() as u64;
    let losses = a.iter().zip(b).filter(|(x, y)| x < y).count() as u64;
    let n = wins + losses;
    if n == 0 {
        return Ok(1.0);
    }
    let binom = Binomial::new(0.5, n).map_err(|e| Error::Eval(e.to_string()))?;
    Ok((2.0 * binom.cdf(wins.min(losses))).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn textbook() -> Vec<Vec<f64>> {
        vec![
            vec![0.30, 0.25, 0.10],
            vec![0.45, 0.40, 0.20],
            vec![0.20, 0.25, 0.15],
            vec![0.60, 0.50, 0.50],
        ]
    }

    #[test]
    fn average_ranks() {
        assert_eq!(rank_row(&[0.6, 0.5, 0.5]), vec![3.0, 1.5, 1.5]);
        assert_eq!(rank_row(&[1.0, 1.0, 1.0, 1.0]), vec![2.5; 4]);
    }

    #[test]
    fn matches_statistical_package() {
        // scipy.stats.friedmanchisquare and f.sf on the same matrix
        let f = friedman(&textbook()).unwrap();
        assert!((f.chi_square - 5.733333333333333).abs() < 1e-9);
        assert!((f.statistic - 7.588235294117647).abs() < 1e-9);
        assert!((f.p_value - 0.022745370370370367).abs() < 1e-6);
    }

    #[test]
    fn identical_runs_are_degenerate() {
        let m = vec![vec![0.3, 0.3, 0.3], vec![0.1, 0.1, 0.1]];
        let f = friedman(&m).unwrap();
        assert_eq!((f.statistic, f.p_value), (0.0, 1.0));
        assert!(friedman(&[vec![0.1, 0.2]]).is_err());
        assert!(friedman(&[vec![0.1], vec![0.2]]).is_err());
    }

    fn separated() -> Vec<Vec<f64>> {
        (0..10)
            .map(|i| {
                let i = i as f64;
                let b = 0.3 + 0.01 * i;
                let c = if i as usize % 2 == 1 { b + 0.02 } else { b - 0.02 };
                vec![0.8 + 0.01 * i, b, c]
            })
            .collect()
    }

    #[test]
    fn lsd_separates_dominant_run() {
        let lsd = fisher_lsd(&separated(), 0.05).unwrap();
        // scipy.stats.t.ppf(0.975, 18) * sqrt(2 (n A1 - sum R^2) / 18)
        assert!((lsd.critical - 4.951920737995532).abs() < 1e-6);
        assert!(lsd.gated);
        assert_eq!(lsd.letters, vec!["a", "b", "b"]);
        assert_eq!(lsd.order[0], 0);
    }

    #[test]
    fn lsd_gate_returns_one_class() {
        let m = vec![vec![0.3, 0.2], vec![0.2, 0.3], vec![0.5, 0.4], vec![0.1, 0.2]];
        let lsd = fisher_lsd(&m, 0.05).unwrap();
        assert!(!lsd.gated);
        assert_eq!(lsd.letters, vec!["a", "a"]);
    }

    #[test]
    fn lsd_overlapping_classes() {
        // rank sums 22, 16, 10 against a critical difference of 6.066
        let mut rows = vec![vec![0.3, 0.1, 0.2], vec![0.1, 0.3, 0.2]];
        rows.extend(std::iter::repeat_n(vec![0.3, 0.2, 0.1], 6));
        let lsd = fisher_lsd(&rows, 0.05).unwrap();
        assert!((lsd.critical - 6.066372844898779).abs() < 1e-6);
        assert_eq!(lsd.letters, vec!["a", "ab", "b"]);
    }

    #[test]
    fn sign_test_values() {
        // scipy.stats.binomtest two-sided p-values
        let ones = vec![1.0; 10];
        let zeros = vec![0.0; 10];
        assert!((sign_test(&ones, &zeros).unwrap() - 0.001953125).abs() < 1e-12);
        assert_eq!(sign_test(&ones, &ones).unwrap(), 1.0);
        let a: Vec<f64> = (0..10).map(|i| if i < 5 { 1.0 } else { 0.0 }).collect();
        let b: Vec<f64> = a.iter().map(|x| 1.0 - x).collect();
        assert!((sign_test(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let a: Vec<f64> = (0..10).map(|i| if i < 7 { 1.0 } else { 0.0 }).collect();
        assert!((sign_test(&a, &[0.5; 10]).unwrap() - 0.34375).abs() < 1e-12);
        assert!(sign_test(&[1.0], &[]).is_err());
    }

    proptest! {
        #[test]
        fn column_permutation_keeps_statistic(rows in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 4), 3..10)) {
            let f = friedman(&rows).unwrap();
            let perm: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[2], r[0], r[3], r[1]]).collect();
            let g = friedman(&perm).unwrap();
            prop_assert!((f.statistic - g.statistic).abs() < 1e-9 || (f.statistic.is_infinite() && g.statistic.is_infinite()));
            prop_assert!((f.p_value - g.p_value).abs() < 1e-12);
        }

        #[test]
        fn monotone_row_transform_is_invisible(rows in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 3), 3..10),
                                              which in 0usize..3) {
            let mut t = rows.clone();
            let which = which % t.len();
            for v in &mut t[which] {
                *v = v.sqrt() * 10.0 + 1.0;
            }
            let (a, b) = (fisher_lsd(&rows, 0.05).unwrap(), fisher_lsd(&t, 0.05).unwrap());
            prop_assert_eq!(a.letters, b.letters);
            let (fa, fb) = (friedman(&rows).unwrap(), friedman(&t).unwrap());
            prop_assert!((fa.p_value - fb.p_value).abs() < 1e-12);
        }
    }
}

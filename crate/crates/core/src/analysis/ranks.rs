//! Nonparametric tests over average ranks.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankTest {
    Friedman,
    WilcoxonSignedRank,
    KruskalWallis,
    KsNormality,
}

/// Test-specific extras.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RankDetails {
    Friedman {
        avg_ranks: Vec<f64>,
    },
    Wilcoxon {
        w_plus: f64,
        w_minus: f64,
        /// Nonzero differences.
        n: usize,
        positive_count: usize,
        mean_positive_rank: f64,
    },
    KruskalWallis {
        mean_ranks: Vec<f64>,
    },
    KsNormality {
        mean: f64,
        sd: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTestResult {
    pub test: RankTest,
    pub statistic: f64,
    pub details: RankDetails,
    pub p_value: Option<f64>,
}

/// Ascending ranks starting at 1, ties sharing their average rank. Also
/// returns the tie term Σ(t³ − t) over tie groups.
pub fn average_ranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

fn chi2_upper(stat: f64, dof: f64) -> Option<f64> {
    ChiSquared::new(dof)
        .ok()
        .map(|d| (1.0 - d.cdf(stat.max(0.0))).clamp(0.0, 1.0))
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// Friedman test over a subjects × treatments matrix (lower values rank first).
pub fn friedman_ranks(matrix: &[Vec<f64>]) -> Result<RankTestResult> {
    let n = matrix.len();
    let k = matrix.first().map_or(0, Vec::len);
    if n == 0 || k < 2 {
        return Err(Error::Degenerate(format!(
            "Friedman test needs at least 2 treatments and 1 subject, got {n}x{k}"
        )));
    }
    if matrix.iter().any(|row| row.len() != k) {
        return Err(Error::Validation("Friedman matrix rows differ in length".into()));
    }
    let mut sums = vec![0.0; k];
    let mut ties = 0.0;
    for row in matrix {
        let (r, t) = average_ranks(row);
        ties += t;
        for (s, v) in sums.iter_mut().zip(r) {
            *s += v;
        }
    }
    let (nf, kf) = (n as f64, k as f64);
    let avg_ranks: Vec<f64> = sums.iter().map(|s| s / nf).collect();
    let centre = (kf + 1.0) / 2.0;
    let ss: f64 = avg_ranks.iter().map(|r| (r - centre).powi(2)).sum();
    let correction = 1.0 - ties / (nf * (kf * kf * kf - kf));
    let statistic = if correction > 1e-12 {
        12.0 * nf / (kf * (kf + 1.0)) * ss / correction
    } else {
        0.0
    };
    Ok(RankTestResult {
        test: RankTest::Friedman,
        statistic,
        details: RankDetails::Friedman { avg_ranks },
        p_value: chi2_upper(statistic, kf - 1.0),
    })
}

/// Wilcoxon signed-rank test on the paired differences `a − b`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<RankTestResult> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Validation(format!(
            "paired samples must have equal nonzero length, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(Error::Degenerate("no nonzero pairs".into()));
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = average_ranks(&abs);
    let mut w_plus = 0.0;
    let mut positive_count = 0;
    for (d, r) in diffs.iter().zip(&ranks) {
        if *d > 0.0 {
            w_plus += r;
            positive_count += 1;
        }
    }
    let n = diffs.len();
    let nf = n as f64;
    let w_minus = nf * (nf + 1.0) / 2.0 - w_plus;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
    let p_value = (var > 0.0).then(|| {
        let z = (w_plus - mean) / var.sqrt();
        (2.0 * (1.0 - std_normal().cdf(z.abs()))).clamp(0.0, 1.0)
    });
    Ok(RankTestResult {
        test: RankTest::WilcoxonSignedRank,
        statistic: w_plus,
        details: RankDetails::Wilcoxon {
            w_plus,
            w_minus,
            n,
            positive_count,
            mean_positive_rank: if positive_count > 0 {
                w_plus / positive_count as f64
            } else {
                0.0
            },
        },
        p_value,
    })
}

/// Kruskal-Wallis H test with tie correction.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<RankTestResult> {
    if groups.len() < 2 || groups.iter().any(Vec::is_empty) {
        return Err(Error::Validation(
            "Kruskal-Wallis needs at least 2 non-empty groups".into(),
        ));
    }
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let (ranks, ties) = average_ranks(&pooled);
    let nf = pooled.len() as f64;
    let correction = 1.0 - ties / (nf * nf * nf - nf);
    if correction <= 1e-12 {
        return Err(Error::Degenerate("all observations are identical".into()));
    }
    let mut mean_ranks = Vec::with_capacity(groups.len());
    let mut sum = 0.0;
    let mut offset = 0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        offset += g.len();
        sum += r * r / g.len() as f64;
        mean_ranks.push(r / g.len() as f64);
    }
    let h = (12.0 / (nf * (nf + 1.0)) * sum - 3.0 * (nf + 1.0)) / correction;
    Ok(RankTestResult {
        test: RankTest::KruskalWallis,
        statistic: h,
        details: RankDetails::KruskalWallis { mean_ranks },
        p_value: chi2_upper(h, groups.len() as f64 - 1.0),
    })
}

/// Kolmogorov-Smirnov distance between the sample and a normal fitted to it.
pub fn ks_normality(sample: &[f64]) -> Result<RankTestResult> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::Validation(format!(
            "normality check needs at least 2 values, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = sample.iter().sum::<f64>() / nf;
    let sd = (sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    if !(sd > 0.0) {
        return Err(Error::Degenerate("sample is constant".into()));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let phi = std_normal();
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = phi.cdf((x - mean) / sd);
            (f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        })
        .fold(0.0, f64::max);
    Ok(RankTestResult {
        test: RankTest::KsNormality,
        statistic: d,
        details: RankDetails::KsNormality { mean, sd },
        p_value: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ranks_with_ties() {
        let (r, t) = average_ranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(t, 6.0);
    }

    #[test]
    fn friedman_cases() {
        let r = friedman_ranks(&[vec![1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0]]).unwrap();
        assert_eq!(
            r.details,
            RankDetails::Friedman {
                avg_ranks: vec![2.0, 2.0, 2.0]
            }
        );
        assert_abs_diff_eq!(r.statistic, 0.0);
        let r = friedman_ranks(&[vec![5.0, 5.0, 5.0], vec![1.0, 1.0, 1.0]]).unwrap();
        assert_eq!(
            r.details,
            RankDetails::Friedman {
                avg_ranks: vec![2.0, 2.0, 2.0]
            }
        );
        let r = friedman_ranks(&[vec![0.1, 2.0, 3.0], vec![0.0, 9.0, 1.0]]).unwrap();
        let RankDetails::Friedman { avg_ranks } = r.details else {
            unreachable!()
        };
        assert_eq!(avg_ranks[0], 1.0);
        assert!(friedman_ranks(&[vec![1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn wilcoxon_cases() {
        let r = wilcoxon_signed_rank(&[1.0, -2.0, 3.0], &[0.0, 0.0, 0.0]).unwrap();
        let RankDetails::Wilcoxon {
            w_plus,
            w_minus,
            positive_count,
            ..
        } = r.details
        else {
            unreachable!()
        };
        assert_eq!((w_plus, w_minus, positive_count), (4.0, 2.0, 2));
        let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.0; 5]).unwrap();
        assert_eq!(r.statistic, 15.0);
        assert!(matches!(
            wilcoxon_signed_rank(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn kruskal_cases() {
        assert_abs_diff_eq!(
            kruskal_wallis(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap().statistic,
            2.4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            kruskal_wallis(&[vec![1.0, 3.0], vec![2.0, 4.0]]).unwrap().statistic,
            0.6,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            kruskal_wallis(&[vec![1.0, 4.0], vec![2.0, 3.0]]).unwrap().statistic,
            0.0,
            epsilon = 1e-12
        );
        assert!(kruskal_wallis(&[vec![1.0, 1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn ks_cases() {
        assert_abs_diff_eq!(ks_normality(&[-1.0, 1.0]).unwrap().statistic, 0.26025, epsilon = 1e-5);
        assert!(ks_normality(&[2.0, 2.0]).is_err());
        // Exact quantiles of the fitted normal stay within 1/(2n).
        let n = 50;
        let phi = std_normal();
        let q: Vec<f64> = (1..=n)
            .map(|i| phi.inverse_cdf((2 * i - 1) as f64 / (2 * n) as f64))
            .collect();
        assert!(ks_normality(&q).unwrap().statistic < 1.0 / (2.0 * n as f64) + 0.01);
    }

    proptest! {
        #[test]
        fn friedman_rank_sum(rows in prop::collection::vec(prop::collection::vec(0u8..5, 4), 1..10)) {
            let m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect();
            let r = friedman_ranks(&m).unwrap();
            let RankDetails::Friedman { avg_ranks } = r.details else { unreachable!() };
            prop_assert!((avg_ranks.iter().sum::<f64>() - 10.0).abs() < 1e-9);
        }

        #[test]
        fn wilcoxon_total(d in prop::collection::vec(-5i8..5, 1..30)) {
            prop_assume!(d.iter().any(|&x| x != 0));
            let a: Vec<f64> = d.iter().map(|&x| f64::from(x)).collect();
            let r = wilcoxon_signed_rank(&a, &vec![0.0; a.len()]).unwrap();
            let RankDetails::Wilcoxon { w_plus, w_minus, n, .. } = r.details else { unreachable!() };
            prop_assert!((w_plus + w_minus - (n * (n + 1)) as f64 / 2.0).abs() < 1e-9);
        }

        #[test]
        fn kruskal_monotone_invariant(g1 in prop::collection::vec(-50.0f64..50.0, 1..8), g2 in prop::collection::vec(-50.0f64..50.0, 1..8)) {
            let Ok(a) = kruskal_wallis(&[g1.clone(), g2.clone()]) else { return Ok(()) };
            let f = |v: &Vec<f64>| v.iter().map(|x| x.powi(3) + 2.0 * x).collect::<Vec<_>>();
            let b = kruskal_wallis(&[f(&g1), f(&g2)]).unwrap();
            prop_assert!((a.statistic - b.statistic).abs() < 1e-9);
        }

        #[test]
        fn ks_affine_invariant(s in prop::collection::vec(-10.0f64..10.0, 3..20), scale in 0.1f64..10.0, shift in -100.0f64..100.0) {
            let Ok(a) = ks_normality(&s) else { return Ok(()) };
            let t: Vec<f64> = s.iter().map(|x| x * scale + shift).collect();
            let b = ks_normality(&t).unwrap();
            prop_assert!((a.statistic - b.statistic).abs() < 1e-6);
        }
    }
}

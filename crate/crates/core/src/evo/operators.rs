//! Variation and selection operators over gene vectors.

use crate::error::{Error, Result};
use crate::olsr::{gene, ParamSpace};
use rand::Rng;

/// Offset of individual `p` along the diagonal for one gene.
pub fn diagonal_offset(p: usize, pop_size: usize, beta: f64, span: f64) -> f64 {
    (p as f64 + beta) / pop_size as f64 * span
}

/// Folds `v` back into `[min, max)` by the gene's span.
pub fn wrap(v: f64, min: f64, max: f64) -> f64 {
    min + (v - min).rem_euclid(max - min)
}

/// Gene `i` of individual `p` for a given `beta`.
pub fn diagonal_gene(space: &ParamSpace, i: usize, p: usize, pop_size: usize, beta: f64) -> f64 {
    let g = &space.genes[i];
    let raw = g.rfc + diagonal_offset(p, pop_size, beta, g.span());
    g.repair(wrap(raw, g.min, g.max))
}

/// Spreads the initial population over diagonal bands of the search space,
/// starting from the RFC values.
pub fn diagonal_init<R: Rng + ?Sized>(space: &ParamSpace, pop_size: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..pop_size)
        .map(|p| {
            (0..gene::COUNT)
                .map(|i| diagonal_gene(space, i, p, pop_size, rng.gen::<f64>()))
                .collect()
        })
        .collect()
}

/// Arithmetic recombination weighted towards `fitter`.
pub fn arithmetic_crossover(fitter: &[f64], other: &[f64], sigma: f64, space: &ParamSpace) -> (Vec<f64>, Vec<f64>) {
    let mut a: Vec<f64> = fitter
        .iter()
        .zip(other)
        .map(|(p, q)| sigma * p + (1.0 - sigma) * q)
        .collect();
    let mut b: Vec<f64> = fitter
        .iter()
        .zip(other)
        .map(|(p, q)| (1.0 - sigma) * p + sigma * q)
        .collect();
    space.repair(&mut a);
    space.repair(&mut b);
    (a, b)
}

/// Binary tournament on fitness values (minimizing). Returns the winner's index.
pub fn tournament_select<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> Result<usize> {
    let n = fitness.len();
    if n < 2 {
        return Err(Error::Validation(format!(
            "tournament needs at least 2 individuals, got {n}"
        )));
    }
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    Ok(tournament_winner(fitness, a, b))
}

pub fn tournament_winner(fitness: &[f64], a: usize, b: usize) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if fitness[hi] < fitness[lo] {
        hi
    } else {
        lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn diagonal_examples() {
        let s = ParamSpace::standard();
        assert_abs_diff_eq!(diagonal_gene(&s, gene::HELLO, 0, 1, 0.0), 2.0);
        assert_abs_diff_eq!(diagonal_gene(&s, gene::HELLO, 2, 4, 0.5), 10.125, epsilon = 1e-12);
        assert_abs_diff_eq!(diagonal_gene(&s, gene::TC, 3, 4, 0.9), 4.225, epsilon = 1e-9);
    }

    #[test]
    fn crossover_examples() {
        let s = ParamSpace::standard();
        let p = vec![10.0, 10.0, 10.0, 3.0, 10.0, 20.0, 20.0, 20.0];
        let q = vec![14.0, 14.0, 20.0, 6.0, 30.0, 40.0, 40.0, 40.0];
        let (a, b) = arithmetic_crossover(&p, &q, 1.0, &s);
        assert_eq!((a, b), (p.clone(), q.clone()));
        let (a, b) = arithmetic_crossover(&p, &q, 0.5, &s);
        assert_eq!(a, b);
        let (a, b) = arithmetic_crossover(&p, &q, 0.7, &s);
        assert_abs_diff_eq!(a[gene::TC], 13.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b[gene::TC], 17.0, epsilon = 1e-12);
        assert_eq!(a[gene::WILLINGNESS].fract(), 0.0);
    }

    #[test]
    fn tournament_ties_and_dominance() {
        let mut rng = seed::rng(1);
        for _ in 0..50 {
            assert_eq!(tournament_select(&[0.5, 0.5], &mut rng).unwrap(), 0);
            assert_eq!(tournament_select(&[0.9, 0.3], &mut rng).unwrap(), 1);
        }
        assert!(tournament_select(&[0.1], &mut rng).is_err());
    }

    #[test]
    fn tournament_distribution() {
        let f = [0.1, 0.2, 0.3, 0.4];
        let mut expected = [0.0; 4];
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    expected[tournament_winner(&f, a, b)] += 1.0 / 12.0;
                }
            }
        }
        assert_abs_diff_eq!(expected[0], 0.5, epsilon = 1e-12);
        let mut rng = seed::rng(2);
        let mut seen = [0.0; 4];
        let draws = 40_000;
        for _ in 0..draws {
            seen[tournament_select(&f, &mut rng).unwrap()] += 1.0 / draws as f64;
        }
        for (s, e) in seen.iter().zip(expected) {
            assert!((s - e).abs() < 0.01, "{seen:?} vs {expected:?}");
        }
    }

    proptest! {
        #[test]
        fn init_in_bounds_and_banded(pop in 1usize..40, seed in any::<u64>()) {
            let s = ParamSpace::standard();
            let mut rng = crate::seed::rng(seed);
            let population = diagonal_init(&s, pop, &mut rng);
            prop_assert_eq!(population.len(), pop);
            for genes in &population {
                prop_assert!(s.contains(genes));
            }
        }

        #[test]
        fn offset_band(pop in 1usize..40, beta in 0.0f64..1.0, span in 0.1f64..100.0) {
            for p in 0..pop {
                let a = diagonal_offset(p, pop, beta, span);
                let lo = p as f64 / pop as f64 * span;
                let hi = (p + 1) as f64 / pop as f64 * span;
                prop_assert!(a >= lo - 1e-12 && a < hi);
            }
        }

        #[test]
        fn crossover_conserves_sums(sigma in 0.0f64..1.0, p in prop::collection::vec(0.0f64..100.0, 8), q in prop::collection::vec(0.0f64..100.0, 8)) {
            for i in 0..8 {
                let a = sigma * p[i] + (1.0 - sigma) * q[i];
                let b = (1.0 - sigma) * p[i] + sigma * q[i];
                prop_assert!((a + b - p[i] - q[i]).abs() < 1e-9);
            }
            let s = ParamSpace::standard();
            let (a, b) = arithmetic_crossover(&p, &q, sigma, &s);
            prop_assert!(s.contains(&a) && s.contains(&b));
        }
    }
}

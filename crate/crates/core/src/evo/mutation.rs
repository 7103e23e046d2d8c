//! The 22-move mutation catalog.

use crate::olsr::{gene, ParamSpace};
use rand::Rng;

pub const MOVE_COUNT: usize = 22;

const HOLDS: [usize; 4] = [gene::NEIGHB_HOLD, gene::MID_HOLD, gene::TOP_HOLD, gene::DUP_HOLD];
const INTERVALS: [usize; 3] = [gene::HELLO, gene::REFRESH, gene::TC];

/// Uniform value in gene `i`'s range.
pub fn resample_gene<R: Rng + ?Sized>(space: &ParamSpace, i: usize, rng: &mut R) -> f64 {
    let g = &space.genes[i];
    g.repair(g.min + rng.gen::<f64>() * g.span())
}

/// Applies a uniformly chosen move; returns its number (1-based).
pub fn mutate<R: Rng + ?Sized>(genes: &mut [f64], space: &ParamSpace, rng: &mut R) -> usize {
    let m = rng.gen_range(1..=MOVE_COUNT);
    apply_move(m, genes, space, rng);
    m
}

/// Applies move `m` (1..=22).
pub fn apply_move<R: Rng + ?Sized>(m: usize, genes: &mut [f64], space: &ParamSpace, rng: &mut R) {
    let resample = |genes: &mut [f64], idx: &[usize], rng: &mut R| {
        for &i in idx {
            genes[i] = resample_gene(space, i, rng);
        }
    };
    match m {
        1..=8 => resample(genes, &[m - 1], rng),
        9 => resample(genes, &[gene::HELLO, gene::NEIGHB_HOLD], rng),
        10 => resample(genes, &[gene::TC, gene::TOP_HOLD], rng),
        11 => resample(genes, &[gene::TC, gene::MID_HOLD], rng),
        12 => resample(genes, &[gene::REFRESH, gene::HELLO], rng),
        13 => genes[gene::NEIGHB_HOLD] = 3.0 * genes[gene::HELLO],
        14 => genes[gene::TOP_HOLD] = 3.0 * genes[gene::TC],
        15 => genes[gene::MID_HOLD] = 3.0 * genes[gene::TC],
        16 => genes[gene::HELLO] *= rng.gen_range(0.5..=2.0),
        17 => genes[gene::TC] *= rng.gen_range(0.5..=2.0),
        18 => genes[gene::WILLINGNESS] += if rng.gen::<bool>() { 1.0 } else { -1.0 },
        19 => resample(genes, &HOLDS, rng),
        20 => resample(genes, &INTERVALS, rng),
        21 => {
            let i = rng.gen_range(0..gene::COUNT);
            genes[i] = space.genes[i].rfc;
        }
        22 => resample(genes, &(0..gene::COUNT).collect::<Vec<_>>(), rng),
        _ => panic!("mutation move {m} out of range"),
    }
    space.repair(genes);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use approx::assert_abs_diff_eq;
    use rand::rngs::mock::StepRng;

    #[test]
    fn paired_resample_endpoints() {
        let s = ParamSpace::standard();
        let mut genes = s.rfc_genes();
        // StepRng(0, 0) yields 0.0 for every uniform draw.
        apply_move(9, &mut genes, &s, &mut StepRng::new(0, 0));
        assert_eq!(genes[gene::HELLO], 2.0);
        assert_eq!(genes[gene::NEIGHB_HOLD], 5.5);
        let mut rng = StepRng::new(1 << 63, 0);
        apply_move(9, &mut genes, &s, &mut rng);
        assert_abs_diff_eq!(genes[gene::HELLO], 8.5, epsilon = 1e-9);
    }

    #[test]
    fn ratio_moves() {
        let s = ParamSpace::standard();
        let mut genes = s.rfc_genes();
        genes[gene::HELLO] = 14.89;
        apply_move(13, &mut genes, &s, &mut seed::rng(0));
        assert_abs_diff_eq!(genes[gene::NEIGHB_HOLD], 44.67, epsilon = 1e-9);
        genes[gene::HELLO] = 15.0;
        apply_move(13, &mut genes, &s, &mut seed::rng(0));
        assert_eq!(genes[gene::NEIGHB_HOLD], 45.0);
    }

    #[test]
    fn willingness_step_clamped() {
        let s = ParamSpace::standard();
        let mut rng = seed::rng(3);
        let mut genes = s.rfc_genes();
        genes[gene::WILLINGNESS] = 7.0;
        for _ in 0..20 {
            apply_move(18, &mut genes, &s, &mut rng);
            assert!(genes[gene::WILLINGNESS] >= 0.0 && genes[gene::WILLINGNESS] <= 7.0);
        }
    }

    #[test]
    fn every_move_reachable() {
        let s = ParamSpace::standard();
        let mut rng = seed::rng(4);
        let mut seen = [false; MOVE_COUNT + 1];
        let mut genes = s.rfc_genes();
        for _ in 0..2000 {
            seen[mutate(&mut genes, &s, &mut rng)] = true;
        }
        assert!(seen[1..].iter().all(|&b| b));
    }
}

use super::fitness::{FitnessContext, FitnessRecord};
use super::mutation::mutate;
use super::operators::{arithmetic_crossover, diagonal_init, tournament_select};
use super::pool::{evaluate_all, Evaluator};
use crate::analysis::{gap_energy, gap_pdr};
use crate::error::{Error, Result};
use crate::olsr::{decode_genome, rfc_default, ParamSpace};
use crate::scenario::Scenario;
use crate::seed::{self, Stream};
use crate::sim::{run_simulation, NicProfile, SimMetrics};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Vec<f64>,
    pub fitness: Option<FitnessRecord>,
    /// Generation and index at which the individual was evaluated.
    pub id: (u32, u32),
}

impl Individual {
    /// Fitness value, worst possible if not evaluated.
    pub fn f(&self) -> f64 {
        self.fitness.as_ref().map_or(f64::INFINITY, |r| r.f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaSettings {
    pub pop_size: usize,
    pub p_c: f64,
    pub p_m: f64,
    pub generations: u32,
    pub workers: usize,
    pub master_seed: u64,
    #[serde(default = "default_elitism")]
    pub elitism: usize,
}

fn default_elitism() -> usize {
    1
}

impl Default for GaSettings {
    fn default() -> Self {
        Self {
            pop_size: 24,
            p_c: 0.7,
            p_m: 0.25,
            generations: 100,
            workers: 1,
            master_seed: 0,
            elitism: 1,
        }
    }
}

impl GaSettings {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return bad(format!(
                "population size must be even and at least 2, got {}",
                self.pop_size
            ));
        }
        for (name, p) in [("crossover", self.p_c), ("mutation", self.p_m)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} probability {p} outside [0, 1]"));
            }
        }
        if self.workers == 0 {
            return bad("at least one worker is required".into());
        }
        if self.elitism >= self.pop_size {
            return bad(format!("elitism {} must be below the population size", self.elitism));
        }
        Ok(())
    }
}

/// One row of the per-generation history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: u32,
    pub best_f: f64,
    /// Mean over individuals whose evaluation succeeded.
    pub avg_f: f64,
    pub best_energy: f64,
    pub best_pdr: f64,
    pub penalized_count: usize,
}

#[derive(Debug, Clone)]
pub struct EvolveResult {
    pub best: Individual,
    /// Lowest-fitness individual evaluated during the run whose record is not
    /// penalized, if any.
    pub best_feasible: Option<Individual>,
    pub history: Vec<GenerationStats>,
    pub evaluations: usize,
}

/// Scores genomes by simulating them on one scenario.
pub struct SimulationEvaluator<'a> {
    pub scenario: &'a Scenario,
    pub nic: NicProfile<f64>,
    pub ctx: FitnessContext<f64>,
    pub space: ParamSpace,
    /// Minimum wall time per evaluation; the call sleeps for the remainder.
    pub pad: Duration,
}

impl<'a> SimulationEvaluator<'a> {
    pub fn new(scenario: &'a Scenario, nic: NicProfile<f64>, ctx: FitnessContext<f64>) -> Self {
        Self {
            scenario,
            nic,
            ctx,
            space: ParamSpace::standard(),
            pad: Duration::ZERO,
        }
    }
}

impl Evaluator for SimulationEvaluator<'_> {
    fn evaluate(&self, genes: &[f64], seed: u64) -> Result<FitnessRecord> {
        let start = Instant::now();
        let config = decode_genome(genes, &self.space)?;
        let metrics = run_simulation(self.scenario, &config, &self.nic, seed)?;
        let record = FitnessRecord::from_metrics(metrics, &self.ctx);
        if let Some(rest) = self.pad.checked_sub(start.elapsed()) {
            std::thread::sleep(rest);
        }
        Ok(record)
    }
}

/// Simulation seed used for the reference run of a tuning session.
pub fn calibration_seed(master_seed: u64) -> u64 {
    seed::derive(master_seed, Stream::Simulation)
}

/// Measures the RFC configuration on `scenario` to obtain the fitness reference.
pub fn calibrate(
    scenario: &Scenario,
    nic: &NicProfile<f64>,
    master_seed: u64,
) -> Result<(FitnessContext<f64>, SimMetrics)> {
    let metrics = run_simulation(scenario, &rfc_default(), nic, calibration_seed(master_seed))?;
    match metrics.pdr {
        Some(pdr) if pdr > 0.0 => Ok((FitnessContext::new(metrics.e_total(), pdr)?, metrics)),
        _ => Err(Error::Degenerate(format!(
            "RFC configuration delivered no data on scenario {:?}; cannot calibrate fitness",
            scenario.name
        ))),
    }
}

/// Tunes OLSR on one scenario by simulation.
pub fn evolve(
    settings: &GaSettings,
    space: &ParamSpace,
    scenario: &Scenario,
    nic: &NicProfile<f64>,
    ctx: &FitnessContext<f64>,
) -> Result<EvolveResult> {
    let evaluator = SimulationEvaluator {
        scenario,
        nic: *nic,
        ctx: *ctx,
        space: space.clone(),
        pad: Duration::ZERO,
    };
    evolve_with(settings, space, &evaluator)
}

/// The generational loop over an arbitrary evaluator.
pub fn evolve_with<E: Evaluator + ?Sized>(
    settings: &GaSettings,
    space: &ParamSpace,
    evaluator: &E,
) -> Result<EvolveResult> {
    settings.validate()?;
    let mut rng = seed::rng(seed::derive(settings.master_seed, Stream::Ga));
    let eval_master = seed::derive(settings.master_seed, Stream::Simulation);
    let mut evaluations = 0;
    let mut best_feasible: Option<Individual> = None;

    let mut evaluate = |pop: &mut [Individual], from: usize, generation: u32| {
        for (i, ind) in pop.iter_mut().enumerate().skip(from) {
            ind.id = (generation, i as u32);
        }
        let seeds: Vec<u64> = pop[from..]
            .iter()
            .map(|ind| seed::evaluation_seed(eval_master, ind.id.0, ind.id.1))
            .collect();
        let tasks: Vec<(&[f64], u64)> = pop[from..].iter().map(|ind| ind.genes.as_slice()).zip(seeds).collect();
        let results = evaluate_all(evaluator, &tasks, settings.workers);
        evaluations += results.len();
        for (ind, r) in pop[from..].iter_mut().zip(results) {
            let rec = r.unwrap_or_else(|e| {
                log::warn!("evaluation of individual {:?} failed: {e}", ind.id);
                FitnessRecord::failed()
            });
            if !rec.penalized && rec.f < best_feasible.as_ref().map_or(f64::INFINITY, Individual::f) {
                best_feasible = Some(Individual {
                    genes: ind.genes.clone(),
                    fitness: Some(rec.clone()),
                    id: ind.id,
                });
            }
            ind.fitness = Some(rec);
        }
    };

    let mut population: Vec<Individual> = diagonal_init(space, settings.pop_size, &mut rng)
        .into_iter()
        .map(|genes| Individual {
            genes,
            fitness: None,
            id: (0, 0),
        })
        .collect();
    evaluate(&mut population, 0, 0);
    let mut history = vec![generation_stats(0, &population)];

    for generation in 1..=settings.generations {
        let f: Vec<f64> = population.iter().map(Individual::f).collect();
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
        let mut next: Vec<Individual> = order[..settings.elitism]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        let elites = next.len();
        while next.len() < settings.pop_size {
            let a = tournament_select(&f, &mut rng)?;
            let b = tournament_select(&f, &mut rng)?;
            let (p, q) = if f[b] < f[a] || (f[b] == f[a] && b < a) {
                (b, a)
            } else {
                (a, b)
            };
            let (mut c1, mut c2) = if rng.gen::<f64>() < settings.p_c {
                let sigma = rng.gen_range(0.5..=1.0);
                arithmetic_crossover(&population[p].genes, &population[q].genes, sigma, space)
            } else {
                (population[p].genes.clone(), population[q].genes.clone())
            };
            for child in [&mut c1, &mut c2] {
                if rng.gen::<f64>() < settings.p_m {
                    mutate(child, space, &mut rng);
                }
            }
            for genes in [c1, c2] {
                if next.len() < settings.pop_size {
                    next.push(Individual {
                        genes,
                        fitness: None,
                        id: (0, 0),
                    });
                }
            }
        }
        evaluate(&mut next, elites, generation);
        population = next;
        history.push(generation_stats(generation, &population));
    }

    let best = population
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.f().total_cmp(&b.f()).then(i.cmp(j)))
        .map(|(_, ind)| ind.clone())
        .expect("population is not empty");
    Ok(EvolveResult {
        best,
        best_feasible,
        history,
        evaluations,
    })
}

fn generation_stats(generation: u32, population: &[Individual]) -> GenerationStats {
    let best = population
        .iter()
        .min_by(|a, b| a.f().total_cmp(&b.f()))
        .expect("population is not empty");
    let ok: Vec<f64> = population.iter().map(Individual::f).filter(|f| f.is_finite()).collect();
    let rec = best.fitness.as_ref();
    GenerationStats {
        generation,
        best_f: best.f(),
        avg_f: if ok.is_empty() {
            f64::NAN
        } else {
            ok.iter().sum::<f64>() / ok.len() as f64
        },
        best_energy: rec.map_or(f64::NAN, |r| r.energy),
        best_pdr: rec.map_or(f64::NAN, |r| r.pdr),
        penalized_count: population
            .iter()
            .filter(|i| i.fitness.as_ref().is_some_and(|r| r.penalized))
            .count(),
    }
}

/// Writes the history as CSV.
pub fn write_history_csv<W: std::io::Write>(out: W, history: &[GenerationStats]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in history {
        w.serialize(row).map_err(crate::sim::csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One `(p_c, p_m)` combination of the parameter-setting study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub p_c: f64,
    pub p_m: f64,
    pub avg_f: f64,
    /// Relative standard deviation of the best fitness, percent.
    pub stdev_pct: f64,
    pub best_f: f64,
    pub avg_energy: f64,
    pub avg_pdr: f64,
    pub avg_gap_energy: f64,
    pub avg_gap_pdr: f64,
}

pub const GRID_P_C: [f64; 3] = [0.5, 0.7, 0.9];
pub const GRID_P_M: [f64; 3] = [0.06125, 0.125, 0.25];

/// Runs `repetitions` independent evolutions per `(p_c, p_m)` pair. Repetition
/// `r` uses master seed `settings.master_seed + r`.
pub fn parameter_setting_grid<E: Evaluator + ?Sized>(
    settings: &GaSettings,
    space: &ParamSpace,
    evaluator: &E,
    ctx: &FitnessContext<f64>,
    p_c: &[f64],
    p_m: &[f64],
    repetitions: usize,
) -> Result<Vec<GridRow>> {
    if p_c.is_empty() || p_m.is_empty() || repetitions == 0 {
        return Err(Error::Validation(
            "parameter grid needs candidates and at least one repetition".into(),
        ));
    }
    let mut rows = Vec::new();
    for &pm in p_m {
        for &pc in p_c {
            let mut best = Vec::with_capacity(repetitions);
            for r in 0..repetitions {
                let s = GaSettings {
                    p_c: pc,
                    p_m: pm,
                    master_seed: settings.master_seed.wrapping_add(r as u64),
                    ..settings.clone()
                };
                let out = evolve_with(&s, space, evaluator)?;
                best.push(out.best.fitness.expect("best individual is evaluated"));
            }
            let n = best.len() as f64;
            let mean = |v: &dyn Fn(&FitnessRecord) -> f64| best.iter().map(v).sum::<f64>() / n;
            let avg_f = mean(&|r| r.f);
            let var = if best.len() > 1 {
                best.iter().map(|r| (r.f - avg_f).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            rows.push(GridRow {
                p_c: pc,
                p_m: pm,
                avg_f,
                stdev_pct: 100.0 * var.sqrt() / avg_f.abs(),
                best_f: best.iter().map(|r| r.f).fold(f64::INFINITY, f64::min),
                avg_energy: mean(&|r| r.energy),
                avg_pdr: mean(&|r| r.pdr),
                avg_gap_energy: mean(&|r| gap_energy(r.energy, ctx.e_rfc)),
                avg_gap_pdr: mean(&|r| gap_pdr(r.pdr, ctx.pdr_rfc)),
            });
        }
    }
    Ok(rows)
}

pub fn write_grid_csv<W: std::io::Write>(out: W, rows: &[GridRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(crate::sim::csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::olsr::gene;

    fn target_distance(space: &ParamSpace) -> impl Fn(&[f64], u64) -> Result<FitnessRecord> + Sync + '_ {
        move |genes: &[f64], _seed: u64| {
            let d: f64 = genes
                .iter()
                .zip(space.genes.iter())
                .map(|(v, g)| (v - (g.min + 3.0 / 7.0 * g.span())).abs() / g.span())
                .sum();
            Ok(FitnessRecord::plain(d))
        }
    }

    #[test]
    fn synthetic_objective_converges() {
        let space = ParamSpace::standard();
        let eval = target_distance(&space);
        for seed in 0..5 {
            let s = GaSettings {
                generations: 100,
                master_seed: seed,
                ..GaSettings::default()
            };
            let out = evolve_with(&s, &space, &eval).unwrap();
            assert_eq!(out.history.len(), 101);
            assert!(out.best.f() < 0.05, "best {}", out.best.f());
            assert!(space.contains(&out.best.genes));
            for w in out.history.windows(2) {
                assert!(w[1].best_f <= w[0].best_f);
            }
        }
    }

    #[test]
    fn zero_generations_keeps_initial_best() {
        let space = ParamSpace::standard();
        let eval = target_distance(&space);
        let s = GaSettings {
            generations: 0,
            ..GaSettings::default()
        };
        let out = evolve_with(&s, &space, &eval).unwrap();
        assert_eq!(out.history.len(), 1);
        assert_eq!(out.evaluations, 24);
        assert_eq!(out.best.id.0, 0);
        assert_eq!(out.best.f(), out.history[0].best_f);
    }

    #[test]
    fn worker_count_does_not_matter() {
        let space = ParamSpace::standard();
        let eval = |g: &[f64], seed: u64| Ok(FitnessRecord::plain(g[gene::TC] + (seed % 7) as f64 * 0.01));
        let run = |workers| {
            let s = GaSettings {
                generations: 15,
                workers,
                master_seed: 9,
                ..GaSettings::default()
            };
            evolve_with(&s, &space, &eval).unwrap()
        };
        let (a, b) = (run(1), run(8));
        assert_eq!(format!("{:?}", a.best), format!("{:?}", b.best));
        assert_eq!(format!("{:?}", a.history), format!("{:?}", b.history));
    }

    #[test]
    fn failures_get_sentinel() {
        let space = ParamSpace::standard();
        let eval = |g: &[f64], _seed: u64| {
            if g[gene::HELLO] > 8.0 {
                Err(Error::Evaluation("synthetic".into()))
            } else {
                Ok(FitnessRecord::plain(g[gene::HELLO]))
            }
        };
        let s = GaSettings {
            generations: 3,
            ..GaSettings::default()
        };
        let out = evolve_with(&s, &space, &eval).unwrap();
        assert!(out.best.f() <= 8.0);
        assert!(out.history.iter().all(|h| h.avg_f.is_finite()));
    }

    #[test]
    fn settings_validation() {
        assert!(GaSettings {
            pop_size: 3,
            ..GaSettings::default()
        }
        .validate()
        .is_err());
        assert!(GaSettings {
            p_m: 1.5,
            ..GaSettings::default()
        }
        .validate()
        .is_err());
        assert!(GaSettings {
            workers: 0,
            ..GaSettings::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn grid_shape() {
        let space = ParamSpace::standard();
        let eval = |g: &[f64], _seed: u64| {
            let mut r = FitnessRecord::plain(g[gene::HELLO] / 15.0);
            r.energy = 100.0 * g[gene::HELLO];
            r.pdr = 80.0;
            Ok(r)
        };
        let ctx = FitnessContext::new(1000.0, 90.0).unwrap();
        let s = GaSettings {
            generations: 2,
            ..GaSettings::default()
        };
        let one = parameter_setting_grid(&s, &space, &eval, &ctx, &[0.7], &[0.25], 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].stdev_pct, 0.0);
        let single = evolve_with(
            &GaSettings {
                p_c: 0.7,
                p_m: 0.25,
                ..s.clone()
            },
            &space,
            &eval,
        )
        .unwrap();
        assert_eq!(one[0].best_f, single.best.f());
        let nine = parameter_setting_grid(&s, &space, &eval, &ctx, &GRID_P_C, &GRID_P_M, 2).unwrap();
        assert_eq!(nine.len(), 9);
        assert!((nine[0].avg_gap_pdr - 0.1).abs() < 1e-12);
    }
}

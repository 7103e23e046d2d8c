use crate::cli::{BenchArgs, GenArgs, SimulateArgs, TuneArgs, ValidateArgs};
use crate::manifest::RunManifest;
use anyhow::anyhow;
use eolsr::analysis::{compare_against_reference, validation_report, BenchResult};
use eolsr::evo::{
    calibrate, evolve_with, parameter_setting_grid, write_grid_csv, write_history_csv, GaSettings, SimulationEvaluator,
};
use eolsr::olsr::{decode_genome, rfc_default, OlsrConfig, ParamSpace};
use eolsr::scenario::{generate_grid_scenario, Area, FlowTemplate, GridSpec, LossModel, Scenario};
use eolsr::seed::{self, Stream};
use eolsr::sim::{run_simulation, write_metrics_csv};
use eolsr::{Error, Nic};
use serde_json::json;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// An error with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }

    pub fn domain(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_DOMAIN,
            error: error.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) | Error::Parse { .. } => Self::usage(e),
            _ => Self::domain(e),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Self::usage(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e)
    }
}

type Outcome = Result<(), Failure>;

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    Scenario::load(path).map_err(|e| {
        let code = Failure::from(e);
        Failure {
            code: code.code,
            error: code.error.context(format!("loading scenario {}", path.display())),
        }
    })
}

fn load_config(path: &Path) -> Result<OlsrConfig, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::usage(anyhow!("reading config {}: {e}", path.display())))?;
    let config: OlsrConfig =
        serde_json::from_str(&text).map_err(|e| Failure::usage(anyhow!("parsing config {}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::usage(anyhow!("creating {}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)? + "\n";
    fs::write(path, text).map_err(|e| Failure::usage(anyhow!("writing {}: {e}", path.display())))
}

fn out_dir(dir: &Path) -> Result<&Path, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::usage(anyhow!("creating output directory {}: {e}", dir.display())))?;
    Ok(dir)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "config".into(), |s| s.to_string_lossy().into_owned())
}

pub fn gen(args: &GenArgs) -> Outcome {
    let (w, h) = args.area;
    let streets = args
        .streets
        .unwrap_or(((h / 100.0).round() as usize + 1, (w / 100.0).round() as usize + 1));
    let spec = GridSpec {
        speed: (args.speed_min, args.speed_max),
        duration: args.duration,
        ..GridSpec::urban(Area::new(w, h), streets, args.vehicles)
    };
    let template = FlowTemplate {
        packet_size: args.packet_size,
        rate: args.rate,
        start: args.flow_start,
        duration: args.flow_duration,
    };
    let flows = args.flows.unwrap_or(args.vehicles / 2);
    let mut manifest = RunManifest::start("gen", args, args.common.seed);
    let mut scenario = generate_grid_scenario(
        &spec,
        flows,
        &template,
        seed::derive(args.common.seed, Stream::Scenario),
    )?;
    scenario.name = args.name.clone();
    if args.loss > 0.0 {
        scenario.loss_model = LossModel::Bernoulli {
            p_at_max_range: args.loss,
        };
        scenario.validate()?;
    }
    let dir = out_dir(&args.common.out)?;
    let (json_path, trace_path) = scenario.save(dir, &args.name)?;
    manifest.output(json_path.clone());
    manifest.output(trace_path);
    manifest.details = json!({
        "class": scenario.class().label(),
        "vehicles": scenario.node_count(),
        "flows": scenario.flows.len(),
    });
    manifest.finish(dir, &args.name)?;
    println!("{}", json_path.display());
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Outcome {
    let mut manifest = RunManifest::start("simulate", args, args.common.seed);
    let scenario = load_scenario(&args.scenario)?;
    manifest.input(&args.scenario)?;
    let (config_id, config) = match &args.config {
        Some(path) => {
            let c = load_config(path)?;
            manifest.input(path)?;
            (stem(path), c)
        }
        None => ("rfc".to_string(), rfc_default()),
    };
    let nic = Nic::default();
    let sim_seed = seed::derive(args.common.seed, Stream::Simulation);
    let dir = out_dir(&args.common.out)?;
    let mut rows = Vec::new();
    let mut gaps = serde_json::Value::Null;
    if args.compare_rfc {
        let c = compare_against_reference(&scenario, &config, &nic, sim_seed)?;
        rows.push(c.candidate.row(&scenario.name, &config_id, sim_seed));
        rows.push(c.reference.row(&scenario.name, "rfc", sim_seed));
        gaps = json!({ "gap_energy": c.gap_energy, "gap_pdr": c.gap_pdr });
    } else {
        let m = run_simulation(&scenario, &config, &nic, sim_seed)?;
        rows.push(m.row(&scenario.name, &config_id, sim_seed));
    }
    let csv_path = dir.join("metrics.csv");
    write_metrics_csv(create(&csv_path)?, &rows)?;
    let json_path = dir.join("metrics.json");
    if gaps.is_null() {
        write_json(&json_path, &json!({ "rows": rows }))?;
    } else {
        write_json(&json_path, &json!({ "rows": rows, "gaps": gaps }))?;
    }
    for r in &rows {
        println!(
            "{}: pdr {} e_total {:.2} mJ control_tx {}",
            r.config_id,
            r.pdr.map_or("-".into(), |p| format!("{p:.2}%")),
            r.e_total_mj,
            r.control_tx
        );
    }
    if let Some(g) = gaps.as_object() {
        println!("gap_energy {} gap_pdr {}", g["gap_energy"], g["gap_pdr"]);
    }
    manifest.output(csv_path);
    manifest.output(json_path);
    manifest.finish(dir, "simulate")?;
    Ok(())
}

pub fn tune(args: &TuneArgs) -> Outcome {
    let mut manifest = RunManifest::start("tune", args, args.common.seed);
    let scenario = load_scenario(&args.scenario)?;
    manifest.input(&args.scenario)?;
    let nic = Nic::default();
    let settings = GaSettings {
        pop_size: args.pop,
        p_c: args.pc,
        p_m: args.pm,
        generations: args.gens,
        workers: args.workers,
        master_seed: args.common.seed,
        elitism: args.elitism,
    };
    settings.validate()?;
    let (ctx, reference) = calibrate(&scenario, &nic, args.common.seed)?;
    log::info!("reference: {:.2} mJ, PDR {:.2}%", ctx.e_rfc, ctx.pdr_rfc);
    let space = ParamSpace::standard();
    let evaluator = SimulationEvaluator::new(&scenario, nic, ctx);
    let dir = out_dir(&args.common.out)?;
    manifest.details = json!({ "context": ctx, "reference": reference.row(&scenario.name, "rfc", eolsr::evo::calibration_seed(args.common.seed)) });

    if args.grid {
        let rows = parameter_setting_grid(
            &settings,
            &space,
            &evaluator,
            &ctx,
            &args.grid_pc,
            &args.grid_pm,
            args.reps,
        )?;
        let path = dir.join("grid.csv");
        write_grid_csv(create(&path)?, &rows)?;
        for r in &rows {
            println!(
                "p_c {:<5} p_m {:<8} avg_f {:.6} best_f {:.6}",
                r.p_c, r.p_m, r.avg_f, r.best_f
            );
        }
        manifest.output(path);
    } else {
        let out = evolve_with(&settings, &space, &evaluator)?;
        let best = decode_genome(&out.best.genes, &space)?;
        let config_path = dir.join("best_config.json");
        write_json(&config_path, &best)?;
        let history_path = dir.join("history.csv");
        write_history_csv(create(&history_path)?, &out.history)?;
        let rec = out.best.fitness.as_ref().expect("best individual is evaluated");
        println!(
            "best F {:.6} energy {:.2} mJ PDR {:.2}% ({} evaluations)",
            rec.f, rec.energy, rec.pdr, out.evaluations
        );
        manifest.output(config_path);
        manifest.output(history_path);
        if let Some(feasible) = &out.best_feasible {
            let path = dir.join("best_feasible_config.json");
            write_json(&path, &decode_genome(&feasible.genes, &space)?)?;
            let rec = feasible.fitness.as_ref().expect("evaluated");
            println!(
                "best unpenalized F {:.6} energy {:.2} mJ PDR {:.2}%",
                rec.f, rec.energy, rec.pdr
            );
            manifest.output(path);
        }
    }
    manifest.finish(dir, "tune")?;
    Ok(())
}

fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::usage(anyhow!("reading {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            name.ends_with(".json") && !name.ends_with(".manifest.json")
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::usage(anyhow!("no scenario files in {}", dir.display())));
    }
    Ok(files)
}

pub fn validate(args: &ValidateArgs) -> Outcome {
    let mut manifest = RunManifest::start("validate", args, args.common.seed);
    let mut scenarios = Vec::new();
    for path in scenario_files(&args.scenarios)? {
        scenarios.push(load_scenario(&path)?);
        manifest.input(&path)?;
    }
    let mut configs = Vec::new();
    if !args.no_rfc {
        configs.push(("rfc".to_string(), rfc_default()));
    }
    for path in &args.configs {
        configs.push((stem(path), load_config(path)?));
        manifest.input(path)?;
    }
    if configs.is_empty() {
        return Err(Failure::usage(anyhow!("no configurations to validate")));
    }
    if args.seeds == 0 {
        return Err(Failure::usage(anyhow!("--seeds must be at least 1")));
    }
    let base = seed::derive(args.common.seed, Stream::Simulation);
    let seeds: Vec<u64> = (0..args.seeds as u64).map(|k| seed::combine(&[base, k])).collect();
    let report = validation_report(&configs, &scenarios, &Nic::default(), &seeds, args.workers)?;
    let dir = out_dir(&args.common.out)?;
    let csv_path = dir.join("report.csv");
    report.write_csv(create(&csv_path)?)?;
    let text_path = dir.join("report.txt");
    let text = report.to_text();
    fs::write(&text_path, &text)?;
    let runs_path = dir.join("runs.csv");
    write_metrics_csv(create(&runs_path)?, &report.runs)?;
    print!("{text}");
    if !report.failures.is_empty() {
        eprintln!("{} run(s) failed and were excluded", report.failures.len());
    }
    manifest.details = json!({ "scenarios": scenarios.len(), "failures": report.failures });
    for p in [csv_path, text_path, runs_path] {
        manifest.output(p);
    }
    manifest.finish(dir, "validate")?;
    Ok(())
}

pub fn bench(args: &BenchArgs) -> Outcome {
    let mut manifest = RunManifest::start("bench", args, args.common.seed);
    let scenario = load_scenario(&args.scenario)?;
    manifest.input(&args.scenario)?;
    if args.reps == 0 || args.workers.contains(&0) {
        return Err(Failure::usage(anyhow!(
            "--reps and every worker count must be at least 1"
        )));
    }
    let mut counts = args.workers.clone();
    if !counts.contains(&1) {
        counts.insert(0, 1);
    }
    let nic = Nic::default();
    let (ctx, _) = calibrate(&scenario, &nic, args.common.seed)?;
    let mut evaluator = SimulationEvaluator::new(&scenario, nic, ctx);
    evaluator.pad = Duration::from_millis(args.pad_ms);
    let space = ParamSpace::standard();
    let mut timings = Vec::new();
    for &m in &counts {
        let settings = GaSettings {
            pop_size: args.pop,
            p_c: args.pc,
            p_m: args.pm,
            generations: args.gens,
            workers: m,
            master_seed: args.common.seed,
            elitism: 1,
        };
        settings.validate()?;
        let mut times = Vec::with_capacity(args.reps);
        for _ in 0..args.reps {
            let start = Instant::now();
            evolve_with(&settings, &space, &evaluator)?;
            times.push(start.elapsed().as_secs_f64());
        }
        timings.push((m, times));
    }
    let result = BenchResult::from_timings(&timings)?;
    let dir = out_dir(&args.common.out)?;
    let path = dir.join("bench.csv");
    result.write_csv(create(&path)?)?;
    for i in 0..result.worker_counts.len() {
        println!(
            "m {:>3}  mean {:>9.3}s  speedup {:>6.2}  efficiency {:.2}",
            result.worker_counts[i], result.mean_times[i], result.speedups[i], result.efficiencies[i]
        );
    }
    manifest.details = json!({ "timings": timings });
    manifest.output(path);
    manifest.finish(dir, "bench")?;
    Ok(())
}

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "eolsr", version, about = "Energy-aware OLSR tuning for vehicular networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a Manhattan-grid scenario (mobility trace and CBR flows).
    Gen(GenArgs),
    /// Simulate one configuration on one scenario.
    Simulate(SimulateArgs),
    /// Tune OLSR parameters with the parallel genetic algorithm.
    Tune(TuneArgs),
    /// Compare configurations over a directory of scenarios.
    Validate(ValidateArgs),
    /// Time the genetic algorithm for several worker counts.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Master seed; every random stream of the command derives from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, env = "EOLSR_OUT", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub common: Common,
    /// Area as WIDTHxHEIGHT in meters, e.g. 600x400.
    #[arg(long, value_parser = parse_pair::<f64>)]
    pub area: (f64, f64),
    #[arg(long)]
    pub vehicles: usize,
    /// Number of CBR flows [default: vehicles / 2].
    #[arg(long)]
    pub flows: Option<usize>,
    /// Street grid as ROWSxCOLS [default: one street every 100 m].
    #[arg(long, value_parser = parse_pair::<usize>)]
    pub streets: Option<(usize, usize)>,
    #[arg(long, default_value_t = 180.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 5.0)]
    pub speed_min: f64,
    #[arg(long, default_value_t = 14.0)]
    pub speed_max: f64,
    /// CBR packet size, bytes.
    #[arg(long, default_value_t = 512)]
    pub packet_size: u32,
    /// CBR rate, packets per second.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 30.0)]
    pub flow_start: f64,
    #[arg(long, default_value_t = 60.0)]
    pub flow_duration: f64,
    /// Loss probability at maximum radio range (0 disables losses).
    #[arg(long, default_value_t = 0.0)]
    pub loss: f64,
    /// File stem and scenario name.
    #[arg(long, default_value = "scenario")]
    pub name: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub scenario: PathBuf,
    /// OLSR configuration JSON.
    #[arg(long, required_unless_present = "rfc", conflicts_with = "rfc")]
    pub config: Option<PathBuf>,
    /// Use the RFC 3626 default configuration.
    #[arg(long)]
    pub rfc: bool,
    /// Also run the RFC configuration on the same seed and report the gaps.
    #[arg(long)]
    pub compare_rfc: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TuneArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value_t = 24)]
    pub pop: usize,
    #[arg(long, default_value_t = 100)]
    pub gens: u32,
    #[arg(long, default_value_t = 0.7)]
    pub pc: f64,
    #[arg(long, default_value_t = 0.25)]
    pub pm: f64,
    #[arg(long, default_value_t = 1)]
    pub elitism: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Run the crossover/mutation probability study instead of one tuning run.
    #[arg(long)]
    pub grid: bool,
    /// Crossover probabilities for --grid.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.7, 0.9])]
    pub grid_pc: Vec<f64>,
    /// Mutation probabilities for --grid.
    #[arg(long, value_delimiter = ',', default_values_t = [0.06125, 0.125, 0.25])]
    pub grid_pm: Vec<f64>,
    /// Independent runs per --grid combination.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Directory of scenario JSON files.
    #[arg(long)]
    pub scenarios: PathBuf,
    /// Configuration JSON, repeatable; named after the file stem.
    #[arg(long = "config")]
    pub configs: Vec<PathBuf>,
    /// Leave the RFC reference row out.
    #[arg(long)]
    pub no_rfc: bool,
    /// Simulation seeds per (config, scenario) pair.
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub scenario: PathBuf,
    /// Worker counts to time; 1 is always added as the baseline.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 8])]
    pub workers: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 24)]
    pub pop: usize,
    #[arg(long, default_value_t = 5)]
    pub gens: u32,
    #[arg(long, default_value_t = 0.7)]
    pub pc: f64,
    #[arg(long, default_value_t = 0.25)]
    pub pm: f64,
    /// Minimum wall time per evaluation in milliseconds.
    #[arg(long, default_value_t = 0)]
    pub pad_ms: u64,
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected AxB, got {s:?}"))?;
    let p = |v: &str| {
        v.trim()
            .parse::<T>()
            .map_err(|_| format!("invalid number {v:?} in {s:?}"))
    };
    Ok((p(a)?, p(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs() {
        assert_eq!(parse_pair::<f64>("600x400"), Ok((600.0, 400.0)));
        assert_eq!(parse_pair::<usize>("5X7"), Ok((5, 7)));
        assert!(parse_pair::<f64>("600").is_err());
        assert!(parse_pair::<usize>("ax3").is_err());
    }
}

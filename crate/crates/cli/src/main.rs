mod cli;
mod commands;
mod manifest;

use clap::Parser;
use cli::{Cli, Command};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Tune(a) => commands::tune(a),
        Command::Validate(a) => commands::validate(a),
        Command::Bench(a) => commands::bench(a),
    };
    if let Err(f) = result {
        eprintln!("error: {:#}", f.error);
        std::process::exit(f.code);
    }
}

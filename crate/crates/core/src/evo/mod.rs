//! Master-slave genetic algorithm that tunes OLSR parameters for low energy.

mod fitness;
mod ga;
mod mutation;
mod operators;
mod pool;

pub use fitness::{fitness, penalized_fitness, FitnessContext, FitnessRecord, WORST_FITNESS};
pub use ga::{
    calibrate, calibration_seed, evolve, evolve_with, parameter_setting_grid, write_grid_csv, write_history_csv,
    EvolveResult, GaSettings, GenerationStats, GridRow, Individual, SimulationEvaluator, GRID_P_C, GRID_P_M,
};
pub use mutation::{apply_move, mutate, resample_gene, MOVE_COUNT};
pub use operators::{
    arithmetic_crossover, diagonal_gene, diagonal_init, diagonal_offset, tournament_select, tournament_winner, wrap,
};
pub use pool::{evaluate_all, parallel_map, Evaluator};

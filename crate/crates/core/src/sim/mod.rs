//! Discrete-event simulation of OLSR over a mobility trace, with per-packet
//! energy accounting.

mod energy;
mod engine;
mod metrics;
mod queue;

pub use energy::{broadcast_energy, energy_recv, energy_send, packet_airtime, EnergyLedger, NicProfile};
pub use engine::{
    neighbors_in_range, run_simulation, run_simulation_with, SimOptions, SimOutput, Transmission,
    DEFAULT_PROCESSING_DELAY, MAX_DATA_HOPS,
};
pub(crate) use metrics::csv_err;
pub use metrics::{write_metrics_csv, MetricsRow, SimMetrics, METRICS_CSV_HEADER};
pub use queue::EventQueue;

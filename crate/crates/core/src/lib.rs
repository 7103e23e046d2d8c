//! Energy-aware tuning of OLSR for vehicular networks.

pub mod analysis;
pub mod error;
pub mod evo;
pub mod num;
pub mod olsr;
pub mod scenario;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
pub use num::Scalar;

pub type NodeId = u32;

pub type Nic = sim::NicProfile<f64>;
pub type Nic32 = sim::NicProfile<f32>;
pub type FitnessContext = evo::FitnessContext<f64>;
pub type FitnessContext32 = evo::FitnessContext<f32>;

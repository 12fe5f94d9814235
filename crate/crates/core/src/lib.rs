//! Agent-based simulation of mpox spread over a dynamic sexual contact
//! network with main, casual and one-time partnerships.

pub mod config;
pub mod epidemic;
pub mod error;
pub mod export;
pub mod harness;
pub mod interventions;
pub mod metrics;
pub mod network;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};

/// Node index within a population.
pub type NodeId = u32;

/// Simulation day; the outbreak is seeded on day 0. Negative days only occur
/// for vaccine rollout that starts before the outbreak.
pub type Day = i32;

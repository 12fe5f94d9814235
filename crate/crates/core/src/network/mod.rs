//! Temporal configuration-model contact network.
//!
//! Main and casual partnerships persist for geometric durations and are
//! rewired from wait-lists when they dissolve; one-time partnerships are
//! redrawn from scratch every day.

mod partnerships;
mod population;
mod window;

use serde::{Deserialize, Serialize};

pub use partnerships::{
    init_relationships, update_onetime, update_persistent, DurationModel, EdgeLifetime, EdgeLog,
    PartnershipSet, PersistentEdge, RewiringState, RewiringStats, WaitEntry,
};
pub use population::{create_population, NetworkParams, NodeProfile, Population, RelClass, Stratum};
pub use window::{cumulative_window_graph, SimpleGraph};

use crate::error::Result;
use crate::rng::RngStream;
use crate::Day;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Main,
    Casual,
    OneTime,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 3] = [EdgeKind::Main, EdgeKind::Casual, EdgeKind::OneTime];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            EdgeKind::Main => "main",
            EdgeKind::Casual => "casual",
            EdgeKind::OneTime => "onetime",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "main" => Some(EdgeKind::Main),
            "casual" => Some(EdgeKind::Casual),
            "onetime" | "one_time" | "one-time" => Some(EdgeKind::OneTime),
            _ => None,
        }
    }
}

/// Population plus its evolving partnerships, owned by a single replicate.
#[derive(Clone, Debug)]
pub struct ContactNetwork {
    pub population: Population,
    pub partnerships: PartnershipSet,
    pub rewiring: RewiringState,
    durations: DurationModel,
}

impl ContactNetwork {
    /// Creates the population and its day-0 partnerships.
    pub fn generate(
        n: usize,
        params: &NetworkParams,
        record_log: bool,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let population = create_population(n, params, rng)?;
        Self::from_population(population, params, record_log, rng)
    }

    pub fn from_population(
        population: Population,
        params: &NetworkParams,
        record_log: bool,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let durations = DurationModel::new(params)?;
        let (partnerships, rewiring) = init_relationships(&population, &durations, record_log, rng);
        Ok(Self {
            population,
            partnerships,
            rewiring,
            durations,
        })
    }

    /// Produces the snapshot for `day`: fresh one-time edges, then persistent
    /// aging and rewiring.
    pub fn step(&mut self, day: Day, rng: &mut RngStream) {
        update_onetime(&self.population, &mut self.partnerships, day, rng);
        update_persistent(
            &mut self.partnerships,
            &mut self.rewiring,
            &self.durations,
            day,
            rng,
        );
    }

    pub fn len(&self) -> usize {
        self.population.len()
    }

    pub fn is_empty(&self) -> bool {
        self.population.is_empty()
    }
}

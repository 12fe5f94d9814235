//! The daily simulation loop.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::epidemic::{EpidemicModel, HealthLedger, InfectionRecord};
use crate::error::Result;
use crate::interventions::{apply_behavior_change, load_dose_schedule, DoseSchedule, VaccinationProgram, VaccineStatus};
use crate::network::{ContactNetwork, EdgeKind, EdgeLog, RelClass, RewiringStats, Stratum};
use crate::rng::RngStream;
use crate::Day;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayCounts {
    pub day: Day,
    pub s: usize,
    pub e: usize,
    pub i: usize,
    pub r: usize,
    /// Ever infected through this day, seeds included.
    pub cumulative: usize,
}

/// Per-node attributes and outcomes at the end of a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodeTable {
    pub rel_class: Vec<RelClass>,
    pub stratum: Vec<Stratum>,
    pub seeks_care: Vec<bool>,
    pub infectious_from: Vec<Option<Day>>,
    pub recovered_on: Vec<Option<Day>>,
    pub diagnosis_day: Vec<Option<Day>>,
    pub vaccine: Vec<VaccineStatus>,
    /// Realized contacts with an infectious partner, by edge kind.
    pub contacts: Vec<[u32; 3]>,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub scenario: String,
    pub seed: u64,
    pub stream_id: u64,
    pub population: usize,
    pub horizon: u32,
    pub initial: DayCounts,
    /// Days `1..=horizon`; days after an early stop repeat the final state.
    pub daily: Vec<DayCounts>,
    pub infections: Vec<InfectionRecord>,
    pub nodes: NodeTable,
    /// Main and casual rewiring counters.
    pub rewiring: [RewiringStats; 2],
    pub doses_given: [u64; 2],
    /// First day the loop found no exposed or infectious node.
    pub stopped_on: Option<Day>,
    pub edge_log: Option<EdgeLog>,
    pub runtime: Duration,
}

impl RunResult {
    pub fn final_counts(&self) -> DayCounts {
        self.daily.last().copied().unwrap_or(self.initial)
    }

    /// Percent of the population ever infected by the horizon.
    pub fn final_percent(&self) -> f64 {
        100.0 * self.final_counts().cumulative as f64 / self.population as f64
    }

    pub fn cumulative_percent(&self) -> Vec<f64> {
        let n = self.population as f64;
        self.daily.iter().map(|d| 100.0 * d.cumulative as f64 / n).collect()
    }

    pub fn seeds(&self) -> impl Iterator<Item = &InfectionRecord> {
        self.infections.iter().filter(|r| r.source.is_none())
    }

    pub fn rewiring_stats(&self, kind: EdgeKind) -> RewiringStats {
        match kind {
            EdgeKind::Main => self.rewiring[0],
            EdgeKind::Casual => self.rewiring[1],
            EdgeKind::OneTime => RewiringStats::default(),
        }
    }
}

/// A validated configuration with its dose schedule loaded once, shared by
/// every replicate.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    model: EpidemicModel,
    schedule: Option<DoseSchedule>,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let model = EpidemicModel::new(config.epidemic.clone())?;
        let schedule = match &config.vaccination {
            None => None,
            Some(v) => Some(load_dose_schedule(&v.weekly_doses()?, config.population, &v.scaling())?),
        };
        Ok(Self {
            config,
            model,
            schedule,
        })
    }

    pub fn schedule(&self) -> Option<&DoseSchedule> {
        self.schedule.as_ref()
    }

    /// Runs one replicate on random stream `stream_id`.
    pub fn run(&self, stream_id: u64) -> Result<RunResult> {
        let started = Instant::now();
        let cfg = &self.config;
        let mut rng = RngStream::new(cfg.seed, stream_id);
        let mut net = ContactNetwork::generate(cfg.population, &cfg.network, cfg.record_edges, &mut rng)?;
        let n = net.len();
        let mut ledger = HealthLedger::new(n, cfg.epidemic.care_seeking, &mut rng);

        let mut program = match &cfg.vaccination {
            Some(policy) => Some(VaccinationProgram::new(policy, &net.population, &mut rng)?),
            None => None,
        };
        let empty = DoseSchedule {
            first: Vec::new(),
            second: Vec::new(),
        };
        let schedule = self.schedule.as_ref().unwrap_or(&empty);

        // rollout that starts before the outbreak; the network stays frozen
        if let Some(p) = program.as_mut() {
            for day in p.start_day()..=0 {
                p.vaccinate_step(schedule, &mut ledger, day, &mut rng);
            }
        }
        let bc = cfg.behavior_change.as_ref();
        if let Some(policy) = bc.filter(|b| b.start_day <= 0) {
            apply_behavior_change(&mut net.population, policy);
        }

        let mut infections = self.model.seed_infections(&net.population, &mut ledger, 0, &mut rng)?;
        let counts = |ledger: &HealthLedger, day: Day| {
            let [s, e, i, r] = ledger.counts();
            DayCounts {
                day,
                s,
                e,
                i,
                r,
                cumulative: ledger.cumulative(),
            }
        };
        let initial = counts(&ledger, 0);
        let mut contacts = vec![[0u32; 3]; n];
        let mut daily = Vec::with_capacity(cfg.horizon as usize);
        let mut stopped_on = None;

        for t in 1..=cfg.horizon as Day {
            if ledger.active() == 0 {
                stopped_on = Some(t);
                break;
            }
            if let Some(policy) = bc.filter(|b| b.start_day == t) {
                apply_behavior_change(&mut net.population, policy);
            }
            if let Some(p) = program.as_mut() {
                p.vaccinate_step(schedule, &mut ledger, t, &mut rng);
            }
            self.model.advance_disease(&mut ledger, t, &mut rng);
            let new = self.model.contact_and_transmit(
                net.partnerships.live_edges(),
                &mut ledger,
                t,
                &mut rng,
                &mut contacts,
            );
            infections.extend(new);
            net.step(t, &mut rng);
            daily.push(counts(&ledger, t));
        }
        let last = daily.last().copied().unwrap_or(initial);
        for t in daily.len() as Day + 1..=cfg.horizon as Day {
            daily.push(DayCounts { day: t, ..last });
        }

        let doses_given = program.as_ref().map_or([0, 0], |p| p.administered);
        let nodes = NodeTable {
            rel_class: net.population.nodes().iter().map(|p| p.rel_class).collect(),
            stratum: net.population.nodes().iter().map(|p| p.stratum).collect(),
            seeks_care: ledger.seeks_care_flags().to_vec(),
            infectious_from: ledger.infectious_from().to_vec(),
            recovered_on: ledger.recovered_on().to_vec(),
            diagnosis_day: ledger.diagnosis_days().to_vec(),
            vaccine: ledger.vaccine.clone(),
            contacts,
        };
        let rewiring = [
            net.rewiring.stats(EdgeKind::Main),
            net.rewiring.stats(EdgeKind::Casual),
        ];
        Ok(RunResult {
            scenario: cfg.name.clone(),
            seed: cfg.seed,
            stream_id,
            population: n,
            horizon: cfg.horizon,
            initial,
            daily,
            infections,
            nodes,
            rewiring,
            doses_given,
            stopped_on,
            edge_log: net.partnerships.take_log(),
            runtime: started.elapsed(),
        })
    }
}

/// Validates `config` and runs a single replicate.
pub fn run_simulation(config: &ScenarioConfig, stream_id: u64) -> Result<RunResult> {
    Scenario::new(config.clone())?.run(stream_id)
}

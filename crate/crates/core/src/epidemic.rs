//! Daily discrete-time SEIR process over the live edge set.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interventions::VaccineStatus;
use crate::network::{EdgeKind, Population};
use crate::rng::{RngStream, StageDuration};
use crate::{Day, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HealthState {
    Susceptible,
    Exposed,
    Infectious,
    Recovered,
}

impl HealthState {
    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsolationMode {
    /// Diagnosed nodes stop all contact.
    #[default]
    Full,
    /// Diagnosed nodes drop one-time partners and halve contact with the rest.
    Partial,
}

/// Contact-probability factor for an infectious node on an edge of `kind`.
pub fn isolation_multiplier(isolating: bool, kind: EdgeKind, mode: IsolationMode) -> f64 {
    if !isolating {
        return 1.0;
    }
    match (mode, kind) {
        (IsolationMode::Full, _) => 0.0,
        (IsolationMode::Partial, EdgeKind::OneTime) => 0.0,
        (IsolationMode::Partial, _) => 0.5,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageParams {
    pub mean: f64,
    pub sd: f64,
}

/// Days from becoming infectious to diagnosis: starts at `initial_days` and
/// drops by one every `step_days` simulation days, down to `floor_days`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosisDelay {
    pub initial_days: i32,
    pub step_days: i32,
    pub floor_days: i32,
}

impl Default for DiagnosisDelay {
    fn default() -> Self {
        Self {
            initial_days: 15,
            step_days: 4,
            floor_days: 5,
        }
    }
}

impl DiagnosisDelay {
    pub fn on(&self, day: Day) -> i32 {
        let elapsed = day.max(0) / self.step_days;
        (self.initial_days - elapsed).max(self.floor_days)
    }
}

/// `max(5, 15 - floor(day / 4))`.
pub fn diagnosis_delay(day: Day) -> i32 {
    DiagnosisDelay::default().on(day)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpidemicParams {
    /// Transmission probability per sexual contact.
    pub beta: f64,
    pub contact_main: f64,
    pub contact_casual: f64,
    pub contact_onetime: f64,
    pub exposed: StageParams,
    pub infectious: StageParams,
    pub seed_fraction: f64,
    /// Strata that initial infections are drawn from.
    pub seed_strata: Vec<u8>,
    pub care_seeking: f64,
    pub diagnosis: DiagnosisDelay,
    pub isolation: IsolationMode,
}

impl Default for EpidemicParams {
    fn default() -> Self {
        Self {
            beta: 0.9,
            contact_main: 0.22,
            contact_casual: 0.14,
            contact_onetime: 1.0,
            exposed: StageParams { mean: 7.0, sd: 1.0 },
            infectious: StageParams { mean: 27.0, sd: 3.0 },
            seed_fraction: 0.001,
            seed_strata: vec![5, 6],
            care_seeking: 0.8,
            diagnosis: DiagnosisDelay::default(),
            isolation: IsolationMode::Full,
        }
    }
}

impl EpidemicParams {
    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("beta", self.beta),
            ("contact_main", self.contact_main),
            ("contact_casual", self.contact_casual),
            ("contact_onetime", self.contact_onetime),
            ("seed_fraction", self.seed_fraction),
            ("care_seeking", self.care_seeking),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{name} = {p} is not a probability")));
            }
        }
        StageDuration::new(self.exposed.mean, self.exposed.sd)?;
        StageDuration::new(self.infectious.mean, self.infectious.sd)?;
        if self.diagnosis.step_days <= 0 || self.diagnosis.floor_days < 0 {
            return Err(Error::config("diagnosis delay needs step_days > 0 and floor_days >= 0"));
        }
        for &s in &self.seed_strata {
            crate::network::Stratum::new(s)?;
        }
        Ok(())
    }

    pub fn contact_probability(&self, kind: EdgeKind) -> f64 {
        match kind {
            EdgeKind::Main => self.contact_main,
            EdgeKind::Casual => self.contact_casual,
            EdgeKind::OneTime => self.contact_onetime,
        }
    }
}

/// One infection event. Seeds carry neither a source nor an edge kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfectionRecord {
    pub source: Option<NodeId>,
    pub target: NodeId,
    pub day: Day,
    pub kind: Option<EdgeKind>,
}

/// Per-node health and care state for one replicate.
#[derive(Clone, Debug)]
pub struct HealthLedger {
    state: Vec<HealthState>,
    days_left_exposed: Vec<u32>,
    days_left_infectious: Vec<u32>,
    seeks_care: Vec<bool>,
    infectious_from: Vec<Option<Day>>,
    recovered_on: Vec<Option<Day>>,
    diagnosis_day: Vec<Option<Day>>,
    pub vaccine: Vec<VaccineStatus>,
    counts: [usize; 4],
    cumulative: usize,
}

impl HealthLedger {
    /// All nodes susceptible; care-seeking is drawn once per node.
    pub fn new(n: usize, care_seeking: f64, rng: &mut RngStream) -> Self {
        let seeks_care = (0..n).map(|_| rng.bernoulli(care_seeking)).collect();
        Self::with_care_seeking(seeks_care)
    }

    pub fn with_care_seeking(seeks_care: Vec<bool>) -> Self {
        let n = seeks_care.len();
        Self {
            state: vec![HealthState::Susceptible; n],
            days_left_exposed: vec![0; n],
            days_left_infectious: vec![0; n],
            seeks_care,
            infectious_from: vec![None; n],
            recovered_on: vec![None; n],
            diagnosis_day: vec![None; n],
            vaccine: vec![VaccineStatus::default(); n],
            counts: [n, 0, 0, 0],
            cumulative: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    pub fn state(&self, id: NodeId) -> HealthState {
        self.state[id as usize]
    }

    pub fn states(&self) -> &[HealthState] {
        &self.state
    }

    pub fn seeks_care(&self, id: NodeId) -> bool {
        self.seeks_care[id as usize]
    }

    pub fn days_left_exposed(&self, id: NodeId) -> u32 {
        self.days_left_exposed[id as usize]
    }

    pub fn days_left_infectious(&self, id: NodeId) -> u32 {
        self.days_left_infectious[id as usize]
    }

    pub fn diagnosis_day(&self, id: NodeId) -> Option<Day> {
        self.diagnosis_day[id as usize]
    }

    pub fn infectious_from(&self) -> &[Option<Day>] {
        &self.infectious_from
    }

    pub fn recovered_on(&self) -> &[Option<Day>] {
        &self.recovered_on
    }

    pub fn diagnosis_days(&self) -> &[Option<Day>] {
        &self.diagnosis_day
    }

    pub fn seeks_care_flags(&self) -> &[bool] {
        &self.seeks_care
    }

    pub fn is_isolating(&self, id: NodeId, day: Day) -> bool {
        let i = id as usize;
        self.state[i] == HealthState::Infectious && self.diagnosis_day[i].is_some_and(|d| day >= d)
    }

    /// `[S, E, I, R]` counts.
    pub fn counts(&self) -> [usize; 4] {
        self.counts
    }

    /// Nodes ever infected, seeds included.
    pub fn cumulative(&self) -> usize {
        self.cumulative
    }

    pub fn active(&self) -> usize {
        self.counts[1] + self.counts[2]
    }

    fn set_state(&mut self, i: usize, next: HealthState) {
        self.counts[self.state[i].slot()] -= 1;
        self.counts[next.slot()] += 1;
        self.state[i] = next;
    }

    fn become_infectious(&mut self, i: usize, day: Day, duration: u32, delay: &DiagnosisDelay) {
        self.set_state(i, HealthState::Infectious);
        self.days_left_infectious[i] = duration;
        self.infectious_from[i] = Some(day);
        if self.seeks_care[i] {
            self.diagnosis_day[i] = Some(day + delay.on(day));
        }
    }

    /// Puts a node directly into the exposed state with the given timer.
    pub fn expose(&mut self, id: NodeId, days: u32) {
        let i = id as usize;
        debug_assert_eq!(self.state[i], HealthState::Susceptible);
        self.set_state(i, HealthState::Exposed);
        self.days_left_exposed[i] = days.max(1);
        self.cumulative += 1;
    }
}

/// Transition tallies for one day.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Transitions {
    pub became_infectious: usize,
    pub recovered: usize,
}

/// At-risk contact counts per node, by edge kind.
pub type ContactCounts = Vec<[u32; 3]>;

/// Epidemic parameters bound to their validated samplers.
#[derive(Clone, Debug)]
pub struct EpidemicModel {
    pub params: EpidemicParams,
    exposed: StageDuration,
    infectious: StageDuration,
}

impl EpidemicModel {
    pub fn new(params: EpidemicParams) -> Result<Self> {
        params.validate()?;
        let exposed = StageDuration::new(params.exposed.mean, params.exposed.sd)?;
        let infectious = StageDuration::new(params.infectious.mean, params.infectious.sd)?;
        Ok(Self {
            params,
            exposed,
            infectious,
        })
    }

    /// Seeds `round(seed_fraction * N)` infectious nodes drawn uniformly from
    /// the seed strata.
    pub fn seed_infections(
        &self,
        pop: &Population,
        ledger: &mut HealthLedger,
        day: Day,
        rng: &mut RngStream,
    ) -> Result<Vec<InfectionRecord>> {
        let count = (self.params.seed_fraction * pop.len() as f64).round() as usize;
        let pool: Vec<NodeId> = pop
            .nodes()
            .iter()
            .filter(|n| self.params.seed_strata.contains(&n.stratum.level()))
            .map(|n| n.id)
            .collect();
        if pool.len() < count {
            return Err(Error::config(format!(
                "{count} seed infections requested but only {} nodes in strata {:?}",
                pool.len(),
                self.params.seed_strata
            )));
        }
        let mut chosen: Vec<NodeId> = index::sample(rng, pool.len(), count)
            .into_iter()
            .map(|k| pool[k])
            .collect();
        chosen.sort_unstable();
        let mut records = Vec::with_capacity(count);
        for &id in &chosen {
            let i = id as usize;
            let duration = self.infectious.sample(rng);
            ledger.cumulative += 1;
            ledger.become_infectious(i, day, duration, &self.params.diagnosis);
            records.push(InfectionRecord {
                source: None,
                target: id,
                day,
                kind: None,
            });
        }
        Ok(records)
    }

    /// Ages stage timers and applies E→I and I→R transitions.
    pub fn advance_disease(&self, ledger: &mut HealthLedger, day: Day, rng: &mut RngStream) -> Transitions {
        let mut t = Transitions::default();
        for i in 0..ledger.len() {
            match ledger.state[i] {
                HealthState::Exposed => {
                    ledger.days_left_exposed[i] = ledger.days_left_exposed[i].saturating_sub(1);
                    if ledger.days_left_exposed[i] == 0 {
                        let duration = self.infectious.sample(rng);
                        ledger.become_infectious(i, day, duration, &self.params.diagnosis);
                        t.became_infectious += 1;
                    }
                }
                HealthState::Infectious => {
                    ledger.days_left_infectious[i] = ledger.days_left_infectious[i].saturating_sub(1);
                    if ledger.days_left_infectious[i] == 0 {
                        ledger.set_state(i, HealthState::Recovered);
                        ledger.recovered_on[i] = Some(day);
                        t.recovered += 1;
                    }
                }
                _ => {}
            }
        }
        t
    }

    /// Evaluates every serodiscordant edge once: contact with probability
    /// `pi_kind * isolation`, then transmission with probability
    /// `beta * susceptibility`. New exposures take effect immediately, so a
    /// node exposed earlier in the day is skipped by later edges.
    pub fn contact_and_transmit(
        &self,
        edges: impl Iterator<Item = (NodeId, NodeId, EdgeKind)>,
        ledger: &mut HealthLedger,
        day: Day,
        rng: &mut RngStream,
        contacts: &mut ContactCounts,
    ) -> Vec<InfectionRecord> {
        let mut records = Vec::new();
        for (a, b, kind) in edges {
            let (source, target) = match (ledger.state(a), ledger.state(b)) {
                (HealthState::Infectious, HealthState::Susceptible) => (a, b),
                (HealthState::Susceptible, HealthState::Infectious) => (b, a),
                _ => continue,
            };
            let iso = isolation_multiplier(ledger.is_isolating(source, day), kind, self.params.isolation);
            let p_contact = self.params.contact_probability(kind) * iso;
            if !rng.bernoulli(p_contact) {
                continue;
            }
            contacts[target as usize][kind.index()] += 1;
            let susceptibility = ledger.vaccine[target as usize].susceptibility;
            if rng.bernoulli(self.params.beta * susceptibility) {
                let days = self.exposed.sample(rng);
                ledger.expose(target, days);
                records.push(InfectionRecord {
                    source: Some(source),
                    target,
                    day,
                    kind: Some(kind),
                });
            }
        }
        records
    }
}

//! Scenario configuration, named presets and TOML loading.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::epidemic::{EpidemicParams, IsolationMode, StageParams};
use crate::error::{Error, Result};
use crate::interventions::{BehaviorChangePolicy, Targeting, VaccinationPolicy};
use crate::network::NetworkParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub population: usize,
    pub horizon: u32,
    /// Key for every random stream in the scenario.
    pub seed: u64,
    pub replicates: usize,
    /// Keep the full edge lifetime log (needed for window-graph statistics).
    pub record_edges: bool,
    pub network: NetworkParams,
    pub epidemic: EpidemicParams,
    pub behavior_change: Option<BehaviorChangePolicy>,
    pub vaccination: Option<VaccinationPolicy>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "baseline".into(),
            population: 10_000,
            horizon: 250,
            seed: 1,
            replicates: 100,
            record_edges: false,
            network: NetworkParams::default(),
            epidemic: EpidemicParams::default(),
            behavior_change: None,
            vaccination: None,
        }
    }
}

pub const PRESETS: &[&str] = &[
    "baseline",
    "universal_bc",
    "universal_bc_vax",
    "targeted",
    "partial_isolation",
    "partial_isolation_intervention",
    "partial_isolation_targeted",
    "early_vaccination",
    "optimistic",
    "optimistic_intervention",
    "pessimistic",
    "pessimistic_intervention",
    "low_beta",
    "low_beta_intervention",
    "optimistic_low_beta",
    "optimistic_low_beta_intervention",
    "pessimistic_low_beta",
    "pessimistic_low_beta_intervention",
];

fn bc(targeting: Targeting) -> BehaviorChangePolicy {
    BehaviorChangePolicy {
        start_day: 70,
        reduction: 0.5,
        targeting,
    }
}

fn vax(targeting: Targeting) -> VaccinationPolicy {
    VaccinationPolicy {
        start_day: 30,
        targeting,
        ..VaccinationPolicy::default()
    }
}

impl ScenarioConfig {
    /// Looks up a named scenario.
    pub fn preset(name: &str) -> Result<Self> {
        let mut c = ScenarioConfig {
            name: name.to_string(),
            ..Default::default()
        };
        let (clinical, rest) = match name.split_once('_') {
            Some((head @ ("optimistic" | "pessimistic"), tail)) => (Some(head), Some(tail)),
            _ if name == "optimistic" || name == "pessimistic" => (Some(name), None),
            _ => (None, Some(name)),
        };
        match clinical {
            Some("optimistic") => {
                c.epidemic.exposed = StageParams { mean: 5.6, sd: 1.0 };
                c.epidemic.infectious = StageParams { mean: 14.0, sd: 3.0 };
            }
            Some(_) => {
                c.epidemic.exposed = StageParams { mean: 9.9, sd: 1.0 };
                c.epidemic.infectious = StageParams { mean: 28.0, sd: 3.0 };
            }
            None => {}
        }
        let rest = match rest {
            None => "",
            Some(r) => match r.strip_prefix("low_beta") {
                Some(tail) => {
                    c.epidemic.beta = 0.5;
                    tail.trim_start_matches('_')
                }
                None => r,
            },
        };
        match rest {
            "" | "baseline" => {}
            "intervention" if clinical.is_some() || c.epidemic.beta != 0.9 => {
                c.behavior_change = Some(bc(Targeting::Universal));
                c.vaccination = Some(vax(Targeting::Universal));
            }
            "universal_bc" => c.behavior_change = Some(bc(Targeting::Universal)),
            "universal_bc_vax" => {
                c.behavior_change = Some(bc(Targeting::Universal));
                c.vaccination = Some(vax(Targeting::Universal));
            }
            "targeted" => {
                c.behavior_change = Some(bc(Targeting::top_strata()));
                c.vaccination = Some(vax(Targeting::top_strata()));
            }
            "partial_isolation" => c.epidemic.isolation = IsolationMode::Partial,
            "partial_isolation_intervention" => {
                c.epidemic.isolation = IsolationMode::Partial;
                c.behavior_change = Some(bc(Targeting::Universal));
                c.vaccination = Some(vax(Targeting::Universal));
            }
            "partial_isolation_targeted" => {
                c.epidemic.isolation = IsolationMode::Partial;
                c.behavior_change = Some(bc(Targeting::top_strata()));
                c.vaccination = Some(vax(Targeting::top_strata()));
            }
            "early_vaccination" => {
                c.behavior_change = Some(bc(Targeting::top_strata()));
                c.vaccination = Some(VaccinationPolicy {
                    start_day: -365,
                    targeting: Targeting::top_strata(),
                    ..VaccinationPolicy::default()
                });
            }
            _ => {
                return Err(Error::config(format!(
                    "unknown preset {name:?}; known presets: {}",
                    PRESETS.join(", ")
                )))
            }
        }
        Ok(c)
    }

    /// Parses a scenario file. A top-level `preset = "..."` key starts from
    /// that preset and the remaining keys override it.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut value: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config(format!("scenario file: {e}")))?;
        let base = match value.remove("preset") {
            None => None,
            Some(toml::Value::String(name)) => Some(Self::preset(&name)?),
            Some(other) => return Err(Error::config(format!("preset must be a string, got {other}"))),
        };
        let merged = match base {
            None => value,
            Some(base) => {
                let mut b = toml::Table::try_from(&base).map_err(|e| Error::config(e.to_string()))?;
                merge(&mut b, value);
                b
            }
        };
        let config: Self = merged
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(format!("scenario file: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Complete parameter dump, loadable with [`ScenarioConfig::from_toml_str`].
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::config("population must be at least 2"));
        }
        if self.horizon < 1 {
            return Err(Error::config("horizon must be at least 1 day"));
        }
        if self.replicates < 1 {
            return Err(Error::config("replicates must be at least 1"));
        }
        self.network.validate()?;
        self.epidemic.validate()?;
        if let Some(b) = &self.behavior_change {
            b.validate()?;
        }
        if let Some(v) = &self.vaccination {
            v.validate()?;
        }
        Ok(())
    }
}

// Tables merge key by key; anything else in `over` replaces `base`.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

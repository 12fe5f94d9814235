use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{sample_count_geometric, Categorical, CountGeometric, RngStream};
use crate::NodeId;

/// Target concurrent (main, casual) partner counts, one of six classes.
///
/// Index order follows the survey table: (0,0), (0,1), (0,2), (1,0), (1,1), (1,2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelClass(u8);

impl RelClass {
    pub const COUNT: usize = 6;

    pub fn new(index: usize) -> Result<Self> {
        if index < Self::COUNT {
            Ok(Self(index as u8))
        } else {
            Err(Error::config(format!("relationship class {index} out of range")))
        }
    }

    pub fn from_targets(main: u8, casual: u8) -> Result<Self> {
        if main > 1 || casual > 2 {
            return Err(Error::config(format!(
                "no relationship class with {main} main and {casual} casual partners"
            )));
        }
        Ok(Self(main * 3 + casual))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn main_target(self) -> u8 {
        self.0 / 3
    }

    pub fn casual_target(self) -> u8 {
        self.0 % 3
    }

    pub fn label(self) -> String {
        format!("{}M{}C", self.main_target(), self.casual_target())
    }

    pub fn all() -> impl Iterator<Item = RelClass> {
        (0..Self::COUNT as u8).map(RelClass)
    }
}

/// Sexual-activity stratum, 1 through 6.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Stratum(u8);

impl Stratum {
    pub const COUNT: usize = 6;

    pub fn new(level: u8) -> Result<Self> {
        if (1..=Self::COUNT as u8).contains(&level) {
            Ok(Self(level))
        } else {
            Err(Error::config(format!("stratum {level} outside 1..=6")))
        }
    }

    pub fn level(self) -> u8 {
        self.0
    }

    /// Zero-based position, for table lookups.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> impl Iterator<Item = Stratum> {
        (1..=Self::COUNT as u8).map(Stratum)
    }
}

impl TryFrom<u8> for Stratum {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        Stratum::new(v)
    }
}

impl From<Stratum> for u8 {
    fn from(s: Stratum) -> u8 {
        s.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeProfile {
    pub id: NodeId,
    pub rel_class: RelClass,
    pub stratum: Stratum,
    /// Current daily one-time propensity; lowered by behavior change.
    pub p_onetime: f64,
    pub p_onetime_base: f64,
}

/// Survey-derived network composition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkParams {
    pub rel_class_weights: [f64; RelClass::COUNT],
    pub stratum_weights: [f64; Stratum::COUNT],
    pub stratum_onetime_prob: [f64; Stratum::COUNT],
    pub main_mean_days: f64,
    pub casual_mean_days: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            rel_class_weights: [0.471, 0.167, 0.074, 0.22, 0.047, 0.021],
            stratum_weights: [0.19, 0.19, 0.19, 0.19, 0.19, 0.05],
            stratum_onetime_prob: [0.0, 0.001, 0.0054, 0.0101, 0.0315, 0.286],
            main_mean_days: 407.0,
            casual_mean_days: 166.0,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        Categorical::new(&self.rel_class_weights)?;
        Categorical::new(&self.stratum_weights)?;
        for &p in &self.stratum_onetime_prob {
            CountGeometric::new(p)?;
        }
        crate::rng::DurationGeometric::new(self.main_mean_days)?;
        crate::rng::DurationGeometric::new(self.casual_mean_days)?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Population {
    nodes: Vec<NodeProfile>,
    // ln(p_onetime) per node, kept in step with `nodes`
    ln_onetime: Vec<f64>,
    /// One-time stub counts drawn alongside the initial assignment.
    pub initial_onetime: Vec<u32>,
}

impl Population {
    /// Builds a population from explicit profiles. `p_onetime` must not exceed
    /// `p_onetime_base`, and both must lie in `[0, 1)`.
    pub fn from_profiles(nodes: Vec<NodeProfile>, initial_onetime: Vec<u32>) -> Result<Self> {
        if initial_onetime.len() != nodes.len() {
            return Err(Error::config("one initial one-time count per node required"));
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.id as usize != i {
                return Err(Error::config(format!("node at position {i} has id {}", node.id)));
            }
            if !(0.0..1.0).contains(&node.p_onetime_base)
                || !(0.0..=node.p_onetime_base).contains(&node.p_onetime)
            {
                return Err(Error::config(format!(
                    "node {i}: one-time propensity {} / base {} invalid",
                    node.p_onetime, node.p_onetime_base
                )));
            }
        }
        let ln_onetime = nodes.iter().map(|n| n.p_onetime.ln()).collect();
        Ok(Self {
            nodes,
            ln_onetime,
            initial_onetime,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeProfile] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NodeProfile {
        &self.nodes[id as usize]
    }

    pub fn set_p_onetime(&mut self, id: NodeId, p: f64) {
        let node = &mut self.nodes[id as usize];
        debug_assert!(p >= 0.0 && p <= node.p_onetime_base);
        node.p_onetime = p;
        self.ln_onetime[id as usize] = p.ln();
    }

    /// Total main, casual and initial one-time stubs.
    pub fn stub_sums(&self) -> (u64, u64, u64) {
        let main = self.nodes.iter().map(|n| n.rel_class.main_target() as u64).sum();
        let casual = self.nodes.iter().map(|n| n.rel_class.casual_target() as u64).sum();
        let onetime = self.initial_onetime.iter().map(|&k| k as u64).sum();
        (main, casual, onetime)
    }

    /// Draws today's one-time partner count for every node.
    pub(crate) fn draw_onetime_counts(&self, rng: &mut RngStream, out: &mut Vec<u32>) {
        out.clear();
        out.extend(
            self.ln_onetime
                .iter()
                .map(|&ln_p| sample_count_geometric(ln_p, rng)),
        );
    }
}

/// Assigns relationship classes, strata and initial one-time counts to `n`
/// nodes, redrawing everything until all three stub totals are even.
pub fn create_population(n: usize, params: &NetworkParams, rng: &mut RngStream) -> Result<Population> {
    if n < 2 {
        return Err(Error::config(format!("population needs at least 2 nodes, got {n}")));
    }
    if n > NodeId::MAX as usize {
        return Err(Error::config(format!("population {n} exceeds node id range")));
    }
    params.validate()?;
    let rel_dist = Categorical::new(&params.rel_class_weights)?;
    let stratum_dist = Categorical::new(&params.stratum_weights)?;
    let ln_p: Vec<f64> = params.stratum_onetime_prob.iter().map(|p| p.ln()).collect();

    let mut rel = vec![RelClass(0); n];
    let mut strata = vec![Stratum(1); n];
    let mut onetime = vec![0u32; n];
    loop {
        let (mut main_sum, mut casual_sum, mut onetime_sum) = (0u64, 0u64, 0u64);
        for i in 0..n {
            let r = RelClass(rel_dist.sample(rng) as u8);
            let s = Stratum(stratum_dist.sample(rng) as u8 + 1);
            let k = sample_count_geometric(ln_p[s.index()], rng);
            main_sum += r.main_target() as u64;
            casual_sum += r.casual_target() as u64;
            onetime_sum += k as u64;
            rel[i] = r;
            strata[i] = s;
            onetime[i] = k;
        }
        if main_sum % 2 == 0 && casual_sum % 2 == 0 && onetime_sum % 2 == 0 {
            break;
        }
    }

    let nodes = (0..n)
        .map(|i| {
            let p = params.stratum_onetime_prob[strata[i].index()];
            NodeProfile {
                id: i as NodeId,
                rel_class: rel[i],
                stratum: strata[i],
                p_onetime: p,
                p_onetime_base: p,
            }
        })
        .collect();
    Population::from_profiles(nodes, onetime)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_class_targets() {
        let expected = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)];
        for (class, (m, c)) in RelClass::all().zip(expected) {
            assert_eq!((class.main_target(), class.casual_target()), (m, c));
            assert_eq!(RelClass::from_targets(m, c).unwrap(), class);
        }
        assert!(RelClass::from_targets(2, 0).is_err());
    }

    #[test]
    fn stratum_bounds() {
        assert!(Stratum::new(0).is_err());
        assert!(Stratum::new(7).is_err());
        assert_eq!(Stratum::new(6).unwrap().index(), 5);
    }

    #[test]
    fn rejects_tiny_population() {
        let mut rng = RngStream::new(0, 0);
        assert!(create_population(1, &NetworkParams::default(), &mut rng).is_err());
    }

    #[test]
    fn composition_matches_survey_mix() {
        let mut rng = RngStream::new(11, 0);
        let pop = create_population(10_000, &NetworkParams::default(), &mut rng).unwrap();
        let none = pop.nodes().iter().filter(|n| n.rel_class.index() == 0).count();
        assert!((none as i64 - 4710).abs() <= 150, "{none}");
        let top = pop.nodes().iter().filter(|n| n.stratum.level() == 6).count();
        assert!((top as i64 - 500).abs() <= 70, "{top}");
    }

    #[test]
    fn stub_sums_are_even_and_propensities_match_strata() {
        let params = NetworkParams::default();
        for seed in 0..20 {
            let mut rng = RngStream::new(seed, 3);
            let pop = create_population(501, &params, &mut rng).unwrap();
            let (m, c, o) = pop.stub_sums();
            assert_eq!((m % 2, c % 2, o % 2), (0, 0, 0));
            for node in pop.nodes() {
                assert_eq!(node.p_onetime_base, params.stratum_onetime_prob[node.stratum.index()]);
                assert_eq!(node.p_onetime, node.p_onetime_base);
            }
        }
    }

    #[test]
    fn forced_pair_of_main_seekers() {
        let class = RelClass::from_targets(1, 0).unwrap();
        let nodes = (0..2)
            .map(|id| NodeProfile {
                id,
                rel_class: class,
                stratum: Stratum::new(1).unwrap(),
                p_onetime: 0.0,
                p_onetime_base: 0.0,
            })
            .collect();
        let pop = Population::from_profiles(nodes, vec![0, 0]).unwrap();
        assert_eq!(pop.stub_sums(), (2, 0, 0));
    }

    #[test]
    fn profiles_reject_raised_propensity() {
        let nodes = vec![NodeProfile {
            id: 0,
            rel_class: RelClass::new(0).unwrap(),
            stratum: Stratum::new(2).unwrap(),
            p_onetime: 0.5,
            p_onetime_base: 0.001,
        }];
        assert!(Population::from_profiles(nodes, vec![0]).is_err());
    }
}

//! Behavior change and two-dose vaccination.

use std::io::Read;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::epidemic::{HealthLedger, HealthState};
use crate::error::{Error, Result};
use crate::network::{Population, Stratum};
use crate::rng::{Categorical, RngStream};
use crate::{Day, NodeId};

const BUNDLED_DOSES: &str = include_str!("../data/jynneos_weekly_doses.csv");

/// Which nodes an intervention reaches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Targeting {
    #[serde(alias = "random")]
    Universal,
    /// Listed strata first. Vaccination falls back to everyone else once the
    /// targeted pool is exhausted.
    Strata(Vec<u8>),
}

impl Targeting {
    pub fn top_strata() -> Self {
        Targeting::Strata(vec![5, 6])
    }

    pub fn includes(&self, stratum: Stratum) -> bool {
        match self {
            Targeting::Universal => true,
            Targeting::Strata(levels) => levels.contains(&stratum.level()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Targeting::Strata(levels) = self {
            if levels.is_empty() {
                return Err(Error::config("targeted strata list is empty"));
            }
            for &s in levels {
                Stratum::new(s)?;
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            Targeting::Universal => "universal".into(),
            Targeting::Strata(levels) => {
                let s: Vec<String> = levels.iter().map(|l| l.to_string()).collect();
                format!("strata_{}", s.join("_"))
            }
        }
    }
}

/// Reduction of the daily one-time propensity from `start_day` on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorChangePolicy {
    pub start_day: Day,
    pub reduction: f64,
    pub targeting: Targeting,
}

impl BehaviorChangePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.reduction) {
            return Err(Error::config(format!(
                "behavior change reduction {} outside [0, 1]",
                self.reduction
            )));
        }
        self.targeting.validate()
    }
}

/// Sets `p_onetime = p_onetime_base * (1 - reduction)` on targeted nodes.
/// Returns how many nodes were touched.
pub fn apply_behavior_change(pop: &mut Population, policy: &BehaviorChangePolicy) -> usize {
    let factor = 1.0 - policy.reduction;
    let targets: Vec<(NodeId, f64)> = pop
        .nodes()
        .iter()
        .filter(|n| policy.targeting.includes(n.stratum))
        .map(|n| (n.id, n.p_onetime_base * factor))
        .collect();
    for &(id, p) in &targets {
        pop.set_p_onetime(id, p);
    }
    targets.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VaccineStatus {
    pub doses: u8,
    pub day_dose1: Option<Day>,
    pub day_dose2: Option<Day>,
    /// Multiplier on the per-contact transmission probability.
    pub susceptibility: f64,
}

impl Default for VaccineStatus {
    fn default() -> Self {
        Self {
            doses: 0,
            day_dose1: None,
            day_dose2: None,
            susceptibility: 1.0,
        }
    }
}

/// Optional per-node uptake limits: share willing to take exactly one dose
/// and share willing to take both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UptakeCaps {
    pub one_dose: f64,
    pub two_doses: f64,
}

impl Default for UptakeCaps {
    fn default() -> Self {
        Self {
            one_dose: 0.14,
            two_doses: 0.227,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VaccinationPolicy {
    /// Simulation day the first weekly record maps to. May be negative.
    pub start_day: Day,
    pub targeting: Targeting,
    /// Weekly dose file; the bundled series when absent.
    pub schedule: Option<PathBuf>,
    pub at_risk_population: f64,
    pub male_share_first: f64,
    pub male_share_second: f64,
    pub efficacy_one_dose: f64,
    pub efficacy_two_doses: f64,
    pub dose_interval_days: Day,
    pub uptake_caps: Option<UptakeCaps>,
}

impl Default for VaccinationPolicy {
    fn default() -> Self {
        Self {
            start_day: 30,
            targeting: Targeting::Universal,
            schedule: None,
            at_risk_population: 1_998_039.0,
            male_share_first: 0.91,
            male_share_second: 0.94,
            efficacy_one_dose: 0.358,
            efficacy_two_doses: 0.66,
            dose_interval_days: 28,
            uptake_caps: None,
        }
    }
}

impl VaccinationPolicy {
    pub fn validate(&self) -> Result<()> {
        self.targeting.validate()?;
        for (name, p) in [
            ("male_share_first", self.male_share_first),
            ("male_share_second", self.male_share_second),
            ("efficacy_one_dose", self.efficacy_one_dose),
            ("efficacy_two_doses", self.efficacy_two_doses),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{name} = {p} is not a proportion")));
            }
        }
        if !(self.at_risk_population > 0.0) {
            return Err(Error::config("at_risk_population must be positive"));
        }
        if self.dose_interval_days < 0 {
            return Err(Error::config("dose_interval_days must be nonnegative"));
        }
        if let Some(caps) = self.uptake_caps {
            let none = 1.0 - caps.one_dose - caps.two_doses;
            Categorical::new(&[none, caps.one_dose, caps.two_doses])
                .map_err(|_| Error::config("uptake caps must be proportions summing to at most 1"))?;
        }
        Ok(())
    }

    pub fn scaling(&self) -> ScheduleScaling {
        ScheduleScaling {
            at_risk_population: self.at_risk_population,
            male_share_first: self.male_share_first,
            male_share_second: self.male_share_second,
        }
    }

    /// Reads the configured weekly file, or the bundled one.
    pub fn weekly_doses(&self) -> Result<Vec<WeeklyDoses>> {
        match &self.schedule {
            Some(path) => read_weekly_doses_file(path),
            None => bundled_weekly_doses(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeeklyDoses {
    pub week_start: NaiveDate,
    pub first: f64,
    pub second: f64,
}

#[derive(Deserialize)]
struct WeeklyRow {
    week_start_date: String,
    first_doses: f64,
    second_doses: f64,
}

pub fn read_weekly_doses<R: Read>(reader: R) -> Result<Vec<WeeklyDoses>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (line, row) in rdr.deserialize::<WeeklyRow>().enumerate() {
        let row = row?;
        let week_start = NaiveDate::parse_from_str(&row.week_start_date, "%Y-%m-%d").map_err(|e| {
            Error::input(format!("dose row {}: bad date {:?}: {e}", line + 1, row.week_start_date))
        })?;
        for (what, v) in [("first", row.first_doses), ("second", row.second_doses)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::input(format!(
                    "dose row {} ({week_start}): {what} dose count {v} is negative or not finite",
                    line + 1
                )));
            }
        }
        out.push(WeeklyDoses {
            week_start,
            first: row.first_doses,
            second: row.second_doses,
        });
    }
    Ok(out)
}

pub fn read_weekly_doses_file(path: &Path) -> Result<Vec<WeeklyDoses>> {
    let f = std::fs::File::open(path)
        .map_err(|e| Error::input(format!("cannot open dose schedule {}: {e}", path.display())))?;
    read_weekly_doses(f)
}

pub fn bundled_weekly_doses() -> Result<Vec<WeeklyDoses>> {
    read_weekly_doses(BUNDLED_DOSES.as_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleScaling {
    pub at_risk_population: f64,
    pub male_share_first: f64,
    pub male_share_second: f64,
}

/// Fractional doses available per schedule day, indexed from the first week.
#[derive(Clone, Debug, PartialEq)]
pub struct DoseSchedule {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl DoseSchedule {
    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    /// `(first, second)` availability on schedule day `k`; zero outside.
    pub fn on(&self, k: i64) -> (f64, f64) {
        if k < 0 || k as usize >= self.first.len() {
            (0.0, 0.0)
        } else {
            (self.first[k as usize], self.second[k as usize])
        }
    }
}

/// Spreads weekly national counts evenly over days, scaled to a population of
/// `n`. Weeks missing between the first and last record count as zero.
pub fn load_dose_schedule(weekly: &[WeeklyDoses], n: usize, scaling: &ScheduleScaling) -> Result<DoseSchedule> {
    let mut rows = weekly.to_vec();
    rows.sort_by_key(|r| r.week_start);
    let Some(first_week) = rows.first().map(|r| r.week_start) else {
        return Ok(DoseSchedule {
            first: Vec::new(),
            second: Vec::new(),
        });
    };
    let last_week = rows.last().unwrap().week_start;
    let weeks = (last_week - first_week).num_days();
    if weeks % 7 != 0 {
        return Err(Error::input("dose weeks are not on a common 7-day grid"));
    }
    let weeks = (weeks / 7 + 1) as usize;
    let mut first_w = vec![0.0; weeks];
    let mut second_w = vec![0.0; weeks];
    let mut seen = vec![false; weeks];
    for r in &rows {
        let offset = (r.week_start - first_week).num_days();
        if offset % 7 != 0 {
            return Err(Error::input(format!("week {} is off the 7-day grid", r.week_start)));
        }
        let w = (offset / 7) as usize;
        if seen[w] {
            return Err(Error::input(format!("week {} listed twice", r.week_start)));
        }
        if r.first < 0.0 || r.second < 0.0 {
            return Err(Error::input(format!("week {}: negative dose count", r.week_start)));
        }
        seen[w] = true;
        first_w[w] = r.first;
        second_w[w] = r.second;
    }
    let per_capita = n as f64 / scaling.at_risk_population / 7.0;
    let spread = |weekly: &[f64], share: f64| -> Vec<f64> {
        weekly
            .iter()
            .flat_map(|&w| std::iter::repeat_n(w * share * per_capita, 7))
            .collect()
    };
    Ok(DoseSchedule {
        first: spread(&first_w, scaling.male_share_first),
        second: spread(&second_w, scaling.male_share_second),
    })
}

/// Per-replicate vaccination state: fractional carryover, targeting and
/// optional uptake willingness.
#[derive(Clone, Debug)]
pub struct VaccinationProgram {
    start_day: Day,
    interval: Day,
    multiplier: [f64; 2],
    targeted: Vec<bool>,
    // 0 = never, 1 = first dose only, 2 = both; None when uncapped
    willingness: Option<Vec<u8>>,
    carry: [f64; 2],
    /// Cumulative availability and administered counts, first and second dose.
    pub available: [f64; 2],
    pub administered: [u64; 2],
}

impl VaccinationProgram {
    pub fn new(policy: &VaccinationPolicy, pop: &Population, rng: &mut RngStream) -> Result<Self> {
        policy.validate()?;
        let targeted = pop.nodes().iter().map(|n| policy.targeting.includes(n.stratum)).collect();
        let willingness = match policy.uptake_caps {
            None => None,
            Some(caps) => {
                let dist = Categorical::new(&[1.0 - caps.one_dose - caps.two_doses, caps.one_dose, caps.two_doses])?;
                Some((0..pop.len()).map(|_| dist.sample(rng) as u8).collect())
            }
        };
        Ok(Self {
            start_day: policy.start_day,
            interval: policy.dose_interval_days,
            multiplier: [1.0 - policy.efficacy_one_dose, 1.0 - policy.efficacy_two_doses],
            targeted,
            willingness,
            carry: [0.0; 2],
            available: [0.0; 2],
            administered: [0; 2],
        })
    }

    pub fn start_day(&self) -> Day {
        self.start_day
    }

    fn willing(&self, i: usize, dose: u8) -> bool {
        self.willingness.as_ref().is_none_or(|w| w[i] >= dose)
    }

    /// Administers today's doses. Returns `[first, second]` counts given.
    pub fn vaccinate_step(
        &mut self,
        schedule: &DoseSchedule,
        ledger: &mut HealthLedger,
        day: Day,
        rng: &mut RngStream,
    ) -> [usize; 2] {
        if day < self.start_day {
            return [0, 0];
        }
        let (a1, a2) = schedule.on((day - self.start_day) as i64);
        let k1 = self.draw_budget(0, a1);
        let k2 = self.draw_budget(1, a2);

        let mut given = [0, 0];
        if k1 > 0 {
            let mut primary = Vec::new();
            let mut fallback = Vec::new();
            for (i, status) in ledger.vaccine.iter().enumerate() {
                let state = ledger.states()[i];
                if status.doses == 0
                    && !matches!(state, HealthState::Infectious | HealthState::Recovered)
                    && self.willing(i, 1)
                {
                    if self.targeted[i] {
                        primary.push(i);
                    } else {
                        fallback.push(i);
                    }
                }
            }
            let chosen = pick_with_fallback(&primary, &fallback, k1, rng);
            for &i in &chosen {
                let v = &mut ledger.vaccine[i];
                v.doses = 1;
                v.day_dose1 = Some(day);
                v.susceptibility = self.multiplier[0];
            }
            given[0] = chosen.len();
        }
        if k2 > 0 {
            let pool: Vec<usize> = ledger
                .vaccine
                .iter()
                .enumerate()
                .filter(|(i, v)| {
                    v.doses == 1 && v.day_dose1.is_some_and(|d| day - d >= self.interval) && self.willing(*i, 2)
                })
                .map(|(i, _)| i)
                .collect();
            let chosen = pick_with_fallback(&pool, &[], k2, rng);
            for &i in &chosen {
                let v = &mut ledger.vaccine[i];
                v.doses = 2;
                v.day_dose2 = Some(day);
                v.susceptibility = self.multiplier[1];
            }
            given[1] = chosen.len();
        }
        self.administered[0] += given[0] as u64;
        self.administered[1] += given[1] as u64;
        given
    }

    // Adds today's availability to the carried fraction and releases the
    // whole doses. Whole doses nobody can take are not kept.
    fn draw_budget(&mut self, dose: usize, available: f64) -> usize {
        self.available[dose] += available;
        let acc = self.carry[dose] + available;
        let whole = acc.floor();
        self.carry[dose] = acc - whole;
        whole as usize
    }
}

fn pick_with_fallback(primary: &[usize], fallback: &[usize], k: usize, rng: &mut RngStream) -> Vec<usize> {
    if k >= primary.len() {
        let mut out = primary.to_vec();
        let rest = (k - primary.len()).min(fallback.len());
        out.extend(index::sample(rng, fallback.len(), rest).into_iter().map(|j| fallback[j]));
        out
    } else {
        index::sample(rng, primary.len(), k).into_iter().map(|j| primary[j]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{create_population, NetworkParams, NodeProfile, RelClass};

    fn pop_with_strata(strata: &[u8]) -> Population {
        let params = NetworkParams::default();
        let nodes = strata
            .iter()
            .enumerate()
            .map(|(id, &s)| {
                let stratum = Stratum::new(s).unwrap();
                let p = params.stratum_onetime_prob[stratum.index()];
                NodeProfile {
                    id: id as NodeId,
                    rel_class: RelClass::new(0).unwrap(),
                    stratum,
                    p_onetime: p,
                    p_onetime_base: p,
                }
            })
            .collect();
        Population::from_profiles(nodes, vec![0; strata.len()]).unwrap()
    }

    fn flat_schedule(days: usize, first: f64, second: f64) -> DoseSchedule {
        DoseSchedule {
            first: vec![first; days],
            second: vec![second; days],
        }
    }

    #[test]
    fn daily_availability_from_weekly_count() {
        let weekly = [WeeklyDoses {
            week_start: NaiveDate::from_ymd_opt(2022, 7, 3).unwrap(),
            first: 700.0,
            second: 0.0,
        }];
        let s = load_dose_schedule(&weekly, 10_000, &VaccinationPolicy::default().scaling()).unwrap();
        assert_eq!(s.len(), 7);
        let expected = 700.0 * 0.91 / 1_998_039.0 * 10_000.0 / 7.0;
        assert!((s.first[3] - expected).abs() < 1e-12);
        assert!((expected - 0.4555).abs() < 1e-4);
    }

    #[test]
    fn missing_weeks_are_zero_and_bad_rows_rejected() {
        let csv = "week_start_date,first_doses,second_doses\n2022-06-05,70,0\n2022-05-22,7,7\n";
        let weekly = read_weekly_doses(csv.as_bytes()).unwrap();
        let scaling = ScheduleScaling {
            at_risk_population: 1.0,
            male_share_first: 1.0,
            male_share_second: 1.0,
        };
        let s = load_dose_schedule(&weekly, 1, &scaling).unwrap();
        assert_eq!(s.len(), 21);
        assert_eq!(s.on(0), (1.0, 1.0));
        assert_eq!(s.on(7), (0.0, 0.0));
        assert_eq!(s.on(14), (10.0, 0.0));
        assert_eq!(s.on(21), (0.0, 0.0));
        assert_eq!(s.on(-1), (0.0, 0.0));

        let negative = "week_start_date,first_doses,second_doses\n2022-05-22,-3,0\n";
        assert!(matches!(read_weekly_doses(negative.as_bytes()), Err(Error::Input(_))));
        let off_grid = "week_start_date,first_doses,second_doses\n2022-05-22,1,0\n2022-05-25,1,0\n";
        let weekly = read_weekly_doses(off_grid.as_bytes()).unwrap();
        assert!(load_dose_schedule(&weekly, 1, &scaling).is_err());
    }

    #[test]
    fn bundled_series_reaches_expected_coverage() {
        let weekly = bundled_weekly_doses().unwrap();
        assert_eq!(weekly[0].week_start, NaiveDate::from_ymd_opt(2022, 5, 22).unwrap());
        let s = load_dose_schedule(&weekly, 10_000, &VaccinationPolicy::default().scaling()).unwrap();
        let coverage = s.first.iter().sum::<f64>() / 10_000.0;
        assert!((coverage - 0.227).abs() < 0.002, "{coverage}");
    }

    #[test]
    fn behavior_change_is_anchored_and_idempotent() {
        let mut pop = pop_with_strata(&[3, 5, 6]);
        let policy = BehaviorChangePolicy {
            start_day: 70,
            reduction: 0.5,
            targeting: Targeting::top_strata(),
        };
        assert_eq!(apply_behavior_change(&mut pop, &policy), 2);
        let once: Vec<f64> = pop.nodes().iter().map(|n| n.p_onetime).collect();
        apply_behavior_change(&mut pop, &policy);
        let twice: Vec<f64> = pop.nodes().iter().map(|n| n.p_onetime).collect();
        assert_eq!(once, twice);
        assert_eq!(once[0], 0.0054);
        assert!((once[1] - 0.01575).abs() < 1e-15);
        assert!((once[2] - 0.143).abs() < 1e-15);
    }

    #[test]
    fn targeting_parses_from_toml() {
        #[derive(Deserialize)]
        struct W {
            t: Targeting,
        }
        let u: W = toml::from_str("t = \"random\"").unwrap();
        assert_eq!(u.t, Targeting::Universal);
        let s: W = toml::from_str("t = { strata = [6] }").unwrap();
        assert_eq!(s.t, Targeting::Strata(vec![6]));
        assert!(Targeting::Strata(vec![0]).validate().is_err());
    }

    #[test]
    fn fractional_doses_carry_over() {
        let pop = pop_with_strata(&[1; 50]);
        let mut rng = RngStream::new(1, 0);
        let policy = VaccinationPolicy {
            start_day: 0,
            ..Default::default()
        };
        let mut prog = VaccinationProgram::new(&policy, &pop, &mut rng).unwrap();
        let mut ledger = HealthLedger::with_care_seeking(vec![false; 50]);
        let schedule = flat_schedule(10, 0.25, 0.0);
        let given: Vec<usize> = (0..10)
            .map(|d| prog.vaccinate_step(&schedule, &mut ledger, d, &mut rng)[0])
            .collect();
        assert_eq!(given, vec![0, 0, 0, 1, 0, 0, 0, 1, 0, 0]);
    }

    #[test]
    fn second_dose_waits_for_interval() {
        let pop = pop_with_strata(&[1]);
        let mut rng = RngStream::new(2, 0);
        let policy = VaccinationPolicy {
            start_day: 30,
            ..Default::default()
        };
        let mut prog = VaccinationProgram::new(&policy, &pop, &mut rng).unwrap();
        let mut ledger = HealthLedger::with_care_seeking(vec![false]);
        let schedule = flat_schedule(100, 1.0, 1.0);
        for day in 0..=70 {
            prog.vaccinate_step(&schedule, &mut ledger, day, &mut rng);
        }
        let v = ledger.vaccine[0];
        assert_eq!(v.day_dose1, Some(30));
        assert_eq!(v.day_dose2, Some(58));
        assert!((v.susceptibility - 0.34).abs() < 1e-12);
    }

    #[test]
    fn one_dose_multiplier() {
        let pop = pop_with_strata(&[2]);
        let mut rng = RngStream::new(3, 0);
        let mut prog = VaccinationProgram::new(&VaccinationPolicy::default(), &pop, &mut rng).unwrap();
        let mut ledger = HealthLedger::with_care_seeking(vec![false]);
        prog.vaccinate_step(&flat_schedule(5, 1.0, 0.0), &mut ledger, 30, &mut rng);
        assert!((ledger.vaccine[0].susceptibility - 0.642).abs() < 1e-12);
    }

    #[test]
    fn targeted_strata_first_then_fallback() {
        let strata: Vec<u8> = (0..100).map(|i| if i < 10 { 6 } else { 2 }).collect();
        let pop = pop_with_strata(&strata);
        let mut rng = RngStream::new(4, 0);
        let policy = VaccinationPolicy {
            start_day: 0,
            targeting: Targeting::Strata(vec![6]),
            ..Default::default()
        };
        let mut prog = VaccinationProgram::new(&policy, &pop, &mut rng).unwrap();
        let mut ledger = HealthLedger::with_care_seeking(vec![false; 100]);
        let schedule = flat_schedule(3, 6.0, 0.0);
        prog.vaccinate_step(&schedule, &mut ledger, 0, &mut rng);
        let dosed: Vec<usize> = (0..100).filter(|&i| ledger.vaccine[i].doses == 1).collect();
        assert_eq!(dosed.len(), 6);
        assert!(dosed.iter().all(|&i| i < 10));
        prog.vaccinate_step(&schedule, &mut ledger, 1, &mut rng);
        let top = (0..10).filter(|&i| ledger.vaccine[i].doses == 1).count();
        let rest = (10..100).filter(|&i| ledger.vaccine[i].doses == 1).count();
        assert_eq!((top, rest), (10, 2));
    }

    #[test]
    fn infectious_and_recovered_skip_first_dose() {
        let mut rng = RngStream::new(5, 0);
        let pop = create_population(200, &NetworkParams::default(), &mut rng).unwrap();
        let mut ledger = HealthLedger::with_care_seeking(vec![false; 200]);
        let model = crate::epidemic::EpidemicModel::new(crate::epidemic::EpidemicParams {
            seed_fraction: 0.05,
            seed_strata: vec![1, 2, 3, 4, 5, 6],
            ..Default::default()
        })
        .unwrap();
        let seeds = model.seed_infections(&pop, &mut ledger, 0, &mut rng).unwrap();
        let mut prog = VaccinationProgram::new(
            &VaccinationPolicy {
                start_day: 0,
                ..Default::default()
            },
            &pop,
            &mut rng,
        )
        .unwrap();
        let given = prog.vaccinate_step(&flat_schedule(1, 500.0, 0.0), &mut ledger, 0, &mut rng);
        assert_eq!(given[0], 200 - seeds.len());
        for r in seeds {
            assert_eq!(ledger.vaccine[r.target as usize].doses, 0);
        }
    }

    #[test]
    fn uptake_caps_limit_doses() {
        let pop = pop_with_strata(&[1; 4_000]);
        let mut rng = RngStream::new(6, 0);
        let policy = VaccinationPolicy {
            start_day: 0,
            uptake_caps: Some(UptakeCaps::default()),
            dose_interval_days: 0,
            ..Default::default()
        };
        let mut prog = VaccinationProgram::new(&policy, &pop, &mut rng).unwrap();
        let mut ledger = HealthLedger::with_care_seeking(vec![false; 4_000]);
        let schedule = flat_schedule(2, 10_000.0, 10_000.0);
        prog.vaccinate_step(&schedule, &mut ledger, 0, &mut rng);
        prog.vaccinate_step(&schedule, &mut ledger, 1, &mut rng);
        let one = ledger.vaccine.iter().filter(|v| v.doses >= 1).count() as f64 / 4_000.0;
        let two = ledger.vaccine.iter().filter(|v| v.doses == 2).count() as f64 / 4_000.0;
        assert!((one - 0.367).abs() < 0.03, "{one}");
        assert!((two - 0.227).abs() < 0.03, "{two}");
    }
}

//! Reported quantities computed from finished runs.

use serde::{Deserialize, Serialize};

use crate::epidemic::InfectionRecord;
use crate::error::{Error, Result};
use crate::network::{EdgeKind, RelClass, SimpleGraph, Stratum};
use crate::sim::RunResult;
use crate::{Day, NodeId};

/// One value per edge kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ByKind {
    pub main: f64,
    pub casual: f64,
    pub onetime: f64,
}

impl ByKind {
    pub fn from_array(v: [f64; 3]) -> Self {
        Self {
            main: v[0],
            casual: v[1],
            onetime: v[2],
        }
    }

    pub fn get(&self, kind: EdgeKind) -> f64 {
        match kind {
            EdgeKind::Main => self.main,
            EdgeKind::Casual => self.casual,
            EdgeKind::OneTime => self.onetime,
        }
    }

    pub fn total(&self) -> f64 {
        self.main + self.casual + self.onetime
    }
}

/// Lifetime secondary infections per source node, by edge kind.
pub fn secondary_counts(records: &[InfectionRecord], n: usize) -> Vec<[u32; 3]> {
    let mut out = vec![[0u32; 3]; n];
    for r in records {
        if let (Some(src), Some(kind)) = (r.source, r.kind) {
            out[src as usize][kind.index()] += 1;
        }
    }
    out
}

/// Nodes infectious on at least one day in `[t - 7, t)`; the seeds when `t == 0`.
pub fn infectious_window(
    records: &[InfectionRecord],
    infectious_from: &[Option<Day>],
    recovered_on: &[Option<Day>],
    t: Day,
) -> Vec<NodeId> {
    if t == 0 {
        return records.iter().filter(|r| r.source.is_none()).map(|r| r.target).collect();
    }
    (0..infectious_from.len())
        .filter(|&i| match infectious_from[i] {
            // infectious on days from..recovered
            Some(from) => from < t && recovered_on[i].is_none_or(|rec| rec > t - 7),
            None => false,
        })
        .map(|i| i as NodeId)
        .collect()
}

/// Mean lifetime secondary infections, by kind, over the nodes infectious in
/// the week before `t`. `None` when that set is empty.
pub fn effective_r_with(secondary: &[[u32; 3]], window: &[NodeId]) -> Option<ByKind> {
    if window.is_empty() {
        return None;
    }
    let mut sums = [0u64; 3];
    for &v in window {
        for k in 0..3 {
            sums[k] += secondary[v as usize][k] as u64;
        }
    }
    let n = window.len() as f64;
    Some(ByKind::from_array(sums.map(|s| s as f64 / n)))
}

pub fn effective_r(run: &RunResult, t: Day) -> Option<ByKind> {
    let secondary = secondary_counts(&run.infections, run.population);
    let window = infectious_window(&run.infections, &run.nodes.infectious_from, &run.nodes.recovered_on, t);
    effective_r_with(&secondary, &window)
}

pub fn effective_r_series(run: &RunResult, days: &[Day]) -> Vec<Option<ByKind>> {
    let secondary = secondary_counts(&run.infections, run.population);
    days.iter()
        .map(|&t| {
            let w = infectious_window(&run.infections, &run.nodes.infectious_from, &run.nodes.recovered_on, t);
            effective_r_with(&secondary, &w)
        })
        .collect()
}

/// Shares of transmitted (non-seed) infections up to day `t`, by kind.
pub fn attribution_shares(records: &[InfectionRecord], t: Day) -> Option<ByKind> {
    let mut counts = [0u64; 3];
    for r in records.iter().filter(|r| r.day <= t) {
        if let Some(kind) = r.kind {
            counts[kind.index()] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    (total > 0).then(|| ByKind::from_array(counts.map(|c| c as f64 / total as f64)))
}

/// [`attribution_shares`] for every day `1..=horizon`.
pub fn attribution_series(run: &RunResult) -> Vec<Option<ByKind>> {
    let mut per_day = vec![[0u64; 3]; run.horizon as usize + 1];
    for r in &run.infections {
        if let Some(kind) = r.kind {
            per_day[r.day as usize][kind.index()] += 1;
        }
    }
    let mut acc = [0u64; 3];
    let mut out = Vec::with_capacity(run.horizon as usize);
    for (day, c) in per_day.iter().enumerate() {
        for k in 0..3 {
            acc[k] += c[k];
        }
        if day == 0 {
            continue;
        }
        let total: u64 = acc.iter().sum();
        out.push((total > 0).then(|| ByKind::from_array(acc.map(|c| c as f64 / total as f64))));
    }
    out
}

/// First day on which the one-time share of transmitted infections exceeds
/// one half.
pub fn onetime_majority_day(run: &RunResult) -> Option<Day> {
    attribution_series(run)
        .iter()
        .position(|s| s.is_some_and(|s| s.onetime > 0.5))
        .map(|i| i as Day + 1)
}

/// Mean at-risk contacts per node, rows by relationship class and columns by
/// stratum. Cells with no nodes are `None`.
pub type ContactMatrix = [[Option<f64>; Stratum::COUNT]; RelClass::COUNT];

pub fn at_risk_contact_matrix(rel_class: &[RelClass], stratum: &[Stratum], contacts: &[[u32; 3]]) -> ContactMatrix {
    let mut sum = [[0u64; Stratum::COUNT]; RelClass::COUNT];
    let mut count = [[0u64; Stratum::COUNT]; RelClass::COUNT];
    for i in 0..contacts.len() {
        let (r, s) = (rel_class[i].index(), stratum[i].index());
        sum[r][s] += contacts[i].iter().map(|&c| c as u64).sum::<u64>();
        count[r][s] += 1;
    }
    let mut out = [[None; Stratum::COUNT]; RelClass::COUNT];
    for r in 0..RelClass::COUNT {
        for s in 0..Stratum::COUNT {
            if count[r][s] > 0 {
                out[r][s] = Some(sum[r][s] as f64 / count[r][s] as f64);
            }
        }
    }
    out
}

pub fn run_contact_matrix(run: &RunResult) -> ContactMatrix {
    at_risk_contact_matrix(&run.nodes.rel_class, &run.nodes.stratum, &run.nodes.contacts)
}

/// Cellwise mean over runs, skipping runs where a cell is empty.
pub fn mean_contact_matrix(mats: &[ContactMatrix]) -> ContactMatrix {
    let mut out = [[None; Stratum::COUNT]; RelClass::COUNT];
    for r in 0..RelClass::COUNT {
        for s in 0..Stratum::COUNT {
            let vals: Vec<f64> = mats.iter().filter_map(|m| m[r][s]).collect();
            if !vals.is_empty() {
                out[r][s] = Some(vals.iter().sum::<f64>() / vals.len() as f64);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub transitivity: f64,
    /// Average local clustering; nodes of degree below 2 count as 0.
    pub mean_clustering: f64,
    pub lcc_fraction: f64,
    pub mean_degree: f64,
    pub max_degree: usize,
}

pub fn network_summaries(g: &SimpleGraph) -> NetworkSummary {
    let n = g.node_count();
    if n == 0 {
        return NetworkSummary::default();
    }
    let mut closed = 0u64;
    let mut triples = 0u64;
    let mut clustering = 0.0;
    let mut max_degree = 0;
    for v in 0..n as NodeId {
        let nb = g.neighbors(v);
        let d = nb.len();
        max_degree = max_degree.max(d);
        if d < 2 {
            continue;
        }
        let mut links = 0u64;
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if g.has_edge(a, b) {
                    links += 1;
                }
            }
        }
        let pairs = (d * (d - 1) / 2) as u64;
        closed += links;
        triples += pairs;
        clustering += links as f64 / pairs as f64;
    }
    NetworkSummary {
        transitivity: if triples == 0 { 0.0 } else { closed as f64 / triples as f64 },
        mean_clustering: clustering / n as f64,
        lcc_fraction: largest_component(g) as f64 / n as f64,
        mean_degree: 2.0 * g.edge_count() as f64 / n as f64,
        max_degree,
    }
}

fn largest_component(g: &SimpleGraph) -> usize {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut best = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start as NodeId);
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in g.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// Linear-interpolation quantile of an unsorted sample.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
}

impl Quartiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        Some(Self {
            p25: quantile(values, 0.25)?,
            median: quantile(values, 0.5)?,
            p75: quantile(values, 0.75)?,
        })
    }
}

/// R_t spread across runs on one day. Medians are taken over each run's
/// window mean; runs with an empty window are left out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RtSummary {
    pub day: Day,
    pub runs: usize,
    pub main: Option<Quartiles>,
    pub casual: Option<Quartiles>,
    pub onetime: Option<Quartiles>,
    pub total: Option<Quartiles>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub runs: usize,
    pub population: usize,
    pub horizon: u32,
    /// Pointwise cumulative-infected percent over days `1..=horizon`.
    pub mean_cumulative_pct: Vec<f64>,
    pub p25_cumulative_pct: Vec<f64>,
    pub p75_cumulative_pct: Vec<f64>,
    pub final_pct: Vec<f64>,
    pub final_mean: f64,
    pub final_quartiles: Quartiles,
    pub rt: Vec<RtSummary>,
    /// Mean percent of main and casual rewiring entries that waited past
    /// their first day.
    pub delayed_rewiring_pct: [Option<f64>; 2],
    pub mean_runtime_secs: f64,
}

impl EnsembleSummary {
    pub fn final_median(&self) -> f64 {
        self.final_quartiles.median
    }
}

/// Aggregates finished runs. `rt_days` picks the days R_t is summarized on.
pub fn ensemble_summary(results: &[RunResult], rt_days: &[Day]) -> Result<EnsembleSummary> {
    let first = results.first().ok_or_else(|| Error::input("no runs to summarize"))?;
    if results
        .iter()
        .any(|r| r.horizon != first.horizon || r.population != first.population)
    {
        return Err(Error::input("runs differ in horizon or population"));
    }
    let h = first.horizon as usize;
    let series: Vec<Vec<f64>> = results.iter().map(|r| r.cumulative_percent()).collect();
    let column = |d: usize| series.iter().map(|s| s[d]).collect::<Vec<f64>>();
    let mut mean_s = Vec::with_capacity(h);
    let mut p25_s = Vec::with_capacity(h);
    let mut p75_s = Vec::with_capacity(h);
    for d in 0..h {
        let col = column(d);
        mean_s.push(mean(&col).unwrap());
        p25_s.push(quantile(&col, 0.25).unwrap());
        p75_s.push(quantile(&col, 0.75).unwrap());
    }
    let final_pct: Vec<f64> = results.iter().map(|r| r.final_percent()).collect();

    let per_run: Vec<Vec<Option<ByKind>>> = results.iter().map(|r| effective_r_series(r, rt_days)).collect();
    let rt = rt_days
        .iter()
        .enumerate()
        .map(|(j, &day)| {
            let vals: Vec<ByKind> = per_run.iter().filter_map(|s| s[j]).collect();
            let pick = |f: fn(&ByKind) -> f64| Quartiles::of(&vals.iter().map(f).collect::<Vec<_>>());
            RtSummary {
                day,
                runs: vals.len(),
                main: pick(|b| b.main),
                casual: pick(|b| b.casual),
                onetime: pick(|b| b.onetime),
                total: pick(|b| b.total()),
            }
        })
        .collect();

    let delayed = |k: usize| -> Option<f64> {
        let v: Vec<f64> = results.iter().filter_map(|r| r.rewiring[k].percent_delayed()).collect();
        mean(&v)
    };
    let runtimes: Vec<f64> = results.iter().map(|r| r.runtime.as_secs_f64()).collect();

    Ok(EnsembleSummary {
        runs: results.len(),
        population: first.population,
        horizon: first.horizon,
        mean_cumulative_pct: mean_s,
        p25_cumulative_pct: p25_s,
        p75_cumulative_pct: p75_s,
        final_mean: mean(&final_pct).unwrap(),
        final_quartiles: Quartiles::of(&final_pct).unwrap(),
        final_pct,
        rt,
        delayed_rewiring_pct: [delayed(0), delayed(1)],
        mean_runtime_secs: mean(&runtimes).unwrap(),
    })
}

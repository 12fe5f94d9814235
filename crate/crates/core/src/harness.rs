//! Replicate ensembles, intervention sweeps and the runtime benchmark.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::interventions::{BehaviorChangePolicy, Targeting, VaccinationPolicy};
use crate::metrics::{quantile, Quartiles};
use crate::sim::{RunResult, Scenario};
use crate::Day;

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))
}

/// Runs replicates on streams `base_stream..base_stream + n` and maps each
/// result through `f`. Output order follows the stream ids regardless of
/// `jobs`.
pub fn run_replicates_with<T, F>(scenario: &Scenario, n: usize, base_stream: u64, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(RunResult) -> T + Sync,
{
    if n == 0 {
        return Err(Error::config("at least one replicate required"));
    }
    pool(jobs)?.install(|| {
        (0..n as u64)
            .into_par_iter()
            .map(|k| scenario.run(base_stream + k).map(&f))
            .collect()
    })
}

pub fn run_replicates(scenario: &Scenario, n: usize, base_stream: u64, jobs: usize) -> Result<Vec<RunResult>> {
    run_replicates_with(scenario, n, base_stream, jobs, |r| r)
}

/// Intervention timing and intensity grid; cells are the full product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub vax_start_days: Vec<Day>,
    pub bc_start_days: Vec<Day>,
    pub bc_reductions: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            vax_start_days: vec![-30, -15, 0, 15, 30],
            bc_start_days: vec![30, 50, 70, 90, 110],
            bc_reductions: vec![0.75, 0.5, 0.25],
        }
    }
}

impl SweepGrid {
    /// Cells in declaration order: vaccination start outermost, reduction
    /// innermost.
    pub fn cells(&self) -> Vec<(Day, Day, f64)> {
        let mut out = Vec::new();
        for &v in &self.vax_start_days {
            for &b in &self.bc_start_days {
                for &r in &self.bc_reductions {
                    out.push((v, b, r));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub vax_start: Day,
    pub bc_start: Day,
    pub bc_reduction: f64,
    pub runs: usize,
    pub final_mean: f64,
    pub final_quartiles: Quartiles,
}

/// Applies one grid cell to `base`. Targeting comes from the base policies,
/// or strata 5 and 6 when the base has none.
pub fn cell_config(base: &ScenarioConfig, vax_start: Day, bc_start: Day, reduction: f64) -> ScenarioConfig {
    let mut c = base.clone();
    let bc_targeting = base
        .behavior_change
        .as_ref()
        .map_or_else(Targeting::top_strata, |b| b.targeting.clone());
    c.behavior_change = Some(BehaviorChangePolicy {
        start_day: bc_start,
        reduction,
        targeting: bc_targeting,
    });
    let mut vax = base.vaccination.clone().unwrap_or_else(|| VaccinationPolicy {
        targeting: Targeting::top_strata(),
        ..VaccinationPolicy::default()
    });
    vax.start_day = vax_start;
    c.vaccination = Some(vax);
    c.name = format!("{}_v{}_b{}_r{}", base.name, vax_start, bc_start, reduction);
    c
}

/// Final-size mean per grid cell, `reps` replicates each on streams
/// `base_stream..`.
pub fn sweep(grid: &SweepGrid, base: &ScenarioConfig, reps: usize, base_stream: u64, jobs: usize) -> Result<Vec<SweepCell>> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(Error::config("sweep grid has an empty axis"));
    }
    if reps == 0 {
        return Err(Error::config("at least one replicate required"));
    }
    let scenarios = cells
        .iter()
        .map(|&(v, b, r)| Scenario::new(cell_config(base, v, b, r)))
        .collect::<Result<Vec<_>>>()?;
    let finals: Vec<f64> = pool(jobs)?.install(|| {
        (0..cells.len() * reps)
            .into_par_iter()
            .map(|j| {
                let (cell, k) = (j / reps, j % reps);
                scenarios[cell].run(base_stream + k as u64).map(|r| r.final_percent())
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok(cells
        .iter()
        .zip(finals.chunks(reps))
        .map(|(&(v, b, r), f)| SweepCell {
            vax_start: v,
            bc_start: b,
            bc_reduction: r,
            runs: reps,
            final_mean: f.iter().sum::<f64>() / f.len() as f64,
            final_quartiles: Quartiles::of(f).unwrap(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub population: usize,
    pub runtimes_secs: Vec<f64>,
    pub mean_secs: f64,
    pub median_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of ln(mean runtime) against ln(N); missing with
    /// fewer than two sizes.
    pub slope: Option<f64>,
}

/// Times `reps` sequential runs of `base` at each population size.
pub fn benchmark_scaling(base: &ScenarioConfig, sizes: &[usize], reps: usize, base_stream: u64) -> Result<ScalingReport> {
    if sizes.is_empty() || reps == 0 {
        return Err(Error::config("benchmark needs at least one size and one replicate"));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let scenario = Scenario::new(ScenarioConfig {
            population: n,
            ..base.clone()
        })?;
        let mut times = Vec::with_capacity(reps);
        for k in 0..reps as u64 {
            times.push(scenario.run(base_stream + k)?.runtime.as_secs_f64());
        }
        rows.push(ScalingRow {
            population: n,
            mean_secs: times.iter().sum::<f64>() / reps as f64,
            median_secs: quantile(&times, 0.5).unwrap(),
            runtimes_secs: times,
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.population as f64).ln(), r.mean_secs.max(f64::MIN_POSITIVE).ln()))
        .collect();
    Ok(ScalingReport {
        slope: log_log_slope(&points),
        rows,
    })
}

pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

//! Delimited-text outputs and the run manifest.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::epidemic::InfectionRecord;
use crate::error::{Error, Result};
use crate::harness::{ScalingReport, SweepCell};
use crate::metrics::{
    attribution_series, effective_r_series, mean_contact_matrix, run_contact_matrix, EnsembleSummary, NetworkSummary,
};
use crate::network::{EdgeKind, RelClass, Stratum};
use crate::sim::RunResult;
use crate::{Day, NodeId};

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

#[derive(Serialize, Deserialize)]
struct InfectionRow {
    source: Option<NodeId>,
    target: NodeId,
    day: Day,
    kind: Option<String>,
}

pub fn write_infections(path: &Path, records: &[InfectionRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(InfectionRow {
            source: r.source,
            target: r.target,
            day: r.day,
            kind: r.kind.map(|k| k.label().to_string()),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_infections(path: &Path) -> Result<Vec<InfectionRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in rdr.deserialize::<InfectionRow>() {
        let row = row?;
        let kind = match row.kind.as_deref() {
            None | Some("") => None,
            Some(s) => Some(EdgeKind::parse(s).ok_or_else(|| Error::input(format!("unknown edge kind {s:?}")))?),
        };
        out.push(InfectionRecord {
            source: row.source,
            target: row.target,
            day: row.day,
            kind,
        });
    }
    Ok(out)
}

pub fn write_daily(path: &Path, run: &RunResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["day", "S", "E", "I", "R", "cumulative_infected"])?;
    for d in std::iter::once(&run.initial).chain(&run.daily) {
        w.write_record([
            d.day.to_string(),
            d.s.to_string(),
            d.e.to_string(),
            d.i.to_string(),
            d.r.to_string(),
            d.cumulative.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn config_hash(config: &ScenarioConfig) -> String {
    let digest = Sha256::digest(config.to_toml().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub config_sha256: String,
    pub seed: u64,
    pub first_stream: u64,
    pub replicates: usize,
    pub rt_window: String,
    pub clustering: String,
}

impl Manifest {
    pub fn new(config: &ScenarioConfig, first_stream: u64, replicates: usize) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scenario: config.name.clone(),
            config_sha256: config_hash(config),
            seed: config.seed,
            first_stream,
            replicates,
            rt_window: "mean lifetime secondary infections of nodes infectious in [t-7, t); seeds at t=0; medians over runs".into(),
            clustering: "local clustering averaged over all nodes, degree < 2 counted as 0".into(),
        }
    }
}

/// Writes `config.toml` and `manifest.toml` into `dir`.
pub fn write_manifest(dir: &Path, config: &ScenarioConfig, first_stream: u64, replicates: usize) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), config.to_toml())?;
    let manifest = Manifest::new(config, first_stream, replicates);
    let text = toml::to_string(&manifest).map_err(|e| Error::input(e.to_string()))?;
    fs::write(dir.join("manifest.toml"), text)?;
    Ok(())
}

/// Per-replicate files plus ensemble tables for one scenario directory.
/// Wall-clock times are left out so reruns are byte-identical.
pub fn write_ensemble(dir: &Path, config: &ScenarioConfig, results: &[RunResult], summary: &EnsembleSummary, first_stream: u64) -> Result<()> {
    write_manifest(dir, config, first_stream, results.len())?;
    let reps = dir.join("replicates");
    fs::create_dir_all(&reps)?;
    for r in results {
        write_infections(&reps.join(format!("infections_{:04}.csv", r.stream_id)), &r.infections)?;
        write_daily(&reps.join(format!("daily_{:04}.csv", r.stream_id)), r)?;
    }

    let mut w = csv::Writer::from_path(dir.join("cumulative.csv"))?;
    w.write_record(["day", "mean_pct", "p25_pct", "p75_pct"])?;
    for d in 0..summary.horizon as usize {
        w.write_record([
            (d + 1).to_string(),
            summary.mean_cumulative_pct[d].to_string(),
            summary.p25_cumulative_pct[d].to_string(),
            summary.p75_cumulative_pct[d].to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("final_size.csv"))?;
    w.write_record(["scenario", "seed", "stream_id", "final_pct", "stopped_on", "doses_first", "doses_second"])?;
    for r in results {
        w.write_record([
            r.scenario.clone(),
            r.seed.to_string(),
            r.stream_id.to_string(),
            r.final_percent().to_string(),
            r.stopped_on.map_or_else(String::new, |d| d.to_string()),
            r.doses_given[0].to_string(),
            r.doses_given[1].to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("rt_summary.csv"))?;
    w.write_record(["day", "kind", "runs", "p25", "median", "p75"])?;
    for s in &summary.rt {
        for (kind, q) in [("main", s.main), ("casual", s.casual), ("onetime", s.onetime), ("total", s.total)] {
            w.write_record([
                s.day.to_string(),
                kind.to_string(),
                s.runs.to_string(),
                fmt_opt(q.map(|q| q.p25)),
                fmt_opt(q.map(|q| q.median)),
                fmt_opt(q.map(|q| q.p75)),
            ])?;
        }
    }
    w.flush()?;

    let rt_days: Vec<Day> = summary.rt.iter().map(|s| s.day).collect();
    let mut w = csv::Writer::from_path(dir.join("rt_runs.csv"))?;
    w.write_record(["scenario", "seed", "stream_id", "day", "main", "casual", "onetime", "total"])?;
    for r in results {
        for (day, v) in rt_days.iter().zip(effective_r_series(r, &rt_days)) {
            w.write_record([
                r.scenario.clone(),
                r.seed.to_string(),
                r.stream_id.to_string(),
                day.to_string(),
                fmt_opt(v.map(|b| b.main)),
                fmt_opt(v.map(|b| b.casual)),
                fmt_opt(v.map(|b| b.onetime)),
                fmt_opt(v.map(|b| b.total())),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("attribution.csv"))?;
    w.write_record(["scenario", "seed", "stream_id", "day", "main", "casual", "onetime"])?;
    for r in results {
        for (k, s) in attribution_series(r).into_iter().enumerate() {
            w.write_record([
                r.scenario.clone(),
                r.seed.to_string(),
                r.stream_id.to_string(),
                (k + 1).to_string(),
                fmt_opt(s.map(|b| b.main)),
                fmt_opt(s.map(|b| b.casual)),
                fmt_opt(s.map(|b| b.onetime)),
            ])?;
        }
    }
    w.flush()?;

    let mats: Vec<_> = results.iter().map(run_contact_matrix).collect();
    let mean = mean_contact_matrix(&mats);
    let mut w = csv::Writer::from_path(dir.join("contacts.csv"))?;
    w.write_record(["rel_class", "stratum", "mean_at_risk_contacts"])?;
    for class in RelClass::all() {
        for stratum in Stratum::all() {
            w.write_record([class.label(), stratum.level().to_string(), fmt_opt(mean[class.index()][stratum.index()])])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("rewiring.csv"))?;
    w.write_record(["stream_id", "kind", "enqueued", "delayed", "pct_delayed"])?;
    for r in results {
        for kind in [EdgeKind::Main, EdgeKind::Casual] {
            let s = r.rewiring_stats(kind);
            w.write_record([
                r.stream_id.to_string(),
                kind.label().to_string(),
                s.enqueued.to_string(),
                s.delayed.to_string(),
                fmt_opt(s.percent_delayed()),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep(path: &Path, cells: &[SweepCell]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["vax_start", "bc_start", "bc_reduction", "runs", "final_mean_pct", "p25_pct", "median_pct", "p75_pct"])?;
    for c in cells {
        w.write_record([
            c.vax_start.to_string(),
            c.bc_start.to_string(),
            c.bc_reduction.to_string(),
            c.runs.to_string(),
            c.final_mean.to_string(),
            c.final_quartiles.p25.to_string(),
            c.final_quartiles.median.to_string(),
            c.final_quartiles.p75.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetstatsRow {
    pub stream_id: u64,
    pub window_start: Day,
    pub window_end: Day,
    pub transitivity: f64,
    pub mean_clustering: f64,
    pub lcc_fraction: f64,
    pub mean_degree: f64,
    pub max_degree: usize,
}

impl NetstatsRow {
    pub fn new(stream_id: u64, window_start: Day, window_end: Day, s: &NetworkSummary) -> Self {
        Self {
            stream_id,
            window_start,
            window_end,
            transitivity: s.transitivity,
            mean_clustering: s.mean_clustering,
            lcc_fraction: s.lcc_fraction,
            mean_degree: s.mean_degree,
            max_degree: s.max_degree,
        }
    }
}

pub fn write_netstats(path: &Path, rows: &[NetstatsRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_bench(path: &Path, report: &ScalingReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["population", "replicate", "seconds"])?;
    for row in &report.rows {
        for (k, t) in row.runtimes_secs.iter().enumerate() {
            w.write_record([row.population.to_string(), k.to_string(), t.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

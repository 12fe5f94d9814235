use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use mpoxnet::config::{ScenarioConfig, PRESETS};
use mpoxnet::export::{self, NetstatsRow};
use mpoxnet::harness::{self, SweepGrid};
use mpoxnet::metrics::{ensemble_summary, network_summaries};
use mpoxnet::network::cumulative_window_graph;
use mpoxnet::sim::Scenario;
use mpoxnet::{Day, Error};

#[derive(Parser)]
#[command(name = "mpoxnet", version, about = "Mpox spread on a dynamic sexual contact network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One replicate.
    Run {
        #[command(flatten)]
        common: Common,
        /// Random stream id; defaults to the seed.
        #[arg(long)]
        stream: Option<u64>,
    },
    /// Replicate ensemble with summary tables.
    Ensemble {
        #[command(flatten)]
        common: Common,
        /// Days to summarize R_t on.
        #[arg(long, value_delimiter = ',', default_value = "0,7,14,21,28,42,56,70,84")]
        rt_days: Vec<Day>,
    },
    /// Final size over a grid of intervention timings and intensities.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-30,-15,0,15,30")]
        vax_start: Vec<Day>,
        #[arg(long, value_delimiter = ',', default_value = "30,50,70,90,110")]
        bc_start: Vec<Day>,
        #[arg(long, value_delimiter = ',', default_value = "0.75,0.5,0.25")]
        reductions: Vec<f64>,
    },
    /// Wall-clock runtime against population size.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "5000,10000,20000,40000,80000")]
        sizes: Vec<usize>,
    },
    /// Structure of cumulative window graphs ending on the given days.
    Netstats {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "28,56,84")]
        days: Vec<Day>,
        /// Window length in days.
        #[arg(long, default_value_t = 7)]
        window: Day,
    },
    /// List preset names, or print one preset as a scenario file.
    Presets { name: Option<String> },
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named scenario.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, short, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    horizon: Option<u32>,
}

impl Common {
    fn load(&self) -> mpoxnet::Result<ScenarioConfig> {
        let mut c = match (&self.config, &self.preset) {
            (Some(path), _) => ScenarioConfig::from_file(path)?,
            (None, Some(name)) => ScenarioConfig::preset(name)?,
            (None, None) => ScenarioConfig::preset("baseline")?,
        };
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(n) = self.replicates {
            c.replicates = n;
        }
        if let Some(n) = self.population {
            c.population = n;
        }
        if let Some(h) = self.horizon {
            c.horizon = h;
        }
        c.validate()?;
        Ok(c)
    }

    fn jobs(&self) -> usize {
        if self.jobs > 0 {
            self.jobs
        } else {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        }
    }
}

fn ensemble(common: &Common, config: ScenarioConfig, first: u64, n: usize, rt_days: &[Day]) -> anyhow::Result<()> {
    let scenario = Scenario::new(config)?;
    let results = harness::run_replicates(&scenario, n, first, common.jobs())?;
    let summary = ensemble_summary(&results, rt_days)?;
    let dir = common.out.join(&scenario.config.name);
    export::write_ensemble(&dir, &scenario.config, &results, &summary, first)
        .with_context(|| format!("writing {}", dir.display()))?;
    let q = summary.final_quartiles;
    println!(
        "{}: {} runs, final infected {:.2}% (P25 {:.2}%, P75 {:.2}%) -> {}",
        scenario.config.name,
        summary.runs,
        summary.final_mean,
        q.p25,
        q.p75,
        dir.display()
    );
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { common, stream } => {
            let c = common.load()?;
            let first = stream.unwrap_or(c.seed);
            ensemble(&common, c, first, 1, &[0, 7, 14, 21, 28])
        }
        Command::Ensemble { common, rt_days } => {
            let c = common.load()?;
            let (first, n) = (c.seed, c.replicates);
            ensemble(&common, c, first, n, &rt_days)
        }
        Command::Sweep {
            common,
            vax_start,
            bc_start,
            reductions,
        } => {
            let c = common.load()?;
            let grid = SweepGrid {
                vax_start_days: vax_start,
                bc_start_days: bc_start,
                bc_reductions: reductions,
            };
            let cells = harness::sweep(&grid, &c, c.replicates, c.seed, common.jobs())?;
            let dir = common.out.join(format!("{}_sweep", c.name));
            export::write_manifest(&dir, &c, c.seed, c.replicates)?;
            export::write_sweep(&dir.join("heatmap.csv"), &cells)?;
            for cell in &cells {
                println!(
                    "vax {:>5} bc {:>4} reduction {:.2}: {:.2}%",
                    cell.vax_start, cell.bc_start, cell.bc_reduction, cell.final_mean
                );
            }
            Ok(())
        }
        Command::Bench { common, sizes } => {
            let c = common.load()?;
            let reps = common.replicates.unwrap_or(5);
            let report = harness::benchmark_scaling(&c, &sizes, reps, c.seed)?;
            let dir = common.out.join(format!("{}_bench", c.name));
            std::fs::create_dir_all(&dir)?;
            export::write_bench(&dir.join("runtimes.csv"), &report)?;
            for row in &report.rows {
                println!("N={:>7}: mean {:.3}s", row.population, row.mean_secs);
            }
            match report.slope {
                Some(s) => println!("log-log slope {s:.3}"),
                None => println!("log-log slope: needs two or more sizes"),
            }
            Ok(())
        }
        Command::Netstats { common, days, window } => {
            let mut c = common.load()?;
            c.record_edges = true;
            if window < 1 {
                bail!(Error::config("window must be at least one day"));
            }
            let scenario = Scenario::new(c)?;
            let n = scenario.config.replicates;
            let first = scenario.config.seed;
            let per_run = harness::run_replicates_with(&scenario, n, first, common.jobs(), |r| {
                let log = r.edge_log.as_ref().expect("edge log requested");
                days.iter()
                    .map(|&d| {
                        let t0 = (d - window + 1).max(0);
                        cumulative_window_graph(log, r.population, t0, d)
                            .map(|g| NetstatsRow::new(r.stream_id, t0, d, &network_summaries(&g)))
                    })
                    .collect::<mpoxnet::Result<Vec<_>>>()
            })?;
            let rows: Vec<NetstatsRow> = per_run.into_iter().collect::<mpoxnet::Result<Vec<_>>>()?.concat();
            let dir = common.out.join(format!("{}_netstats", scenario.config.name));
            export::write_manifest(&dir, &scenario.config, first, n)?;
            export::write_netstats(&dir.join("netstats.csv"), &rows)?;
            println!("{} window summaries -> {}", rows.len(), dir.display());
            Ok(())
        }
        Command::Presets { name } => {
            match name {
                None => PRESETS.iter().for_each(|p| println!("{p}")),
                Some(n) => print!("{}", ScenarioConfig::preset(&n)?.to_toml()),
            }
            Ok(())
        }
    }
}

fn is_config_error(e: &anyhow::Error) -> bool {
    e.chain()
        .any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::Config(_) | Error::Input(_))))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_config_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use faircache::checks::run_checks;
use faircache::config::FileConfig;
use faircache::report::{summary_table, write_csv, write_json};
use faircache::scenario::{Scenario, PRESET_USERS};
use faircache::sim::{compare, run, sweep, with_axis, RunConfig, RunMetrics, Scheme, SweepAxis};
use faircache::system::db_to_linear;
use faircache::{Error, Result};

const OUT_DIR_ENV: &str = "FAIRCACHE_OUT_DIR";

#[derive(Parser)]
#[command(name = "faircache", version, about = "Fair coded-caching delivery simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration.
    Run(Common),
    /// Simulate independent runs along one axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// K, V or alpha.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Proposed scheme against both baselines on one configuration.
    Compare(Common),
    /// Oracle and invariant self-checks.
    Check,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "det_two_class")]
    scenario: String,
    /// Flat TOML file applied on top of the scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "K")]
    users: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "V")]
    tradeoff: Option<f64>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long, conflicts_with = "power_linear")]
    power_db: Option<f64>,
    #[arg(long)]
    power_linear: Option<f64>,
    /// Output directory (overrides FAIRCACHE_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a JSON document with trajectories.
    #[arg(long)]
    json: bool,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let scenario: Scenario = self.scenario.parse()?;
        let file = match &self.config {
            Some(p) => Some(FileConfig::load(p)?),
            None => None,
        };
        let file_users = file.as_ref().and_then(|f| f.users);
        if let (Some(cli), Some(f)) = (self.users, file_users) {
            if cli != f {
                return Err(Error::Config(format!("--K {cli} contradicts users = {f} in the config file")));
            }
        }
        let k = self.users.or(file_users).unwrap_or(PRESET_USERS);
        let mut c = scenario.config(k)?;
        if let Some(f) = &file {
            c = f.apply(&c)?;
        }
        if let Some(a) = self.alpha {
            c.fairness.alpha = a;
        }
        if let Some(v) = self.tradeoff {
            c.fairness.tradeoff = v;
        }
        if let Some(s) = &self.scheme {
            c.scheme = s.parse()?;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(h) = self.horizon {
            c.horizon = h;
        }
        if let Some(db) = self.power_db {
            c.params.power = db_to_linear(db);
        }
        if let Some(p) = self.power_linear {
            c.params.power = p;
        }
        c.validate()?;
        Ok(c)
    }

    fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("results"))
    }
}

fn write_outputs(dir: &Path, stem: &str, base: &RunConfig, configs: &[RunConfig], metrics: &[RunMetrics], json: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_csv(BufWriter::new(File::create(dir.join(format!("{stem}.csv")))?), configs, metrics)?;
    fs::write(dir.join(format!("{stem}.toml")), FileConfig::resolved(base).to_toml()?)?;
    if json {
        write_json(BufWriter::new(File::create(dir.join(format!("{stem}.json")))?), configs, metrics)?;
    }
    println!("{}", summary_table(metrics));
    println!("wrote {}", dir.join(format!("{stem}.csv")).display());
    Ok(())
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(common) => {
            let c = common.resolve()?;
            let m = run(&c)?;
            write_outputs(&common.out_dir(), "run", &c, std::slice::from_ref(&c), &[m], common.json)?;
        }
        Command::Sweep { common, axis, values } => {
            let c = common.resolve()?;
            let axis: SweepAxis = axis.parse()?;
            let configs = values.iter().map(|&v| with_axis(&c, axis, v)).collect::<Result<Vec<_>>>()?;
            let ms = sweep(&c, axis, &values)?;
            write_outputs(&common.out_dir(), "sweep", &c, &configs, &ms, common.json)?;
        }
        Command::Compare(common) => {
            let c = common.resolve()?;
            let ms = compare(&c)?;
            let configs: Vec<RunConfig> = ms
                .iter()
                .map(|m| RunConfig {
                    scheme: m.scheme,
                    ..c.clone()
                })
                .collect();
            let base = RunConfig {
                scheme: Scheme::Proposed,
                ..c
            };
            write_outputs(&common.out_dir(), "compare", &base, &configs, &ms, common.json)?;
        }
        Command::Check => {
            let results = run_checks();
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            return Ok(results.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! `divsim` command-line front end.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use crate::model::{GenerationMode, PassingScheme};
use crate::sweep::{aggregate_cells, run_sweep_with_threads, Aggregates, SweepRecord};

pub use config::{preset, ConfigError, RegressOn, RunConfig, PRESETS};
pub use output::{emit_csv, emit_heatmap, format_report, Measure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "DIVSIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "divsim", version, about = "Team functional-diversity simulator")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a replicated IFD x DFD sweep and write its outputs.
    Run(Box<RunArgs>),
    /// List scenario presets.
    Presets,
}

#[derive(Debug, Default, Args)]
struct RunArgs {
    /// Scenario preset (see `divsim presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Flat JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(short = 'o', long = "out", alias = "out_dir", alias = "out-dir")]
    out: Option<PathBuf>,
    /// Write report.txt with regression and correlation tables.
    #[arg(long)]
    report: bool,
    #[arg(long)]
    no_heatmaps: bool,
    #[arg(long)]
    no_csv: bool,

    #[arg(long, alias = "n_functions")]
    n_functions: Option<usize>,
    #[arg(long, alias = "n_agents")]
    n_agents: Option<usize>,
    #[arg(long, alias = "n_tasks")]
    n_tasks: Option<usize>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Similarity threshold as a fraction of the largest agent distance.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, alias = "mix_skills")]
    mix_skills: Option<bool>,
    /// spec_gen, ifds_distribution or uniform_ifds.
    #[arg(long, alias = "generation_mode")]
    generation_mode: Option<GenerationMode>,
    #[arg(long)]
    delta: Option<f64>,
    /// pass_if_stuck or always_pass.
    #[arg(long, alias = "passing_scheme")]
    passing_scheme: Option<PassingScheme>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, alias = "max_steps")]
    max_steps: Option<usize>,

    #[arg(long, alias = "ifd_steps")]
    ifd_steps: Option<usize>,
    #[arg(long, alias = "dfd_steps")]
    dfd_steps: Option<usize>,
    /// achieved or target.
    #[arg(long, alias = "regress_on", value_parser = parse_regress_on)]
    regress_on: Option<RegressOn>,
    #[arg(long, alias = "performance_scale")]
    performance_scale: Option<f64>,
}

fn parse_regress_on(s: &str) -> Result<RegressOn, String> {
    match s {
        "achieved" => Ok(RegressOn::Achieved),
        "target" => Ok(RegressOn::Target),
        _ => Err(format!("expected 'achieved' or 'target', got '{s}'")),
    }
}

impl RunArgs {
    /// Flag values as config-file keys.
    fn overrides(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        fn j<T: serde::Serialize>(v: T) -> Option<Value> {
            serde_json::to_value(v).ok()
        }
        put("seed", self.seed.and_then(j));
        put("out_dir", self.out.as_ref().and_then(j));
        put("n_functions", self.n_functions.and_then(j));
        put("n_agents", self.n_agents.and_then(j));
        put("n_tasks", self.n_tasks.and_then(j));
        put("omega", self.omega.and_then(j));
        put("theta", self.theta.and_then(j));
        put("tau", self.tau.and_then(j));
        put("mix_skills", self.mix_skills.and_then(j));
        put("generation_mode", self.generation_mode.and_then(j));
        put("delta", self.delta.and_then(j));
        put("passing_scheme", self.passing_scheme.and_then(j));
        put("replicates", self.replicates.and_then(j));
        put("max_steps", self.max_steps.and_then(j));
        put("ifd_steps", self.ifd_steps.and_then(j));
        put("dfd_steps", self.dfd_steps.and_then(j));
        put("regress_on", self.regress_on.and_then(j));
        put("performance_scale", self.performance_scale.and_then(j));
        if self.report {
            put("report", Some(Value::Bool(true)));
        }
        if self.no_heatmaps {
            put("heatmaps", Some(Value::Bool(false)));
        }
        if self.no_csv {
            put("csv", Some(Value::Bool(false)));
        }
        m
    }

    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(p) => Some(config::read_config_file(p)?),
            None => None,
        };
        let preset_name = self.preset.clone().or_else(|| {
            file.as_ref()
                .and_then(|m| m.get("preset"))
                .and_then(Value::as_str)
                .map(str::to_string)
        });
        let mut cfg = match preset_name {
            Some(name) => preset(&name)?,
            None => RunConfig::default(),
        };
        if let (Some(m), Some(p)) = (&file, &self.config) {
            cfg = cfg.overlay(m, &p.display().to_string())?;
        }
        cfg = cfg.overlay(&self.overrides(), "command line")?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Worker count from [`THREADS_ENV`]; `None` means one per core.
pub fn threads_from_env() -> Result<Option<usize>, ConfigError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .map(Some)
            .ok_or_else(|| ConfigError::Invalid(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

/// Everything a run produced.
pub struct RunOutputs {
    pub records: Vec<SweepRecord>,
    pub aggregates: Aggregates,
    pub written: Vec<PathBuf>,
}

/// Runs the sweep described by `cfg` and writes the enabled outputs.
pub fn execute(cfg: &RunConfig, threads: Option<usize>) -> crate::Result<RunOutputs> {
    let grid = cfg.grid().map_err(|e| crate::Error::InvalidParams(e.to_string()))?;
    let records = run_sweep_with_threads(&grid, &cfg.team_spec(), &cfg.params, threads)?;
    let aggregates = aggregate_cells(&records);

    let dir = &cfg.out_dir;
    std::fs::create_dir_all(dir)
        .map_err(|e| crate::Error::io(format!("cannot create output directory {}", dir.display()), e))?;
    let mut written = Vec::new();
    if cfg.csv {
        let p = dir.join("records.csv");
        emit_csv(&records, &p)?;
        written.push(p);
    }
    if cfg.heatmaps && !aggregates.cells.is_empty() {
        for m in Measure::HEATMAPS {
            let p = dir.join(format!("heatmap_{}.ppm", m.name()));
            emit_heatmap(&aggregates.cells, m, &p)?;
            written.push(p.with_extension("range.txt"));
            written.push(p);
        }
    }
    if cfg.report {
        let title = format!(
            "divsim report: preset {}, seed {}, {} replicates per cell",
            cfg.preset.as_deref().unwrap_or("none"),
            cfg.params.seed,
            cfg.params.replicates
        );
        let text = format_report(&aggregates, cfg.regress_on, cfg.performance_scale, &title);
        let p = dir.join("report.txt");
        std::fs::write(&p, &text).map_err(|e| crate::Error::io(format!("writing {}", p.display()), e))?;
        written.push(p);
    }
    Ok(RunOutputs {
        records,
        aggregates,
        written,
    })
}

fn print_summary(cfg: &RunConfig, out: &RunOutputs) {
    let ok: Vec<&SweepRecord> = out.records.iter().filter(|r| !r.is_failed()).collect();
    let mean = |f: &dyn Fn(&SweepRecord) -> Option<f64>| {
        let v: Vec<f64> = ok.iter().filter_map(|r| f(r)).collect();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    };
    println!(
        "divsim: preset {} | mode {} | scheme {} | tau {} | seed {}",
        cfg.preset.as_deref().unwrap_or("none"),
        cfg.params.generation_mode,
        cfg.params.passing_scheme,
        cfg.params.tau,
        cfg.params.seed
    );
    println!(
        "runs: {} ({} failed) over {} cells",
        out.records.len(),
        out.records.len() - ok.len(),
        out.aggregates.cells.len()
    );
    println!(
        "mean performance {:.4} | mean communication density {:.4}",
        mean(&|r| r.performance),
        mean(&|r| r.comm_density)
    );
    for p in &out.written {
        println!("wrote {}", p.display());
    }
}

/// Parses `argv`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Some(Command::Presets) => {
            for name in PRESETS {
                println!("{name}");
            }
            EXIT_OK
        }
        Some(Command::Run(args)) => run(&args),
        None => run(&RunArgs::default()),
    }
}

fn run(args: &RunArgs) -> i32 {
    let cfg = match args.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("divsim: {e}");
            return EXIT_CONFIG;
        }
    };
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("divsim: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = check_writable(&cfg.out_dir) {
        eprintln!(
            "divsim: output directory {} is not writable: {e}",
            cfg.out_dir.display()
        );
        return EXIT_RUNTIME;
    }
    match execute(&cfg, threads) {
        Ok(out) => {
            print_summary(&cfg, &out);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("divsim: run failed: {e}");
            EXIT_RUNTIME
        }
    }
}

fn check_writable(dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let probe = dir.join(".divsim-write-probe");
    std::fs::write(&probe, b"")?;
    std::fs::remove_file(probe)
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dihull::config::InstanceSource;
use dihull::{load_config, run_in, ExperimentConfig, ExperimentReport, HarnessError, Mode, Task};
use serde_json::Value;

/// Directed hulls of finite quasi-metric spaces.
#[derive(Parser)]
#[command(name = "dihull", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Experiment config (JSON); relative paths inside it resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Instance file, used when no config is given or to override the config's.
    #[arg(long, global = true)]
    instance: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Float-mode tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Report path; defaults to the config's output, then stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Record wall time in the report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the quasi-metric axioms.
    Validate,
    /// Embed every base point and check the isometry.
    Embed,
    /// Minimize the config's pair, optionally writing the sweep trace as JSON lines.
    Minimize {
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Hull distances between the config's points, optionally as CSV.
    Qe {
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Hull operations.
    Ops {
        #[command(subcommand)]
        op: Op,
    },
    /// Lifted segment between the first two points, optionally writing the distance table as CSV.
    Segment {
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Convexity verifiers.
    Check {
        #[command(subcommand)]
        what: Check,
    },
    /// Exhaustive searches.
    Search {
        #[command(subcommand)]
        what: Search,
    },
    /// Chebyshev radius, center, diameter and double closure.
    Chebyshev,
    /// Chebyshev center descent.
    Descent,
    /// Nonexpansive maps and fixed points.
    Fixpoint,
    /// The standard battery of checks on one instance.
    Suite,
}

#[derive(Subcommand)]
enum Op {
    Scalar,
    Oplus,
    Wlift,
}

#[derive(Subcommand)]
enum Check {
    Takahashi,
    Pair,
}

#[derive(Subcommand)]
enum Search {
    Counterexample {
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        bound: Option<u32>,
    },
}

fn task_of(c: &Command) -> Task {
    match c {
        Command::Validate => Task::Validate,
        Command::Embed => Task::Embed,
        Command::Minimize { .. } => Task::Minimize,
        Command::Qe { .. } => Task::Qe,
        Command::Ops { op: Op::Scalar } => Task::OpsScalar,
        Command::Ops { op: Op::Oplus } => Task::OpsOplus,
        Command::Ops { op: Op::Wlift } => Task::OpsWlift,
        Command::Segment { .. } => Task::Segment,
        Command::Check { what: Check::Takahashi } => Task::CheckTakahashi,
        Command::Check { what: Check::Pair } => Task::CheckPair,
        Command::Search { .. } => Task::SearchCounterexample,
        Command::Chebyshev => Task::Chebyshev,
        Command::Descent => Task::Descent,
        Command::Fixpoint => Task::Fixpoint,
        Command::Suite => Task::Suite,
    }
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

fn write_extras(cli: &Cli, report: &ExperimentReport) -> Result<(), HarnessError> {
    match &cli.command {
        Command::Minimize { trace: Some(p) } => {
            let mut lines = String::new();
            if let Some(Value::Array(steps)) = report.values.get("trace") {
                for (k, step) in steps.iter().enumerate() {
                    lines.push_str(&serde_json::json!({"sweep": k, "pair": step}).to_string());
                    lines.push('\n');
                }
            }
            write(p, &lines)
        }
        Command::Qe { csv: Some(p) } | Command::Segment { csv: Some(p) } => {
            let key = if matches!(cli.command, Command::Qe { .. }) { "distances" } else { "table" };
            let rows: Vec<Vec<String>> = match report.values.get(key) {
                Some(Value::Array(rows)) => rows
                    .iter()
                    .map(|r| r.as_array().into_iter().flatten().map(|v| v.as_str().unwrap_or("").to_string()).collect())
                    .collect(),
                _ => Vec::new(),
            };
            write(p, &dihull::format::table_csv(&rows))
        }
        _ => Ok(()),
    }
}

fn execute(cli: &Cli) -> Result<ExperimentReport, HarnessError> {
    let g = &cli.global;
    let (mut cfg, base) = match &g.config {
        Some(p) => (load_config(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (ExperimentConfig::default(), PathBuf::from(".")),
    };
    cfg.task = task_of(&cli.command);
    if let Some(p) = &g.instance {
        let abs = std::env::current_dir().map(|d| d.join(p)).unwrap_or_else(|_| p.clone());
        cfg.instance = Some(InstanceSource::Path { path: abs.display().to_string() });
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(m) = g.mode {
        cfg.mode = m;
    }
    if g.tol.is_some() {
        cfg.tol = g.tol;
    }
    if let Command::Search { what: Search::Counterexample { max_n, bound } } = &cli.command {
        cfg.max_n = max_n.unwrap_or(cfg.max_n);
        cfg.bound = bound.unwrap_or(cfg.bound);
    }
    let start = Instant::now();
    let mut report = run_in(&cfg, &base)?;
    if g.timing {
        let ms = start.elapsed().as_millis() as u64;
        report.wall_time_ms = Some(ms);
        eprintln!("wall time: {ms} ms");
    }
    write_extras(cli, &report)?;
    let out = g.output.clone().or_else(|| cfg.output.as_ref().map(|o| base.join(o)));
    match out {
        Some(p) => write(&p, &report.to_json())?,
        None => print!("{}", report.to_json()),
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(r) if r.passed() => ExitCode::SUCCESS,
        Ok(r) => {
            for v in r.verdicts.iter().filter(|v| !v.pass) {
                eprintln!("FAIL {}{}", v.name, v.detail.as_ref().map(|d| format!(": {d}")).unwrap_or_default());
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

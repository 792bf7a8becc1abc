use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blowup_core::scenario::{list_presets, preset, run_scenario, Scenario, PRESET_NAMES};
use blowup_core::Error;
use clap::{Args, Parser, Subcommand};
use log::info;

const THREADS_VAR: &str = "BLOWUP_SIM_THREADS";

#[derive(Parser)]
#[command(
    name = "blowup-sim",
    version,
    about = "Free-particle dispersive blowup scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a config file and write its artifacts.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (defaults to [output] dir in the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the built-in presets.
    ListPresets,
    /// Check a configuration and report every violated constraint.
    Validate {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args)]
struct Source {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config value, e.g. `--set grid.count=2048`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, value_name = "N")]
    grid_count: Option<usize>,
    #[arg(long, value_name = "DT")]
    dt: Option<f64>,
    #[arg(long, value_name = "T")]
    t_end: Option<f64>,
    #[arg(long, value_name = "F")]
    clip_fraction: Option<f64>,
    /// Number of trajectories; 0 disables them.
    #[arg(long, value_name = "M")]
    trajectories: Option<usize>,
}

impl Source {
    fn overrides(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(n) = self.grid_count {
            out.push(format!("grid.count={n}"));
        }
        if let Some(dt) = self.dt {
            out.push(format!("time.dt={dt}"));
        }
        if let Some(t) = self.t_end {
            out.push(format!("time.end={t}"));
        }
        if let Some(f) = self.clip_fraction {
            out.push(format!("scenario.clip_fraction={f}"));
        }
        if let Some(m) = self.trajectories {
            out.push(format!("trajectories.count={m}"));
        }
        out.extend(self.overrides.iter().cloned());
        out
    }

    fn load(&self) -> Result<Scenario, Error> {
        let text = match (&self.preset, &self.config) {
            (Some(name), _) => preset(name)
                .ok_or_else(|| {
                    Error::Config(vec![format!(
                        "unknown preset `{name}`; available: {}",
                        PRESET_NAMES.join(", ")
                    )])
                })?
                .to_ini(),
            (None, Some(path)) => fs::read_to_string(path).map_err(|e| {
                Error::Config(vec![format!("cannot read config {}: {e}", path.display())])
            })?,
            (None, None) => unreachable!("clap requires one source"),
        };
        Scenario::load(&text, &self.overrides())
    }
}

fn thread_cap() -> Result<Option<usize>, Error> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(vec![format!(
                "{THREADS_VAR} must be a positive integer, got `{raw}`"
            )])),
        },
    }
}

fn run(source: &Source, out: Option<&Path>) -> Result<(), Error> {
    let scenario = source.load()?;
    let dir = match (out, &scenario.output.dir) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => {
            return Err(Error::Config(vec![
                "no output directory: pass --out or set [output] dir".into(),
            ]))
        }
    };
    let summary = match thread_cap()? {
        Some(n) => {
            info!("limiting workers to {n} threads");
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(vec![format!("cannot build a {n}-thread pool: {e}")]))?;
            pool.install(|| run_scenario(&scenario, &dir))?
        }
        None => run_scenario(&scenario, &dir)?,
    };
    for f in &summary.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::ListPresets => {
            for (name, description) in list_presets() {
                println!("{name:<6}  {description}");
            }
            Ok(())
        }
        Command::Validate { source } => source.load().map(|s| {
            println!(
                "ok: {} ({}, {} packet(s))",
                s.name,
                s.mode.name(),
                s.packets.len()
            );
        }),
        Command::Run { source, out } => run(source, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

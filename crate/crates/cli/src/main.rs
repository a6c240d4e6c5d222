mod config;
mod presets;
mod report;
mod runner;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "subdiff", about = "Decay-rate experiments for nonlocal subdiffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment config (a JSON file path or a preset name).
    Run {
        config: String,
        /// Output directory; defaults to the config's `out`, then `runs/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the number of logical cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Multiply every claim tolerance by this factor.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
    },
    /// Summarize a finished run and write gnuplot data.
    Report { dir: PathBuf },
    /// Manage built-in presets.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
}

#[derive(Subcommand)]
enum PresetsAction {
    /// List preset names with their claim kinds.
    List,
}

fn load_config(arg: &str) -> Result<ExperimentConfig> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    } else if let Some(preset) = presets::find(arg) {
        preset.to_string()
    } else {
        anyhow::bail!("`{arg}` is neither a config file nor a preset name (see `subdiff presets list`)");
    };
    serde_json::from_str(&text).with_context(|| format!("parsing config `{arg}`"))
}

/// Exit codes: 0 all claims pass, 1 a claim failed, 2 usage or config error.
fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("claim failure");
            1
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            out,
            threads,
            tol_scale,
        } => {
            if !(tol_scale > 0.0) {
                anyhow::bail!("--tol-scale must be positive");
            }
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .context("initializing thread pool")?;
            }
            let cfg = load_config(&config)?;
            let dir = out
                .or_else(|| cfg.out.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("runs").join(&cfg.name));
            let output = runner::run(&cfg.experiment, tol_scale)?;
            runner::write_artifacts(&dir, &cfg.name, &output)?;
            report::report(&dir)
        }
        Command::Report { dir } => report::report(&dir),
        Command::Presets { action } => match action {
            PresetsAction::List => {
                for (name, text) in presets::PRESETS {
                    let cfg: ExperimentConfig = serde_json::from_str(text)
                        .with_context(|| format!("preset {name}"))?;
                    let kind = match cfg.experiment {
                        config::ExperimentKind::Relaxation(_) => "relaxation",
                        config::ExperimentKind::BoundsSuite(_) => "bounds-suite",
                        config::ExperimentKind::DecaySweep(_) => "decay-sweep",
                        config::ExperimentKind::Fundsol(_) => "fundsol",
                        config::ExperimentKind::Energy(_) => "energy",
                    };
                    println!("{name:<24} {kind}");
                }
                Ok(true)
            }
        },
    }
}

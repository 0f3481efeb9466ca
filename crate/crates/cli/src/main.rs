use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use visco_core::harness::{
    oracle_check, report, run_family, run_single, write_report, ConfigMap, FamilyArtifacts,
    RunStatus,
};
use visco_core::Error;

/// Pseudo-spectral runs, parameter sweeps and their analysis.
#[derive(Parser)]
#[command(name = "visco", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every member of a sweep and write a manifest.
    Family {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the report bundle of a completed family directory.
    Analyze {
        /// Family directory holding `manifest.json`.
        #[arg(long)]
        dir: PathBuf,
        /// Optional file with `analysis.*` keys.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report directory (default: `<dir>/report`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare PDE-transported F with the Lagrangian flow map.
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidFamily(_) | Error::InvalidGrid(_) => 2,
        e if e.is_numerical() => 3,
        Error::MissingArtifacts(_) | Error::Format { .. } => 4,
        _ => 1,
    }
}

fn load_config(path: &Path) -> Result<ConfigMap, Error> {
    ConfigMap::load(path).map_err(|e| match e {
        Error::Io { path, source } => {
            Error::Config(format!("cannot read {}: {source}", path.display()))
        }
        other => other,
    })
}

fn print(v: serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&v).expect("JSON values always serialize")
    );
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, out } => {
            let map = load_config(&config)?;
            let mut cfg = map.run_config()?;
            if out.is_some() {
                cfg.output_dir = out;
            }
            let output = run_single(&cfg, &map.k_list()?)?;
            let first = &output.records[0];
            let last = &output.records[output.records.len() - 1];
            print(json!({
                "steps": cfg.steps(),
                "t": output.final_state().t,
                "energy_initial": first.total_energy(),
                "energy_final": last.total_energy(),
                "res_detF_linf": last.res_det_f_linf,
                "snapshots": output.snapshots.len(),
                "output_dir": cfg.output_dir,
            }));
        }
        Command::Family { config, out } => {
            let family = load_config(&config)?.family()?;
            let manifest = run_family(&family, &out)?;
            let runs: Vec<_> = manifest
                .runs
                .iter()
                .map(|r| json!({"label": r.label, "status": r.status, "error": r.error, "wall_time_s": r.wall_time_s}))
                .collect();
            print(
                json!({"dir": out, "reference": manifest.reference, "workers": manifest.workers, "runs": runs}),
            );
            if let Some(failed) = manifest.runs.iter().find(|r| r.status == RunStatus::Failed) {
                return Err(Error::ConstraintViolation(format!(
                    "run {} failed: {}",
                    failed.label,
                    failed.error.as_deref().unwrap_or("unknown error")
                )));
            }
        }
        Command::Analyze { dir, config, out } => {
            let artifacts = FamilyArtifacts::load(&dir)?;
            let r = artifacts.reference_run();
            let map = match config {
                Some(p) => load_config(&p)?,
                None => ConfigMap::default(),
            };
            let analysis = map.analysis(r.snapshots[r.snapshots.len() - 1].t, r.config.length)?;
            let bundle = report(&artifacts, &analysis)?;
            let out = out.unwrap_or_else(|| dir.join("report"));
            write_report(&bundle, &out)?;
            print(json!({
                "report_dir": out,
                "reference": bundle.reference,
                "reference_note": bundle.reference_note,
                "defect_sup": bundle.defect.trend,
                "strong_conv_rate": bundle.strong_conv.fitted_rate,
                "strong_conv_monotone": bundle.strong_conv.monotone,
            }));
        }
        Command::Oracle { config } => {
            let map = load_config(&config)?;
            let r = oracle_check(&map.run_config()?, map.oracle_options()?)?;
            print(serde_json::to_value(r)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("visco: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

use std::fs;
use std::path::Path;

use crate::diagnostics::{moment, write_records_csv, DiagnosticsRecord};
use crate::dynamics::{init, write_snapshot, Integrator, RunConfig, State};
use crate::error::{Error, Result};

/// Everything one run produced, kept in memory.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub records: Vec<DiagnosticsRecord>,
    /// Snapshots at step 0, every `snapshot_every` steps, and the last step.
    pub snapshots: Vec<State>,
    /// Step index of each snapshot.
    pub snapshot_steps: Vec<usize>,
}

impl RunOutput {
    pub fn final_state(&self) -> &State {
        self.snapshots
            .last()
            .expect("a run always stores its initial state")
    }
}

pub fn snapshot_file_name(step: usize) -> String {
    format!("snap_{step:07}.vel2")
}

/// Integrates one configuration, measuring diagnostics every
/// `diagnostics_every` steps (and at the last step). When `output_dir` is set,
/// writes `config.json`, `diagnostics.csv` and `snapshots/*.vel2` there.
pub fn run_single(config: &RunConfig, k_list: &[f64]) -> Result<RunOutput> {
    config.validate()?;
    let grid = config.grid()?;
    let state0 = init(&config.init, &grid)?;
    let params = config.params;
    let integrator = Integrator::new(&grid, params, config.dt).with_cfl(config.cfl);
    let steps = config.steps();
    let m0 = moment(&state0.f);

    let mut records = vec![DiagnosticsRecord::measure(
        &state0, &params, &m0, None, k_list,
    )?];
    let mut snapshots = vec![state0.clone()];
    let mut snapshot_steps = vec![0];
    let mut last_measured = state0.clone();

    integrator.advance(&state0, steps, |k, s| {
        let last = k == steps;
        if k % config.diagnostics_every == 0 || last {
            records.push(DiagnosticsRecord::measure(
                s,
                &params,
                &m0,
                Some(&last_measured),
                k_list,
            )?);
            last_measured = s.clone();
        }
        if (config.snapshot_every > 0 && k % config.snapshot_every == 0) || last {
            snapshots.push(s.clone());
            snapshot_steps.push(k);
        }
        Ok(())
    })?;

    let out = RunOutput {
        config: config.clone(),
        records,
        snapshots,
        snapshot_steps,
    };
    if let Some(dir) = &config.output_dir {
        write_run(dir, &out, k_list)?;
    }
    Ok(out)
}

fn write_run(dir: &Path, out: &RunOutput, k_list: &[f64]) -> Result<()> {
    let snap_dir = dir.join("snapshots");
    fs::create_dir_all(&snap_dir).map_err(|e| Error::io(&snap_dir, e))?;
    let cfg_path = dir.join("config.json");
    let text = serde_json::to_string_pretty(&out.config)?;
    fs::write(&cfg_path, text).map_err(|e| Error::io(&cfg_path, e))?;
    let csv_path = dir.join("diagnostics.csv");
    let file = fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_records_csv(std::io::BufWriter::new(file), &out.records, k_list)?;
    for (s, &k) in out.snapshots.iter().zip(&out.snapshot_steps) {
        write_snapshot(&snap_dir.join(snapshot_file_name(k)), s, &out.config.params)?;
    }
    Ok(())
}

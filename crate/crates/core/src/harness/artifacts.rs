use std::fs;
use std::path::Path;

use crate::diagnostics::{csv_header, read_records_csv, DiagnosticsRecord};
use crate::dynamics::{read_snapshot, RunConfig, State};
use crate::error::{Error, Result};
use crate::harness::family::{sha256_file, FamilyManifest, RunStatus};
use crate::harness::{RunFamily, RunOutput};

/// One completed run as seen by the post-processing.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub label: String,
    /// Swept parameter value of this run.
    pub param: f64,
    pub config: RunConfig,
    pub records: Vec<DiagnosticsRecord>,
    /// Snapshots in time order.
    pub snapshots: Vec<State>,
}

/// The completed runs of a family; `reference` indexes `runs`.
#[derive(Debug, Clone)]
pub struct FamilyArtifacts {
    /// Name of the swept parameter.
    pub sweep: String,
    pub runs: Vec<RunArtifacts>,
    pub reference: usize,
    pub k_list: Vec<f64>,
    /// Labels of runs that failed and are absent from `runs`.
    pub skipped: Vec<String>,
}

impl FamilyArtifacts {
    pub fn from_outputs(family: &RunFamily, outputs: Vec<RunOutput>) -> Self {
        let labels = family.labels();
        let params = family.sweep.values();
        let runs = outputs
            .into_iter()
            .enumerate()
            .map(|(i, o)| RunArtifacts {
                label: labels[i].clone(),
                param: params[i],
                config: o.config,
                records: o.records,
                snapshots: o.snapshots,
            })
            .collect();
        Self {
            sweep: family.sweep.name().to_string(),
            runs,
            reference: family.reference(),
            k_list: family.k_list.clone(),
            skipped: Vec::new(),
        }
    }

    /// Loads a family directory written by
    /// [`run_family`](crate::harness::run_family), checking every file hash.
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest = FamilyManifest::read(dir)?;
        let k_list = manifest.family.k_list.clone();
        let mut runs = Vec::new();
        let mut skipped = Vec::new();
        let mut reference = None;
        for entry in &manifest.runs {
            if entry.status != RunStatus::Ok {
                if entry.index == manifest.reference {
                    return Err(Error::MissingArtifacts(format!(
                        "reference run {} failed: {}",
                        entry.label,
                        entry.error.as_deref().unwrap_or("unknown error")
                    )));
                }
                skipped.push(entry.label.clone());
                continue;
            }
            let run_dir = dir.join(&entry.dir);
            for (name, digest) in &entry.files {
                let path = run_dir.join(name);
                if !path.is_file() {
                    return Err(Error::MissingArtifacts(format!(
                        "{} not found",
                        path.display()
                    )));
                }
                if &sha256_file(&path)? != digest {
                    return Err(Error::Format {
                        path,
                        reason: "SHA-256 differs from the manifest".into(),
                    });
                }
            }
            let csv_path = run_dir.join("diagnostics.csv");
            if !entry.files.contains_key("diagnostics.csv") {
                return Err(Error::MissingArtifacts(format!(
                    "{} not in manifest",
                    csv_path.display()
                )));
            }
            let file = fs::File::open(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
            let (header, rows) = read_records_csv(file)?;
            if header != csv_header(&k_list) {
                return Err(Error::Format {
                    path: csv_path,
                    reason: "unexpected CSV header".into(),
                });
            }
            let records = rows
                .iter()
                .map(|r| DiagnosticsRecord::from_values(r))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Format {
                    path: csv_path.clone(),
                    reason: "short row".into(),
                })?;
            let snapshots = entry
                .files
                .keys()
                .filter(|k| k.starts_with("snapshots/") && k.ends_with(".vel2"))
                .map(|k| read_snapshot(&run_dir.join(k)).map(|(s, _)| s))
                .collect::<Result<Vec<_>>>()?;
            if snapshots.is_empty() {
                return Err(Error::MissingArtifacts(format!(
                    "no snapshots in {}",
                    run_dir.display()
                )));
            }
            if entry.index == manifest.reference {
                reference = Some(runs.len());
            }
            runs.push(RunArtifacts {
                label: entry.label.clone(),
                param: entry.param,
                config: entry.config.clone(),
                records,
                snapshots,
            });
        }
        let reference = reference.ok_or_else(|| {
            Error::MissingArtifacts("reference run absent from the manifest".into())
        })?;
        Ok(Self {
            sweep: manifest.family.sweep.name().to_string(),
            runs,
            reference,
            k_list,
            skipped,
        })
    }

    pub fn reference_run(&self) -> &RunArtifacts {
        &self.runs[self.reference]
    }
}

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::RunConfig;
use crate::error::{Error, Result};
use crate::harness::{run_single, FamilyArtifacts, RunFamily, RunOutput};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub label: String,
    pub param: f64,
    /// Run directory relative to the family directory.
    pub dir: String,
    pub config: RunConfig,
    pub status: RunStatus,
    pub error: Option<String>,
    pub wall_time_s: f64,
    /// SHA-256 of every file written, keyed by path relative to `dir`.
    pub files: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyManifest {
    pub family: RunFamily,
    pub reference: usize,
    pub workers: usize,
    pub runs: Vec<ManifestEntry>,
}

impl FamilyManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        if !path.is_file() {
            return Err(Error::MissingArtifacts(format!(
                "{} not found",
                path.display()
            )));
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.clone(),
            reason: e.to_string(),
        })
    }
}

/// Worker count: `VISCO_THREADS` when set to a positive integer, otherwise the
/// available parallelism.
pub fn worker_count() -> usize {
    std::env::var("VISCO_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn pool(runs: usize) -> Result<(rayon::ThreadPool, usize)> {
    let workers = worker_count().min(runs.max(1));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok((pool, workers))
}

pub(crate) fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn hash_tree(root: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![PathBuf::new()];
    while let Some(rel) = stack.pop() {
        let abs = root.join(&rel);
        for entry in fs::read_dir(&abs).map_err(|e| Error::io(&abs, e))? {
            let entry = entry.map_err(|e| Error::io(&abs, e))?;
            let name = rel.join(entry.file_name());
            if entry.path().is_dir() {
                stack.push(name);
            } else {
                let key = name.to_string_lossy().replace('\\', "/");
                out.insert(key, sha256_file(&entry.path())?);
            }
        }
    }
    Ok(out)
}

/// Runs every member of the family under `out_dir/run_XX`, in parallel, and
/// writes `manifest.json`. A failed run is recorded and the others continue.
pub fn run_family(family: &RunFamily, out_dir: &Path) -> Result<FamilyManifest> {
    family.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let configs = family.configs();
    let labels = family.labels();
    let params = family.sweep.values();
    let (pool, workers) = pool(configs.len())?;

    let entries: Vec<ManifestEntry> = pool.install(|| {
        configs
            .par_iter()
            .enumerate()
            .map(|(i, cfg)| {
                let dir = format!("run_{i:02}");
                let mut cfg = cfg.clone();
                cfg.output_dir = Some(out_dir.join(&dir));
                let start = Instant::now();
                let result = run_single(&cfg, &family.k_list);
                let wall_time_s = start.elapsed().as_secs_f64();
                cfg.output_dir = None;
                let (status, error, files) =
                    match result.and_then(|_| hash_tree(&out_dir.join(&dir))) {
                        Ok(files) => (RunStatus::Ok, None, files),
                        Err(e) => (RunStatus::Failed, Some(e.to_string()), BTreeMap::new()),
                    };
                ManifestEntry {
                    index: i,
                    label: labels[i].clone(),
                    param: params[i],
                    dir,
                    config: cfg,
                    status,
                    error,
                    wall_time_s,
                    files,
                }
            })
            .collect()
    });

    let manifest = FamilyManifest {
        family: family.clone(),
        reference: family.reference(),
        workers,
        runs: entries,
    };
    let path = out_dir.join(MANIFEST_FILE);
    fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Same runs without touching the disk; the first failure (in sweep order)
/// is returned as the error.
pub fn run_family_in_memory(family: &RunFamily) -> Result<FamilyArtifacts> {
    family.validate()?;
    let mut configs = family.configs();
    for c in &mut configs {
        c.output_dir = None;
    }
    let (pool, _) = pool(configs.len())?;
    let outputs: Vec<Result<RunOutput>> = pool.install(|| {
        configs
            .par_iter()
            .map(|c| run_single(c, &family.k_list))
            .collect()
    });
    let outputs = outputs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(FamilyArtifacts::from_outputs(family, outputs))
}

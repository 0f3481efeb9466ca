//! Parameter sweeps, artifact files and the convergence diagnostics computed
//! across a family of runs.

mod analysis;
mod artifacts;
mod config;
mod family;
mod oracle;
mod report;
mod run;

use serde::{Deserialize, Serialize};

use crate::dynamics::RunConfig;
use crate::error::{Error, Result};

pub use analysis::{
    flux_pairing, osc_defect, pairing_integrands, strong_conv, CutoffFn, DefectReport, DefectRow,
    PairingReport, PairingRow, StrongConvReport, StrongConvRow, REFERENCE_PROXY,
};
pub use artifacts::{FamilyArtifacts, RunArtifacts};
pub use config::{ConfigMap, KNOWN_KEYS};
pub use family::{
    run_family, run_family_in_memory, worker_count, FamilyManifest, ManifestEntry, RunStatus,
    MANIFEST_FILE,
};
pub use oracle::{oracle_check, OracleReport};
pub use report::{report, write_report, ReportBundle};
pub use run::{run_single, snapshot_file_name, RunOutput};

/// Truncation levels used when none are configured.
pub const DEFAULT_K_LIST: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

/// The one parameter a family varies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum Sweep {
    Eta(Vec<f64>),
    Delta(Vec<f64>),
    Grid(Vec<usize>),
    Dt(Vec<f64>),
}

impl Sweep {
    pub fn name(&self) -> &'static str {
        match self {
            Sweep::Eta(_) => "eta",
            Sweep::Delta(_) => "delta",
            Sweep::Grid(_) => "n",
            Sweep::Dt(_) => "dt",
        }
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Swept values as reals.
    pub fn values(&self) -> Vec<f64> {
        match self {
            Sweep::Eta(v) | Sweep::Delta(v) | Sweep::Dt(v) => v.clone(),
            Sweep::Grid(v) => v.iter().map(|&n| n as f64).collect(),
        }
    }

    /// Index of the reference run: the finest grid, otherwise the smallest value.
    pub fn reference(&self) -> usize {
        let v = self.values();
        let pick_max = matches!(self, Sweep::Grid(_));
        let mut best = 0;
        for (i, &x) in v.iter().enumerate() {
            if (pick_max && x > v[best]) || (!pick_max && x < v[best]) {
                best = i;
            }
        }
        best
    }
}

/// A base configuration and a one-parameter sweep around it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFamily {
    pub base: RunConfig,
    pub sweep: Sweep,
    /// Seed shared by every run.
    pub seed: u64,
    /// Truncation levels for the per-run renormalization columns.
    pub k_list: Vec<f64>,
}

impl RunFamily {
    pub fn new(base: RunConfig, sweep: Sweep) -> Result<Self> {
        let family = Self {
            seed: base.init.seed,
            base,
            sweep,
            k_list: DEFAULT_K_LIST.to_vec(),
        };
        family.validate()?;
        Ok(family)
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.sweep.values();
        if v.is_empty() {
            return Err(Error::InvalidFamily(format!(
                "{} list is empty",
                self.sweep.name()
            )));
        }
        let up = v.windows(2).all(|w| w[1] > w[0]);
        let down = v.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::InvalidFamily(format!(
                "{} list {:?} is not strictly monotone",
                self.sweep.name(),
                v
            )));
        }
        if self.k_list.is_empty() || self.k_list.iter().any(|&k| !(k > 0.0 && k.is_finite())) {
            return Err(Error::InvalidFamily(format!(
                "bad k_list {:?}",
                self.k_list
            )));
        }
        for cfg in self.configs() {
            cfg.validate()
                .map_err(|e| Error::InvalidFamily(e.to_string()))?;
        }
        Ok(())
    }

    /// Run configurations in sweep order. Snapshot and diagnostics intervals
    /// are kept fixed in time when `dt` is swept.
    pub fn configs(&self) -> Vec<RunConfig> {
        let mut base = self.base.clone();
        base.init.seed = self.seed;
        let rescale = |every: usize, dt: f64| -> usize {
            if every == 0 {
                0
            } else {
                ((every as f64 * self.base.dt / dt).round() as usize).max(1)
            }
        };
        let build = |f: &dyn Fn(&mut RunConfig)| {
            let mut c = base.clone();
            f(&mut c);
            c
        };
        match &self.sweep {
            Sweep::Eta(v) => v.iter().map(|&x| build(&|c| c.params.eta = x)).collect(),
            Sweep::Delta(v) => v.iter().map(|&x| build(&|c| c.params.delta = x)).collect(),
            Sweep::Grid(v) => v.iter().map(|&n| build(&|c| c.n = n)).collect(),
            Sweep::Dt(v) => v
                .iter()
                .map(|&dt| {
                    build(&|c| {
                        c.dt = dt;
                        c.snapshot_every = rescale(base.snapshot_every, dt);
                        c.diagnostics_every = rescale(base.diagnostics_every, dt);
                    })
                })
                .collect(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        let name = self.sweep.name();
        match &self.sweep {
            Sweep::Grid(v) => v.iter().map(|n| format!("{name}={n}")).collect(),
            _ => self
                .sweep
                .values()
                .iter()
                .map(|x| format!("{name}={x}"))
                .collect(),
        }
    }

    pub fn reference(&self) -> usize {
        self.sweep.reference()
    }
}

/// Space-time window, ball and levels used by the family analyses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub k_list: Vec<f64>,
    pub t0: f64,
    pub t1: f64,
    pub mask_center: [f64; 2],
    pub mask_radius: f64,
    /// Caps `M` of the cutoff catalog.
    pub cutoffs: Vec<f64>,
}

impl AnalysisConfig {
    /// Whole run window, the centered ball of radius `L/4`, default levels.
    pub fn defaults(t_end: f64, length: f64) -> Self {
        Self {
            k_list: DEFAULT_K_LIST.to_vec(),
            t0: 0.0,
            t1: t_end,
            mask_center: [0.5 * length, 0.5 * length],
            mask_radius: 0.25 * length,
            cutoffs: vec![2.0, 4.0, 8.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t1 >= self.t0) {
            return Err(Error::Config(format!(
                "analysis window [{}, {}] is empty",
                self.t0, self.t1
            )));
        }
        if !(self.mask_radius > 0.0) {
            return Err(Error::Config(
                "analysis.mask_radius must be positive".into(),
            ));
        }
        if self.k_list.is_empty() || self.k_list.iter().any(|&k| !(k > 0.0)) {
            return Err(Error::Config(format!(
                "bad analysis.k_list {:?}",
                self.k_list
            )));
        }
        if self.cutoffs.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::Config(format!(
                "bad analysis.cutoffs {:?}",
                self.cutoffs
            )));
        }
        Ok(())
    }

    pub fn mask(&self, grid: &crate::spectral::Grid2) -> crate::spectral::BallMask {
        crate::spectral::BallMask::new(grid, self.mask_center, self.mask_radius)
    }
}

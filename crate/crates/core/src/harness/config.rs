//! Flat `key=value` configuration files with dotted keys.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown or repeated
//! keys are errors. Lists are comma separated.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::dynamics::{InitSpec, InitVariant, ModelParams, RunConfig};
use crate::error::{Error, Result};
use crate::harness::{AnalysisConfig, RunFamily, Sweep, DEFAULT_K_LIST};

pub const KNOWN_KEYS: &[&str] = &[
    "grid.n",
    "grid.length",
    "params.mu",
    "params.eta",
    "params.delta",
    "time.dt",
    "time.t_end",
    "time.cfl",
    "init.variant",
    "init.amplitude",
    "init.modes",
    "init.stream_amplitude",
    "init.warm_time",
    "init.seed",
    "output.dir",
    "output.snapshot_every",
    "output.diagnostics_every",
    "diagnostics.k_list",
    "sweep.eta_list",
    "sweep.delta_list",
    "sweep.grid_list",
    "sweep.dt_list",
    "family.seed",
    "analysis.k_list",
    "analysis.t0",
    "analysis.t1",
    "analysis.mask_center",
    "analysis.mask_radius",
    "analysis.cutoffs",
    "oracle.upsample",
    "oracle.substeps",
];

/// Parsed `key=value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key=value, got {line:?}",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Config(format!(
                    "line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            if entries
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(Error::Config(format!(
                    "line {}: duplicate key {key:?}",
                    lineno + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn has_prefix(&self, prefix: &str) -> bool {
        self.entries.keys().any(|k| k.starts_with(prefix))
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::Config(format!("{key} = {v:?}: {e}")))
            })
            .transpose()
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<T>()
                            .map_err(|e| Error::Config(format!("{key} item {s:?}: {e}")))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let d = RunConfig::default();
        let params = ModelParams {
            mu: self.num("params.mu")?.unwrap_or(d.params.mu),
            eta: self.num("params.eta")?.unwrap_or(d.params.eta),
            delta: self.num("params.delta")?.unwrap_or(d.params.delta),
        };
        let seed = match self.num("family.seed")? {
            Some(s) => s,
            None => self.num("init.seed")?.unwrap_or(0),
        };
        let variant = match self.get("init.variant").unwrap_or("equilibrium") {
            "equilibrium" => InitVariant::Equilibrium,
            "taylor_green" => InitVariant::TaylorGreen {
                amplitude: self.num("init.amplitude")?.unwrap_or(1.0),
                modes: self.num("init.modes")?.unwrap_or(1),
            },
            "warm_start" => InitVariant::WarmStart {
                stream_amplitude: self.num("init.stream_amplitude")?.unwrap_or(0.5),
                warm_time: self.num("init.warm_time")?.unwrap_or(0.2),
            },
            other => return Err(Error::Config(format!("unknown init.variant {other:?}"))),
        };
        let cfg = RunConfig {
            n: self.num("grid.n")?.unwrap_or(d.n),
            length: self.num("grid.length")?.unwrap_or(d.length),
            params,
            dt: self.num("time.dt")?.unwrap_or(d.dt),
            t_end: self.num("time.t_end")?.unwrap_or(d.t_end),
            init: InitSpec { variant, seed },
            snapshot_every: self
                .num("output.snapshot_every")?
                .unwrap_or(d.snapshot_every),
            diagnostics_every: self
                .num("output.diagnostics_every")?
                .unwrap_or(d.diagnostics_every),
            cfl: self.num("time.cfl")?.unwrap_or(d.cfl),
            output_dir: self.get("output.dir").map(PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn k_list(&self) -> Result<Vec<f64>> {
        Ok(self
            .list("diagnostics.k_list")?
            .unwrap_or_else(|| DEFAULT_K_LIST.to_vec()))
    }

    pub fn family(&self) -> Result<RunFamily> {
        let base = self.run_config()?;
        let sweeps: Vec<Sweep> = [
            self.list("sweep.eta_list")?.map(Sweep::Eta),
            self.list("sweep.delta_list")?.map(Sweep::Delta),
            self.list::<usize>("sweep.grid_list")?.map(Sweep::Grid),
            self.list("sweep.dt_list")?.map(Sweep::Dt),
        ]
        .into_iter()
        .flatten()
        .collect();
        let sweep = match sweeps.len() {
            1 => sweeps.into_iter().next().unwrap(),
            0 => return Err(Error::InvalidFamily("no sweep.* list given".into())),
            _ => {
                return Err(Error::InvalidFamily(
                    "exactly one sweep.* list is allowed".into(),
                ))
            }
        };
        let family = RunFamily {
            seed: base.init.seed,
            base,
            sweep,
            k_list: self.k_list()?,
        };
        family.validate()?;
        Ok(family)
    }

    pub fn analysis(&self, t_end: f64, length: f64) -> Result<AnalysisConfig> {
        let d = AnalysisConfig::defaults(t_end, length);
        let center = match self.list::<f64>("analysis.mask_center")? {
            Some(v) if v.len() == 2 => [v[0], v[1]],
            Some(v) => {
                return Err(Error::Config(format!(
                    "analysis.mask_center needs 2 values, got {}",
                    v.len()
                )))
            }
            None => d.mask_center,
        };
        let a = AnalysisConfig {
            k_list: self.list("analysis.k_list")?.unwrap_or(d.k_list),
            t0: self.num("analysis.t0")?.unwrap_or(d.t0),
            t1: self.num("analysis.t1")?.unwrap_or(d.t1),
            mask_center: center,
            mask_radius: self.num("analysis.mask_radius")?.unwrap_or(d.mask_radius),
            cutoffs: self.list("analysis.cutoffs")?.unwrap_or(d.cutoffs),
        };
        a.validate()?;
        Ok(a)
    }

    pub fn oracle_options(&self) -> Result<crate::dynamics::FlowMapOptions> {
        let d = crate::dynamics::FlowMapOptions {
            substeps: 2,
            upsample: 4,
        };
        Ok(crate::dynamics::FlowMapOptions {
            substeps: self.num("oracle.substeps")?.unwrap_or(d.substeps),
            upsample: self.num("oracle.upsample")?.unwrap_or(d.upsample),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_run_config() {
        let text = "\
# Taylor-Green run
grid.n = 64
params.eta=0.05
params.delta=0.01
time.dt=0.002
time.t_end=0.5
init.variant=taylor_green
init.amplitude=1.5
output.snapshot_every=25
";
        let cfg = ConfigMap::parse(text).unwrap().run_config().unwrap();
        assert_eq!(cfg.n, 64);
        assert_eq!(cfg.params, ModelParams::regularized(0.05, 0.01));
        assert_eq!(
            cfg.init.variant,
            InitVariant::TaylorGreen {
                amplitude: 1.5,
                modes: 1
            }
        );
        assert_eq!(cfg.steps(), 250);
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        assert!(matches!(
            ConfigMap::parse("grid.nn=3"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ConfigMap::parse("grid.n=3\ngrid.n=4"),
            Err(Error::Config(_))
        ));
        assert!(matches!(ConfigMap::parse("grid.n"), Err(Error::Config(_))));
        let bad = ConfigMap::parse("grid.n=abc").unwrap();
        assert!(matches!(bad.run_config(), Err(Error::Config(_))));
        let bad = ConfigMap::parse("init.variant=vortex").unwrap();
        assert!(bad.run_config().is_err());
        let bad = ConfigMap::parse("params.eta=-1").unwrap();
        assert!(bad.run_config().is_err());
    }

    #[test]
    fn family_needs_exactly_one_monotone_sweep() {
        let f = ConfigMap::parse("sweep.eta_list=0.1,0.05,0.025")
            .unwrap()
            .family()
            .unwrap();
        assert_eq!(f.sweep, Sweep::Eta(vec![0.1, 0.05, 0.025]));
        assert!(matches!(
            ConfigMap::parse("grid.n=32").unwrap().family(),
            Err(Error::InvalidFamily(_))
        ));
        let two = ConfigMap::parse("sweep.eta_list=0.1\nsweep.dt_list=0.1").unwrap();
        assert!(matches!(two.family(), Err(Error::InvalidFamily(_))));
        let nonmono = ConfigMap::parse("sweep.eta_list=0.1,0.2,0.05").unwrap();
        assert!(matches!(nonmono.family(), Err(Error::InvalidFamily(_))));
    }
}

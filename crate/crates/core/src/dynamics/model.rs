use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid2, MatrixField2, VectorField2};

/// Viscosity `μ`, deformation diffusion `η` and the quartic energy weight `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu: f64,
    pub eta: f64,
    pub delta: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            mu: 1.0,
            eta: 0.0,
            delta: 0.0,
        }
    }
}

impl ModelParams {
    pub fn new(mu: f64, eta: f64, delta: f64) -> Result<Self> {
        let p = Self { mu, eta, delta };
        p.validate()?;
        Ok(p)
    }

    /// `μ = 1` with the given regularization.
    pub fn regularized(eta: f64, delta: f64) -> Self {
        Self {
            mu: 1.0,
            eta,
            delta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Config(format!("mu = {} must be positive", self.mu)));
        }
        for (name, v) in [("eta", self.eta), ("delta", self.delta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Velocity and deformation gradient at time `t`. The pressure is derived.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: VectorField2,
    pub f: MatrixField2,
}

impl State {
    pub fn new(t: f64, u: VectorField2, f: MatrixField2) -> Self {
        assert_eq!(u.grid(), f.grid(), "u and F live on different grids");
        Self { t, u, f }
    }

    /// `(u, F) = (0, I)`.
    pub fn equilibrium(grid: &Grid2) -> Self {
        Self::new(0.0, VectorField2::zeros(grid), MatrixField2::identity(grid))
    }

    pub fn grid(&self) -> &Grid2 {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.f.is_finite()
    }

    /// Largest pointwise difference of any component.
    pub fn max_abs_diff(&self, other: &State) -> f64 {
        let fields = self
            .u
            .c
            .iter()
            .zip(&other.u.c)
            .chain(self.f.c.iter().zip(&other.f.c));
        fields
            .map(|(a, b)| a.sub(b).linf_norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum InitVariant {
    /// `(u, F) = (0, I)`.
    Equilibrium,
    /// Stream function `ψ = (A/κ) cos κx₁ cos κx₂`, `κ = 2π·modes/L`, so the
    /// peak speed is `A`; `F = I`.
    TaylorGreen { amplitude: f64, modes: u32 },
    /// `F₀` is transported from `I` for `warm_time` by a seeded smooth
    /// divergence-free velocity of stream amplitude `stream_amplitude`, which
    /// is also the initial velocity.
    WarmStart {
        stream_amplitude: f64,
        warm_time: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitSpec {
    #[serde(flatten)]
    pub variant: InitVariant,
    pub seed: u64,
}

impl InitSpec {
    pub fn equilibrium() -> Self {
        Self {
            variant: InitVariant::Equilibrium,
            seed: 0,
        }
    }

    pub fn taylor_green(amplitude: f64, modes: u32) -> Self {
        Self {
            variant: InitVariant::TaylorGreen { amplitude, modes },
            seed: 0,
        }
    }

    pub fn warm_start(stream_amplitude: f64, warm_time: f64, seed: u64) -> Self {
        Self {
            variant: InitVariant::WarmStart {
                stream_amplitude,
                warm_time,
            },
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.variant {
            InitVariant::Equilibrium => Ok(()),
            InitVariant::TaylorGreen { amplitude, modes } => {
                if !amplitude.is_finite() || modes == 0 {
                    return Err(Error::Config(format!(
                        "taylor_green needs a finite amplitude and modes >= 1 (got {amplitude}, {modes})"
                    )));
                }
                Ok(())
            }
            InitVariant::WarmStart {
                stream_amplitude,
                warm_time,
            } => {
                if !stream_amplitude.is_finite() || !(warm_time >= 0.0 && warm_time.is_finite()) {
                    return Err(Error::Config(format!(
                        "warm_start needs a finite amplitude and warm_time >= 0 (got {stream_amplitude}, {warm_time})"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub length: f64,
    pub params: ModelParams,
    pub dt: f64,
    pub t_end: f64,
    pub init: InitSpec,
    /// Steps between stored snapshots (0 keeps only the first and last).
    pub snapshot_every: usize,
    /// Steps between diagnostics rows.
    pub diagnostics_every: usize,
    /// CFL number used by the step-size check.
    pub cfl: f64,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 128,
            length: 2.0 * std::f64::consts::PI,
            params: ModelParams::default(),
            dt: 1e-3,
            t_end: 1.0,
            init: InitSpec::equilibrium(),
            snapshot_every: 100,
            diagnostics_every: 1,
            cfl: DEFAULT_CFL,
            output_dir: None,
        }
    }
}

pub const DEFAULT_CFL: f64 = 0.5;

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.init.validate()?;
        if self.n < 8 || self.n % 2 != 0 {
            return Err(Error::Config(format!(
                "n = {} must be even and >= 8",
                self.n
            )));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config(format!(
                "length = {} must be positive",
                self.length
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "t_end = {} must be positive",
                self.t_end
            )));
        }
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return Err(Error::Config(format!(
                "cfl = {} must be positive",
                self.cfl
            )));
        }
        if self.diagnostics_every == 0 {
            return Err(Error::Config("diagnostics_every must be >= 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid2> {
        Grid2::new(self.n, self.length)
    }

    /// Number of steps, rounding `t_end / dt` to the nearest integer.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{InitSpec, InitVariant, Integrator, ModelParams, State, DEFAULT_CFL};
use crate::error::{Error, Result};
use crate::spectral::{deriv, Axis, Grid2, MatrixField2, ScalarField, VectorField2};

/// Required `‖det F₀ − 1‖_∞` for warm starts.
pub const WARM_START_DET_TOL: f64 = 1e-6;
/// Two successive sub-step halvings must agree to this sup-norm distance.
const WARM_START_STABLE_TOL: f64 = 1e-9;
const WARM_START_MAX_HALVINGS: u32 = 10;

/// `u = (−∂₂ψ, ∂₁ψ)`.
pub fn stream_velocity(psi: &ScalarField) -> VectorField2 {
    VectorField2::new(deriv(psi, Axis::X2).scale(-1.0), deriv(psi, Axis::X1))
}

/// `F = I + [[−∂₂φ₁, −∂₂φ₂], [∂₁φ₁, ∂₁φ₂]]`: every column is divergence free.
pub fn curl_potential_f(phi1: &ScalarField, phi2: &ScalarField) -> MatrixField2 {
    let c1 = stream_velocity(phi1);
    let c2 = stream_velocity(phi2);
    let [a11, a21] = c1.c;
    let [a12, a22] = c2.c;
    MatrixField2::new([a11.map(|v| v + 1.0), a12, a21, a22.map(|v| v + 1.0)])
}

/// Taylor–Green velocity of peak speed `amplitude` at wavenumber `2π·modes/L`.
pub fn taylor_green_velocity(grid: &Grid2, amplitude: f64, modes: u32) -> VectorField2 {
    let kappa = 2.0 * std::f64::consts::PI * modes as f64 / grid.length();
    VectorField2::from_fn(grid, |x1, x2| {
        [
            amplitude * (kappa * x1).cos() * (kappa * x2).sin(),
            -amplitude * (kappa * x1).sin() * (kappa * x2).cos(),
        ]
    })
}

/// Seeded smooth stream function built from the lowest few Fourier modes.
pub fn seeded_stream(grid: &Grid2, amplitude: f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 2.0 * std::f64::consts::PI / grid.length();
    let modes: Vec<(f64, f64, f64, f64)> =
        [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0), (2.0, 1.0)]
            .iter()
            .map(|&(m1, m2)| {
                let weight: f64 = rng.gen_range(0.5..1.0) / (m1 * m1 + m2 * m2);
                let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (m1 * scale, m2 * scale, weight, phase)
            })
            .collect();
    ScalarField::from_fn(grid, |x1, x2| {
        amplitude
            * modes
                .iter()
                .map(|&(k1, k2, w, ph)| w * (k1 * x1 + k2 * x2 + ph).cos())
                .sum::<f64>()
    })
}

/// Builds the initial state; all variants satisfy `div u = 0`, `div Fᵀ = 0`
/// and `det F = 1` (the latter to [`WARM_START_DET_TOL`] for warm starts).
pub fn init(spec: &InitSpec, grid: &Grid2) -> Result<State> {
    spec.validate()?;
    match spec.variant {
        InitVariant::Equilibrium => Ok(State::equilibrium(grid)),
        InitVariant::TaylorGreen { amplitude, modes } => Ok(State::new(
            0.0,
            taylor_green_velocity(grid, amplitude, modes),
            MatrixField2::identity(grid),
        )),
        InitVariant::WarmStart {
            stream_amplitude,
            warm_time,
        } => {
            let u = stream_velocity(&seeded_stream(grid, stream_amplitude, spec.seed));
            let f = warm_deformation(&u, warm_time)?;
            Ok(State::new(0.0, u, f))
        }
    }
}

fn transport_identity(u: &VectorField2, warm_time: f64, substeps: usize) -> Result<MatrixField2> {
    let grid = u.grid();
    let dt = warm_time / substeps as f64;
    let params = ModelParams::regularized(0.0, 0.0);
    let stepper = Integrator::new(grid, params, dt).with_frozen_velocity();
    let start = State::new(0.0, u.clone(), MatrixField2::identity(grid));
    Ok(stepper.advance(&start, substeps, |_, _| Ok(()))?.f)
}

/// Transports `F = I` for `warm_time` under the frozen velocity `u`, halving
/// the sub-step until two successive results agree and `det F` is in gauge.
pub fn warm_deformation(u: &VectorField2, warm_time: f64) -> Result<MatrixField2> {
    let grid = u.grid();
    if warm_time == 0.0 {
        return Ok(MatrixField2::identity(grid));
    }
    let max_dt = DEFAULT_CFL * grid.spacing() / u.linf_norm().max(1.0);
    let mut substeps = (warm_time / max_dt).ceil().max(1.0) as usize;
    let mut prev = transport_identity(u, warm_time, substeps)?;
    for _ in 0..WARM_START_MAX_HALVINGS {
        substeps *= 2;
        let next = transport_identity(u, warm_time, substeps)?;
        let change = next.sub(&prev).linf_norm();
        let det_err = next.scalar_map(|m| m.det() - 1.0).linf_norm();
        if change <= WARM_START_STABLE_TOL && det_err <= WARM_START_DET_TOL {
            return Ok(next);
        }
        prev = next;
    }
    let det_err = prev.scalar_map(|m| m.det() - 1.0).linf_norm();
    Err(Error::ConstraintViolation(format!(
        "warm start did not settle: ‖det F − 1‖∞ = {det_err:e} after {substeps} sub-steps"
    )))
}

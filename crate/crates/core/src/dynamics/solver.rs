//! Integrating-factor SSP-RK3 time stepping in Fourier space.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::dynamics::{ModelParams, State, DEFAULT_CFL};
use crate::error::{Error, Result};
use crate::spectral::{
    spec_deriv, spec_laplacian, spec_leray, Axis, Grid2, MatrixField2, ScalarField, Spectrum,
    VectorField2,
};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `(u, F)` in spectral form; `f[2i + j]` holds `F_ij`.
#[derive(Clone)]
pub(crate) struct SpecState {
    pub u: [Spectrum; 2],
    pub f: [Spectrum; 4],
}

impl SpecState {
    pub fn from_state(state: &State) -> Self {
        let g = state.grid();
        let u = [&state.u.c[0], &state.u.c[1]];
        let f = [&state.f.c[0], &state.f.c[1], &state.f.c[2], &state.f.c[3]];
        let out: Vec<Spectrum> = u
            .par_iter()
            .chain(f.par_iter())
            .map(|s| g.forward(&s.values))
            .collect();
        let mut it = out.into_iter();
        let u = std::array::from_fn(|_| it.next().unwrap());
        let f = std::array::from_fn(|_| it.next().unwrap());
        Self { u, f }
    }

    pub fn to_state(&self, grid: &Grid2, t: f64) -> State {
        let all: Vec<&Spectrum> = self.u.iter().chain(self.f.iter()).collect();
        let phys: Vec<ScalarField> = all
            .par_iter()
            .map(|s| ScalarField::new(grid, grid.inverse(s)))
            .collect();
        let mut it = phys.into_iter();
        let u: [ScalarField; 2] = std::array::from_fn(|_| it.next().unwrap());
        let f = std::array::from_fn(|_| it.next().unwrap());
        let [u0, u1] = u;
        State::new(t, VectorField2::new(u0, u1), MatrixField2::new(f))
    }

    fn project(&mut self, grid: &Grid2) {
        let [a, b] = &mut self.u;
        spec_leray(grid, a, b);
    }
}

fn inverse_all(grid: &Grid2, specs: &[Spectrum]) -> Vec<Vec<f64>> {
    specs.par_iter().map(|s| grid.inverse(s)).collect()
}

fn forward_dealiased(grid: &Grid2, fields: &[Vec<f64>]) -> Vec<Spectrum> {
    fields
        .par_iter()
        .map(|v| {
            let mut s = grid.forward(v);
            grid.dealias_in_place(&mut s);
            s
        })
        .collect()
}

/// Spectra of the three independent components `(σ11, σ12, σ22)` of
/// `FFᵀ + δ|F−I|²[(F−I)Fᵀ + F(F−I)ᵀ]`, each product dealiased.
fn stress_spectra(grid: &Grid2, f: &[Vec<f64>], delta: f64) -> Vec<Spectrum> {
    let npts = grid.len();
    let (f11, f12, f21, f22) = (&f[0], &f[1], &f[2], &f[3]);
    let mut tau = vec![vec![0.0; npts], vec![0.0; npts], vec![0.0; npts]];
    for p in 0..npts {
        tau[0][p] = f11[p] * f11[p] + f12[p] * f12[p];
        tau[1][p] = f11[p] * f21[p] + f12[p] * f22[p];
        tau[2][p] = f21[p] * f21[p] + f22[p] * f22[p];
    }
    let mut spec = forward_dealiased(grid, &tau);
    if delta == 0.0 {
        return spec;
    }
    // w = |F − I|², and (F−I)Fᵀ + F(F−I)ᵀ = 2FFᵀ − F − Fᵀ.
    let w: Vec<f64> = (0..npts)
        .map(|p| {
            let (a, b, c, d) = (f11[p] - 1.0, f12[p], f21[p], f22[p] - 1.0);
            a * a + b * b + c * c + d * d
        })
        .collect();
    let mut w_spec = grid.forward(&w);
    grid.dealias_in_place(&mut w_spec);
    let w = grid.inverse(&w_spec);
    let tau_d = inverse_all(grid, &spec);
    let mut sigma = vec![vec![0.0; npts], vec![0.0; npts], vec![0.0; npts]];
    for p in 0..npts {
        sigma[0][p] = w[p] * (2.0 * tau_d[0][p] - 2.0 * f11[p]);
        sigma[1][p] = w[p] * (2.0 * tau_d[1][p] - f12[p] - f21[p]);
        sigma[2][p] = w[p] * (2.0 * tau_d[2][p] - 2.0 * f22[p]);
    }
    let sigma_spec = forward_dealiased(grid, &sigma);
    for (s, d) in spec.iter_mut().zip(&sigma_spec) {
        for (a, b) in s.iter_mut().zip(d) {
            *a += delta * b;
        }
    }
    spec
}

/// Explicit part of the right-hand side: `(𝒫[−u·∇u + div σ], −u·∇F + ∇u F)`.
/// With `frozen_u` the velocity tendency is zero.
fn nonlinear(grid: &Grid2, params: &ModelParams, s: &SpecState, frozen_u: bool) -> SpecState {
    let npts = grid.len();
    // Physical u_i, ∂_j u_i, F_ij, ∂_k F_ij.
    let mut specs: Vec<Spectrum> = Vec::with_capacity(18);
    specs.extend(s.u.iter().cloned());
    for ui in &s.u {
        specs.push(spec_deriv(grid, ui, Axis::X1));
        specs.push(spec_deriv(grid, ui, Axis::X2));
    }
    specs.extend(s.f.iter().cloned());
    for fij in &s.f {
        specs.push(spec_deriv(grid, fij, Axis::X1));
        specs.push(spec_deriv(grid, fij, Axis::X2));
    }
    let phys = inverse_all(grid, &specs);
    let u = &phys[0..2];
    let du = &phys[2..6]; // du[2i + j] = ∂_j u_i
    let f = &phys[6..10];
    let df = &phys[10..18]; // df[2(2i + j) + k] = ∂_k F_ij

    let mut f_terms = vec![vec![0.0; npts]; 4];
    for i in 0..2 {
        for j in 0..2 {
            let out = &mut f_terms[2 * i + j];
            let c = 2 * i + j;
            for p in 0..npts {
                let adv = u[0][p] * df[2 * c][p] + u[1][p] * df[2 * c + 1][p];
                let stretch = du[2 * i][p] * f[j][p] + du[2 * i + 1][p] * f[2 + j][p];
                out[p] = stretch - adv;
            }
        }
    }
    let nf = forward_dealiased(grid, &f_terms);
    let nf: [Spectrum; 4] = nf.try_into().expect("four components");

    if frozen_u {
        return SpecState {
            u: [vec![ZERO; npts], vec![ZERO; npts]],
            f: nf,
        };
    }

    let mut adv = vec![vec![0.0; npts]; 2];
    for i in 0..2 {
        for p in 0..npts {
            adv[i][p] = u[0][p] * du[2 * i][p] + u[1][p] * du[2 * i + 1][p];
        }
    }
    let adv = forward_dealiased(grid, &adv);
    let sigma = stress_spectra(grid, f, params.delta);
    let d1 = |s: &Spectrum| spec_deriv(grid, s, Axis::X1);
    let d2 = |s: &Spectrum| spec_deriv(grid, s, Axis::X2);
    let (s11_1, s12_2, s12_1, s22_2) = (d1(&sigma[0]), d2(&sigma[1]), d1(&sigma[1]), d2(&sigma[2]));
    let mut nu1: Spectrum = (0..npts).map(|m| s11_1[m] + s12_2[m] - adv[0][m]).collect();
    let mut nu2: Spectrum = (0..npts).map(|m| s12_1[m] + s22_2[m] - adv[1][m]).collect();
    spec_leray(grid, &mut nu1, &mut nu2);
    SpecState {
        u: [nu1, nu2],
        f: nf,
    }
}

/// Symmetric stress `FFᵀ + δ|F−I|²[(F−I)Fᵀ + F(F−I)ᵀ]`, dealiased.
pub fn elastic_stress(f: &MatrixField2, delta: f64) -> MatrixField2 {
    let g = f.grid();
    let phys: Vec<Vec<f64>> = f.c.iter().map(|s| s.values.clone()).collect();
    let spec = stress_spectra(g, &phys, delta);
    let s11 = ScalarField::new(g, g.inverse(&spec[0]));
    let s12 = ScalarField::new(g, g.inverse(&spec[1]));
    let s22 = ScalarField::new(g, g.inverse(&spec[2]));
    MatrixField2::new([s11, s12.clone(), s12, s22])
}

/// Full tendencies `(∂_t u, ∂_t F)` including the diffusion terms.
pub fn rhs(state: &State, params: &ModelParams) -> (VectorField2, MatrixField2) {
    let g = state.grid();
    let mut s = SpecState::from_state(state);
    s.project(g);
    let mut n = nonlinear(g, params, &s, false);
    for (nu, u) in n.u.iter_mut().zip(&s.u) {
        for (a, b) in nu.iter_mut().zip(spec_laplacian(g, u)) {
            *a += params.mu * b;
        }
    }
    for (nf, f) in n.f.iter_mut().zip(&s.f) {
        for (a, b) in nf.iter_mut().zip(spec_laplacian(g, f)) {
            *a += params.eta * b;
        }
    }
    let out = n.to_state(g, state.t);
    (out.u, out.f)
}

/// Largest admissible step `cfl · h / max(1, ‖u‖_∞)`.
pub fn cfl_limit(state: &State, cfl: f64) -> f64 {
    cfl * state.grid().spacing() / state.u.linf_norm().max(1.0)
}

/// `exp(−ν|k|² s)` per mode.
fn heat_factor(grid: &Grid2, nu: f64, s: f64) -> Vec<f64> {
    (0..grid.len())
        .map(|idx| {
            let (k1, k2) = grid.wavevector(idx);
            (-nu * (k1 * k1 + k2 * k2) * s).exp()
        })
        .collect()
}

struct Factors {
    full: Vec<f64>,
    half: Vec<f64>,
    back_half: Vec<f64>,
}

impl Factors {
    fn new(grid: &Grid2, nu: f64, dt: f64) -> Self {
        Self {
            full: heat_factor(grid, nu, dt),
            half: heat_factor(grid, nu, 0.5 * dt),
            back_half: heat_factor(grid, nu, -0.5 * dt),
        }
    }
}

/// Fixed-step integrator; diffusion factors are cached for its `(dt, params)`.
pub struct Integrator {
    grid: Grid2,
    params: ModelParams,
    dt: f64,
    cfl: f64,
    frozen_u: bool,
    fu: Factors,
    ff: Factors,
}

impl Integrator {
    pub fn new(grid: &Grid2, params: ModelParams, dt: f64) -> Self {
        Self {
            grid: grid.clone(),
            params,
            dt,
            cfl: DEFAULT_CFL,
            frozen_u: false,
            fu: Factors::new(grid, params.mu, dt),
            ff: Factors::new(grid, params.eta, dt),
        }
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    /// Keeps the velocity fixed and only transports `F` (still with `ηΔF`).
    pub fn with_frozen_velocity(mut self) -> Self {
        self.frozen_u = true;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// One IF-SSP-RK3 step.
    pub fn step(&self, state: &State) -> Result<State> {
        if state.grid() != &self.grid {
            return Err(Error::GridMismatch(format!(
                "integrator built for {:?}, state on {:?}",
                self.grid,
                state.grid()
            )));
        }
        let limit = cfl_limit(state, self.cfl);
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt: self.dt, limit });
        }
        let g = &self.grid;
        let dt = self.dt;
        let mut v = SpecState::from_state(state);
        if !self.frozen_u {
            v.project(g);
        }

        // Stage 1: v1 = E(dt)(v + dt N(v)).
        let n0 = nonlinear(g, &self.params, &v, self.frozen_u);
        let mut v1 = self.combine(&v, &n0, dt, |fac, m, a, b| fac.full[m] * (a + b));
        self.finish_stage(&mut v1, &v);

        // Stage 2: v2 = ¾ E(dt/2) v + ¼ E(−dt/2)(v1 + dt N(v1)).
        let n1 = nonlinear(g, &self.params, &v1, self.frozen_u);
        let mut v2 = self.combine3(&v, &v1, &n1, dt, |fac, m, a, b, c| {
            0.75 * fac.half[m] * a + 0.25 * fac.back_half[m] * (b + c)
        });
        self.finish_stage(&mut v2, &v);

        // Stage 3: v⁺ = ⅓ E(dt) v + ⅔ E(dt/2)(v2 + dt N(v2)).
        let n2 = nonlinear(g, &self.params, &v2, self.frozen_u);
        let mut v3 = self.combine3(&v, &v2, &n2, dt, |fac, m, a, b, c| {
            fac.full[m] * a / 3.0 + 2.0 / 3.0 * fac.half[m] * (b + c)
        });
        self.finish_stage(&mut v3, &v);

        let next = v3.to_state(g, state.t + dt);
        if !next.u.is_finite() {
            return Err(Error::NonFinite("u"));
        }
        if !next.f.is_finite() {
            return Err(Error::NonFinite("F"));
        }
        Ok(next)
    }

    /// Advances `steps` times, calling `observe` after each accepted step.
    pub fn advance(
        &self,
        state: &State,
        steps: usize,
        mut observe: impl FnMut(usize, &State) -> Result<()>,
    ) -> Result<State> {
        let mut cur = state.clone();
        for k in 1..=steps {
            cur = self.step(&cur)?;
            observe(k, &cur)?;
        }
        Ok(cur)
    }

    fn finish_stage(&self, stage: &mut SpecState, base: &SpecState) {
        if self.frozen_u {
            stage.u = base.u.clone();
        } else {
            stage.project(&self.grid);
        }
    }

    fn combine(
        &self,
        v: &SpecState,
        n: &SpecState,
        dt: f64,
        op: impl Fn(&Factors, usize, Complex64, Complex64) -> Complex64 + Sync,
    ) -> SpecState {
        let apply = |fac: &Factors, a: &Spectrum, b: &Spectrum| -> Spectrum {
            (0..a.len()).map(|m| op(fac, m, a[m], dt * b[m])).collect()
        };
        SpecState {
            u: std::array::from_fn(|i| apply(&self.fu, &v.u[i], &n.u[i])),
            f: std::array::from_fn(|i| apply(&self.ff, &v.f[i], &n.f[i])),
        }
    }

    fn combine3(
        &self,
        v: &SpecState,
        w: &SpecState,
        n: &SpecState,
        dt: f64,
        op: impl Fn(&Factors, usize, Complex64, Complex64, Complex64) -> Complex64 + Sync,
    ) -> SpecState {
        let apply = |fac: &Factors, a: &Spectrum, b: &Spectrum, c: &Spectrum| -> Spectrum {
            (0..a.len())
                .map(|m| op(fac, m, a[m], b[m], dt * c[m]))
                .collect()
        };
        SpecState {
            u: std::array::from_fn(|i| apply(&self.fu, &v.u[i], &w.u[i], &n.u[i])),
            f: std::array::from_fn(|i| apply(&self.ff, &v.f[i], &w.f[i], &n.f[i])),
        }
    }
}

/// One step of size `dt` with the default CFL number.
pub fn step(state: &State, dt: f64, params: &ModelParams) -> Result<State> {
    Integrator::new(state.grid(), *params, dt).step(state)
}

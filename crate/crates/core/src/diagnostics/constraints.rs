use serde::{Deserialize, Serialize};

use crate::diagnostics::energy::grad_components;
use crate::dynamics::{elastic_stress, pi_fields, State};
use crate::error::{Error, Result};
use crate::spectral::{div_mat, div_mat_t, grad, MatrixField2, ScalarField, VectorField2};
use crate::tensor::Mat2;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// `‖div Fᵀ‖_{L²}`
    pub res_div_ft: f64,
    /// `max_{i,j,k} ‖F_lk ∂_l F_ij − F_lj ∂_l F_ik‖_{L²}`
    pub res_piola: f64,
    /// `‖det F − 1‖_{L²}`
    pub res_det_l2: f64,
    /// `‖det F − 1‖_{L^∞}`
    pub res_det_linf: f64,
    /// `|∫(F−I) − ∫(F₀−I)|` (Frobenius)
    pub moment_drift: f64,
    /// `min tr(FFᵀ)` over the grid
    pub tr_tau_min: f64,
}

/// `∫(F − I)` over the box.
pub fn moment(f: &MatrixField2) -> Mat2 {
    f.integral() - Mat2::IDENTITY * f.grid().area()
}

/// Residuals of the deformation-gradient constraints; `initial_moment` is
/// `∫(F₀ − I)` of the run's initial state.
pub fn constraint_residuals(state: &State, initial_moment: &Mat2) -> ConstraintReport {
    let f = &state.f;
    let g = f.grid();
    let df: Vec<[ScalarField; 2]> = f.c.iter().map(grad_components).collect();
    let npts = g.len();
    // Piola residual is antisymmetric in (j, k): only (i, 1, 2) matters.
    let mut piola = [0.0f64; 2];
    for (i, acc) in piola.iter_mut().enumerate() {
        let mut sum = 0.0;
        for p in 0..npts {
            let fv = |a: usize, b: usize| f.c[2 * a + b].values[p];
            let d = |a: usize, b: usize, l: usize| df[2 * a + b][l].values[p];
            let r: f64 = (0..2)
                .map(|l| fv(l, 1) * d(i, 0, l) - fv(l, 0) * d(i, 1, l))
                .sum();
            sum += r * r;
        }
        *acc = (sum * g.cell_area()).sqrt();
    }
    let det = f.scalar_map(|m| m.det() - 1.0);
    ConstraintReport {
        res_div_ft: div_mat_t(f).l2_norm(),
        res_piola: piola[0].max(piola[1]),
        res_det_l2: det.l2_norm(),
        res_det_linf: det.linf_norm(),
        moment_drift: (moment(f) - *initial_moment).norm(),
        tr_tau_min: f.scalar_map(|m| m.norm_sq()).min(),
    }
}

/// Which path computes `(Π₁, Π₂, Π₃)` in [`pi_identity_residual_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiProducts {
    /// Dealiased products, as in the solver.
    Dealiased,
    /// Raw pointwise products (ablation).
    Pointwise,
}

/// `‖div(FFᵀ) − ∇Π₁ − div[[Π₂, Π₃], [Π₃, −Π₂]]‖_{L²}` with `FFᵀ` from the
/// solver's dealiased stress.
pub fn pi_identity_residual(state: &State) -> f64 {
    pi_identity_residual_with(state, PiProducts::Dealiased)
}

pub fn pi_identity_residual_with(state: &State, products: PiProducts) -> f64 {
    let f = &state.f;
    let [p1, p2, p3] = match products {
        PiProducts::Dealiased => pi_fields(f),
        PiProducts::Pointwise => {
            let pis = f.scalar_map(|m| crate::tensor::pi_decompose(&m).pi1);
            let pi2 = f.scalar_map(|m| crate::tensor::pi_decompose(&m).pi2);
            let pi3 = f.scalar_map(|m| crate::tensor::pi_decompose(&m).pi3);
            [pis, pi2, pi3]
        }
    };
    let div_tau = div_mat(&elastic_stress(f, 0.0));
    let hopf = MatrixField2::new([p2.clone(), p3.clone(), p3, p2.scale(-1.0)]);
    div_tau.sub(&grad(&p1)).sub(&div_mat(&hopf)).l2_norm()
}

/// Upper-convected residual `‖∂_tτ + u·∇τ − ∇uτ − τ∇uᵀ‖_{L²}`, with the time
/// derivative by the difference quotient and the other terms averaged over
/// the two snapshots (centered at the midpoint).
pub fn tau_evolution_residual(prev: &State, next: &State) -> Result<f64> {
    check_pair(prev, next)?;
    let dt = next.t - prev.t;
    let tau0 = elastic_stress(&prev.f, 0.0);
    let tau1 = elastic_stress(&next.f, 0.0);
    let r0 = upper_convected_terms(prev, &tau0);
    let r1 = upper_convected_terms(next, &tau1);
    let resid = tau1.sub(&tau0).scale(1.0 / dt).add(&r0.add(&r1).scale(0.5));
    Ok(resid.l2_norm())
}

/// `u·∇τ − ∇uτ − τ∇uᵀ` pointwise.
fn upper_convected_terms(state: &State, tau: &MatrixField2) -> MatrixField2 {
    let g = state.grid();
    let du: Vec<[ScalarField; 2]> = state.u.c.iter().map(grad_components).collect();
    let dtau: Vec<[ScalarField; 2]> = tau.c.iter().map(grad_components).collect();
    let u = &state.u;
    MatrixField2::from_pointwise(g, |p| {
        let gu = Mat2::new(
            du[0][0].values[p],
            du[0][1].values[p],
            du[1][0].values[p],
            du[1][1].values[p],
        );
        let t = tau.at(p);
        let adv = |c: usize| {
            u.c[0].values[p] * dtau[c][0].values[p] + u.c[1].values[p] * dtau[c][1].values[p]
        };
        let a = Mat2::new(adv(0), adv(1), adv(2), adv(3));
        a - gu * t - t * gu.transpose()
    })
}

pub(crate) fn check_pair(prev: &State, next: &State) -> Result<()> {
    if prev.grid() != next.grid() {
        return Err(Error::WindowMismatch(
            "snapshots live on different grids".into(),
        ));
    }
    if !(next.t > prev.t) {
        return Err(Error::WindowMismatch(format!(
            "snapshot times {} and {} are not increasing",
            prev.t, next.t
        )));
    }
    Ok(())
}

/// Pointwise `|∇|F|| ≤ |∇F|` check; returns `min(|∇F| − |∇|F||)` over the
/// grid, with `∇|F|` by the chain rule.
pub fn gradient_norm_margin(f: &MatrixField2) -> f64 {
    let df: Vec<VectorField2> = f.c.iter().map(grad).collect();
    let g = f.grid();
    (0..g.len())
        .map(|p| {
            let m = f.at(p);
            let norm = m.norm();
            let mut full = 0.0;
            let mut radial = 0.0;
            for l in 0..2 {
                let dm = [
                    df[0].c[l].values[p],
                    df[1].c[l].values[p],
                    df[2].c[l].values[p],
                    df[3].c[l].values[p],
                ];
                full += dm.iter().map(|v| v * v).sum::<f64>();
                let proj = m.a11 * dm[0] + m.a12 * dm[1] + m.a21 * dm[2] + m.a22 * dm[3];
                if norm > 0.0 {
                    radial += (proj / norm).powi(2);
                }
            }
            full.sqrt() - radial.sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

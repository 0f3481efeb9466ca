use serde::{Deserialize, Serialize};

use crate::dynamics::{pressure, ModelParams, State};
use crate::error::{Error, Result};
use crate::spectral::{grad, local_lp_norm, mean_zero, trapezoid_window, BallMask};
#[cfg(test)]
use crate::tensor::PERTURBATION_BOUND_C;
use crate::tensor::{perturbation_bound, Mat2};

/// Local space-time norms over `B × (t₀, t₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    /// `‖F‖_{L³}` (Frobenius norm pointwise)
    pub norm_f_l3: f64,
    /// `‖tr τ‖_{L^{3/2}}`
    pub norm_trtau_l32: f64,
    /// `‖P_a‖_{L^{3/2}}` with `P_a` the ball-average-free pressure
    pub norm_pa_l32: f64,
    /// `‖F − I‖_{L⁴}`
    pub norm_e_l4: f64,
}

pub fn integrability_report(
    snapshots: &[State],
    mask: &BallMask,
    t0: f64,
    t1: f64,
) -> Result<IntegrabilityReport> {
    let inside: Vec<&State> = snapshots
        .iter()
        .filter(|s| s.t >= t0 - 1e-9 && s.t <= t1 + 1e-9)
        .collect();
    if inside.is_empty() {
        return Err(Error::EmptyWindow { t0, t1 });
    }
    let mut f_norm = Vec::new();
    let mut tr = Vec::new();
    let mut pa = Vec::new();
    let mut e = Vec::new();
    for s in inside {
        let fro = s.f.frobenius();
        tr.push((s.t, fro.map(|v| v * v)));
        f_norm.push((s.t, fro));
        let (_, p) = pressure(s);
        pa.push((s.t, mean_zero(&p, Some(mask))));
        e.push((s.t, s.f.scalar_map(|m| (m - Mat2::IDENTITY).norm())));
    }
    Ok(IntegrabilityReport {
        norm_f_l3: local_lp_norm(&f_norm, mask, 3.0, t0, t1)?,
        norm_trtau_l32: local_lp_norm(&tr, mask, 1.5, t0, t1)?,
        norm_pa_l32: local_lp_norm(&pa, mask, 1.5, t0, t1)?,
        norm_e_l4: local_lp_norm(&e, mask, 4.0, t0, t1)?,
    })
}

/// Sup norms of the perturbation `E = F − I` and the pointwise margin of
/// `|E|² ≤ C(|E₁₁−E₂₂|² + |E₁₂+E₂₁|² + |det E|)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub linf_e: f64,
    pub linf_e11_m_e22: f64,
    pub linf_e12_p_e21: f64,
    /// `min(rhs − lhs)` over the grid with `C` = [`PERTURBATION_BOUND_C`].
    pub bound_margin: f64,
}

pub fn perturbation_report(state: &State) -> PerturbationReport {
    let mut r = PerturbationReport {
        bound_margin: f64::INFINITY,
        ..Default::default()
    };
    for p in 0..state.grid().len() {
        let e = state.f.at(p) - Mat2::IDENTITY;
        let (lhs, rhs) = perturbation_bound(&e);
        r.linf_e = r.linf_e.max(e.norm());
        r.linf_e11_m_e22 = r.linf_e11_m_e22.max((e.a11 - e.a22).abs());
        r.linf_e12_p_e21 = r.linf_e12_p_e21.max((e.a12 + e.a21).abs());
        r.bound_margin = r.bound_margin.min(rhs - lhs);
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DetfReport {
    /// `sup_t ‖det F − 1‖_{L²}`
    pub sup_l2_detf_minus_1: f64,
    /// `√η ‖∇(det F − 1)‖_{L²(time × space)}`
    pub sqrt_eta_grad_l2: f64,
}

pub fn detf_uniform_report(snapshots: &[State], params: &ModelParams) -> Result<DetfReport> {
    if snapshots.is_empty() {
        return Err(Error::EmptyWindow { t0: 0.0, t1: 0.0 });
    }
    let mut sup: f64 = 0.0;
    let mut grad_sq = Vec::with_capacity(snapshots.len());
    for s in snapshots {
        let det = s.f.scalar_map(|m| m.det() - 1.0);
        sup = sup.max(det.l2_norm());
        grad_sq.push((s.t, grad(&det).l2_norm().powi(2)));
    }
    let (t0, t1) = (snapshots[0].t, snapshots[snapshots.len() - 1].t);
    let integral = if snapshots.len() == 1 {
        0.0
    } else {
        trapezoid_window(&grad_sq, t0, t1)?
    };
    Ok(DetfReport {
        sup_l2_detf_minus_1: sup,
        sqrt_eta_grad_l2: params.eta.sqrt() * integral.sqrt(),
    })
}

use crate::diagnostics::constraints::check_pair;
use crate::diagnostics::energy::grad_components;
use crate::dynamics::State;
use crate::error::Result;
use crate::spectral::ScalarField;
use crate::tensor::{truncate_tk, truncate_tk_prime};

/// Pointwise `u·∇T_k(|F|) − T_k'(|F|)|F|⁻¹ ∇u:FFᵀ`, with `∇T_k(|F|)` by the
/// chain rule (`∇|F| = F:∇F/|F|`), so it vanishes identically where `|F| ≥ k`.
fn transport_terms(state: &State, k: f64) -> Vec<f64> {
    let f = &state.f;
    let u = &state.u;
    let df: Vec<[ScalarField; 2]> = f.c.iter().map(grad_components).collect();
    let du: Vec<[ScalarField; 2]> = u.c.iter().map(grad_components).collect();
    (0..state.grid().len())
        .map(|p| {
            let m = f.at(p);
            let norm = m.norm();
            let tp = truncate_tk_prime(norm, k);
            if tp == 0.0 || norm == 0.0 {
                return 0.0;
            }
            let fv = [m.a11, m.a12, m.a21, m.a22];
            let adv: f64 = (0..2)
                .map(|l| {
                    let proj: f64 = (0..4).map(|c| fv[c] * df[c][l].values[p]).sum();
                    u.c[l].values[p] * proj
                })
                .sum();
            let tau = m.gram();
            let gu = [
                du[0][0].values[p],
                du[0][1].values[p],
                du[1][0].values[p],
                du[1][1].values[p],
            ];
            let stretch = gu[0] * tau.a11 + gu[1] * tau.a12 + gu[2] * tau.a21 + gu[3] * tau.a22;
            tp * (adv - stretch) / norm
        })
        .collect()
}

/// `L²` norm of the residual of `∂_tT_k(|F|) + u·∇T_k(|F|) = ∇u:FFᵀ T_k'(|F|)/|F|`
/// between two snapshots (difference quotient in time, midpoint average of
/// the other terms). Points within one grid spacing of the kink `|F| = k`
/// at either time are excluded.
pub fn renorm_residual(prev: &State, next: &State, k: f64) -> Result<f64> {
    check_pair(prev, next)?;
    let g = prev.grid();
    let dt = next.t - prev.t;
    let h = g.spacing();
    let a = transport_terms(prev, k);
    let b = transport_terms(next, k);
    let n0 = prev.f.frobenius();
    let n1 = next.f.frobenius();
    let mut sum = 0.0;
    for p in 0..g.len() {
        let (z0, z1) = (n0.values[p], n1.values[p]);
        if (z0 - k).abs() <= h || (z1 - k).abs() <= h {
            continue;
        }
        let r = (truncate_tk(z1, k) - truncate_tk(z0, k)) / dt + 0.5 * (a[p] + b[p]);
        sum += r * r;
    }
    Ok((sum * g.cell_area()).sqrt())
}

/// The untruncated residual assembled from `tr τ = |F|²` instead:
/// `∂_t tr τ + u·∇ tr τ = 2∇u:τ` divided by `2|F|`, with `∇ tr τ` taken
/// spectrally and `∂_t|F| = Δ(tr τ)/(Δt (|F₀| + |F₁|))`.
pub fn renorm_residual_tau(prev: &State, next: &State) -> Result<f64> {
    check_pair(prev, next)?;
    let g = prev.grid();
    let dt = next.t - prev.t;
    let terms = |s: &State| -> (Vec<f64>, Vec<f64>) {
        let tr = s.f.scalar_map(|m| m.norm_sq());
        let dtr = grad_components(&tr);
        let du: Vec<[ScalarField; 2]> = s.u.c.iter().map(grad_components).collect();
        let rest = (0..g.len())
            .map(|p| {
                let m = s.f.at(p);
                let t = m.gram();
                let adv =
                    s.u.c[0].values[p] * dtr[0].values[p] + s.u.c[1].values[p] * dtr[1].values[p];
                let stretch = du[0][0].values[p] * t.a11
                    + du[0][1].values[p] * t.a12
                    + du[1][0].values[p] * t.a21
                    + du[1][1].values[p] * t.a22;
                (adv - 2.0 * stretch) / (2.0 * m.norm())
            })
            .collect();
        (tr.values, rest)
    };
    let (tr0, r0) = terms(prev);
    let (tr1, r1) = terms(next);
    let sum: f64 = (0..g.len())
        .map(|p| {
            let dnorm = (tr1[p] - tr0[p]) / (tr0[p].sqrt() + tr1[p].sqrt());
            let r = dnorm / dt + 0.5 * (r0[p] + r1[p]);
            r * r
        })
        .sum();
    Ok((sum * g.cell_area()).sqrt())
}

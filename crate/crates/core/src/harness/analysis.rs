use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::effective_flux;
use crate::dynamics::{pi_fields, pressure, State};
use crate::error::{Error, Result};
use crate::harness::{FamilyArtifacts, RunArtifacts};
use crate::spectral::{
    deriv, div, div_mat, grad, inv_laplacian, local_lp_norm, mean_zero, resample, trapezoid_window,
    Axis, BallMask, BallSpec, MatrixField2, ScalarField,
};
use crate::tensor::{truncate_tk, Mat2};

/// Label attached to every quantity measured against the reference run.
pub const REFERENCE_PROXY: &str = "reference proxy";

const TIME_MATCH: f64 = 1e-9;

fn in_window(t: f64, t0: f64, t1: f64) -> bool {
    t >= t0 - TIME_MATCH && t <= t1 + TIME_MATCH
}

fn window_states(run: &RunArtifacts, t0: f64, t1: f64) -> Result<Vec<&State>> {
    let v: Vec<&State> = run
        .snapshots
        .iter()
        .filter(|s| in_window(s.t, t0, t1))
        .collect();
    if v.is_empty() {
        return Err(Error::EmptyWindow { t0, t1 });
    }
    Ok(v)
}

fn resample_matrix(f: &MatrixField2, target: &crate::spectral::Grid2) -> MatrixField2 {
    if f.grid() == target {
        return f.clone();
    }
    MatrixField2::new(std::array::from_fn(|i| resample(&f.c[i], target)))
}

/// `(t, F_run on the reference grid, F_ref)` at every reference snapshot time
/// in the window.
fn paired<'a>(
    run: &RunArtifacts,
    reference: &'a RunArtifacts,
    t0: f64,
    t1: f64,
) -> Result<Vec<(f64, MatrixField2, &'a MatrixField2)>> {
    if (run.config.length - reference.config.length).abs() > 0.0 {
        return Err(Error::GridMismatch(format!(
            "{} has box {} but the reference has {}",
            run.label, run.config.length, reference.config.length
        )));
    }
    window_states(reference, t0, t1)?
        .into_iter()
        .map(|r| {
            let s = run
                .snapshots
                .iter()
                .find(|s| (s.t - r.t).abs() <= TIME_MATCH * r.t.abs().max(1.0))
                .ok_or_else(|| {
                    Error::WindowMismatch(format!("{} has no snapshot at t = {}", run.label, r.t))
                })?;
            Ok((r.t, resample_matrix(&s.f, r.grid()), &r.f))
        })
        .collect()
}

fn check_mask(mask: &BallMask, reference: &RunArtifacts) -> Result<()> {
    let g = reference.snapshots[0].grid();
    if mask.grid() != g {
        return Err(Error::GridMismatch(format!(
            "mask on {}² points, reference grid {}²",
            mask.grid().n(),
            g.n()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectRow {
    pub label: String,
    pub param: f64,
    /// `‖T_k(|F|) − T_k(|F_ref|)‖³_{L³(B×window)}` per entry of `k_list`.
    pub defect: Vec<f64>,
    pub sup: f64,
}

/// Oscillation-defect estimates of every run against the reference run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub reference: String,
    /// The limit field is not computable; the reference run stands in for it.
    pub reference_note: String,
    pub k_list: Vec<f64>,
    pub window: [f64; 2],
    pub mask: BallSpec,
    pub rows: Vec<DefectRow>,
    /// `(param, sup_k defect)` for the non-reference runs, in sweep order.
    pub trend: Vec<[f64; 2]>,
}

pub fn osc_defect(
    family: &FamilyArtifacts,
    mask: &BallMask,
    t0: f64,
    t1: f64,
    k_list: &[f64],
) -> Result<DefectReport> {
    if family.runs.len() < 2 {
        return Err(Error::InvalidFamily(
            "the defect needs at least two runs".into(),
        ));
    }
    let reference = family.reference_run();
    check_mask(mask, reference)?;
    let moduli: Vec<Vec<(f64, ScalarField, ScalarField)>> = family
        .runs
        .par_iter()
        .map(|run| {
            Ok(paired(run, reference, t0, t1)?
                .into_iter()
                .map(|(t, f, r)| (t, f.frobenius(), r.frobenius()))
                .collect())
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..family.runs.len())
        .flat_map(|i| (0..k_list.len()).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let k = k_list[j];
            let series: Vec<(f64, ScalarField)> = moduli[i]
                .iter()
                .map(|(t, a, b)| {
                    (
                        *t,
                        a.zip_map(b, |x, y| truncate_tk(x, k) - truncate_tk(y, k)),
                    )
                })
                .collect();
            Ok(local_lp_norm(&series, mask, 3.0, t0, t1)?.powi(3))
        })
        .collect::<Result<_>>()?;
    let rows: Vec<DefectRow> = family
        .runs
        .iter()
        .enumerate()
        .map(|(i, run)| {
            let defect = values[i * k_list.len()..(i + 1) * k_list.len()].to_vec();
            let sup = defect.iter().cloned().fold(0.0, f64::max);
            DefectRow {
                label: run.label.clone(),
                param: run.param,
                defect,
                sup,
            }
        })
        .collect();
    let trend = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != family.reference)
        .map(|(_, r)| [r.param, r.sup])
        .collect();
    Ok(DefectReport {
        reference: reference.label.clone(),
        reference_note: REFERENCE_PROXY.into(),
        k_list: k_list.to_vec(),
        window: [t0, t1],
        mask: mask.spec(),
        rows,
        trend,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongConvRow {
    pub label: String,
    pub param: f64,
    /// `‖F − F_ref‖_{L²(B×window)}`
    pub l2_error: f64,
    /// `‖|F| − |F_ref|‖_{L³(B×window)}`, for cross-checking the defect table.
    pub l3_modulus_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongConvReport {
    pub reference: String,
    pub reference_note: String,
    pub sweep: String,
    pub window: [f64; 2],
    pub mask: BallSpec,
    pub rows: Vec<StrongConvRow>,
    /// Errors decrease as the parameter approaches the reference value.
    pub monotone: bool,
    /// Slope of `log error` against `log x`, with `x` the swept value (the
    /// grid spacing for grid sweeps); `None` with fewer than two usable runs.
    pub fitted_rate: Option<f64>,
}

/// Least-squares slope of `log y` against `log x` over positive pairs.
pub(crate) fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

pub fn strong_conv(
    family: &FamilyArtifacts,
    mask: &BallMask,
    t0: f64,
    t1: f64,
) -> Result<StrongConvReport> {
    if family.runs.len() < 2 {
        return Err(Error::InvalidFamily(
            "strong convergence needs at least two runs".into(),
        ));
    }
    let reference = family.reference_run();
    check_mask(mask, reference)?;
    let rows: Vec<StrongConvRow> = family
        .runs
        .par_iter()
        .map(|run| {
            let pairs = paired(run, reference, t0, t1)?;
            let diff: Vec<(f64, ScalarField)> = pairs
                .iter()
                .map(|(t, f, r)| (*t, f.sub(r).frobenius()))
                .collect();
            let modulus: Vec<(f64, ScalarField)> = pairs
                .iter()
                .map(|(t, f, r)| (*t, f.frobenius().sub(&r.frobenius())))
                .collect();
            Ok(StrongConvRow {
                label: run.label.clone(),
                param: run.param,
                l2_error: local_lp_norm(&diff, mask, 2.0, t0, t1)?,
                l3_modulus_error: local_lp_norm(&modulus, mask, 3.0, t0, t1)?,
            })
        })
        .collect::<Result<_>>()?;

    let p_ref = reference.param;
    let mut others: Vec<&StrongConvRow> = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != family.reference)
        .map(|(_, r)| r)
        .collect();
    others.sort_by(|a, b| {
        (b.param - p_ref)
            .abs()
            .partial_cmp(&(a.param - p_ref).abs())
            .unwrap()
    });
    let monotone = others.windows(2).all(|w| w[1].l2_error < w[0].l2_error);
    let abscissa = |p: f64| {
        if family.sweep == "n" {
            reference.config.length / p
        } else {
            p
        }
    };
    let points: Vec<(f64, f64)> = others
        .iter()
        .map(|r| (abscissa(r.param), r.l2_error))
        .collect();
    Ok(StrongConvReport {
        reference: reference.label.clone(),
        reference_note: REFERENCE_PROXY.into(),
        sweep: family.sweep.clone(),
        window: [t0, t1],
        mask: mask.spec(),
        rows,
        monotone,
        fitted_rate: log_log_slope(&points),
    })
}

/// Cutoff `s` with `s = 1` on `[0, M/2]`, `s = 0` on `[M, ∞)` and the cubic
/// smoothstep in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffFn {
    pub cap: f64,
}

impl CutoffFn {
    pub fn new(cap: f64) -> Self {
        assert!(cap > 0.0, "cutoff cap must be positive");
        Self { cap }
    }

    pub fn s(&self, z: f64) -> f64 {
        let r = ((z - 0.5 * self.cap) / (0.5 * self.cap)).clamp(0.0, 1.0);
        1.0 - r * r * (3.0 - 2.0 * r)
    }

    pub fn s_prime(&self, z: f64) -> f64 {
        let h = 0.5 * self.cap;
        let r = (z - h) / h;
        if !(0.0..=1.0).contains(&r) {
            return 0.0;
        }
        -6.0 * r * (1.0 - r) / h
    }

    /// `ψ(F) = F s(|F|)`
    pub fn psi(&self, f: &Mat2) -> Mat2 {
        f.scale(self.s(f.norm()))
    }

    /// `φ(F) = |F|² s(|F|)`
    pub fn phi(&self, f: &Mat2) -> f64 {
        let z = f.norm();
        z * z * self.s(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingRow {
    pub cap: f64,
    /// `∫∫_B 𝒢 : ψ(F)`
    pub matrix_pairing: f64,
    /// `∫∫_B [(−Δ)⁻¹div(∇P − div FFᵀ)]_a φ(F)`
    pub scalar_projection: f64,
    /// `∫∫_B [P_a − Π₁ + (−Δ)⁻¹(∂₁²−∂₂²)Π₂ + 2(−Δ)⁻¹∂₁∂₂Π₃]_a φ(F)`
    pub scalar_pressure: f64,
    /// `|scalar_projection + scalar_pressure| / ∫∫_B |[…]_a φ(F)|`: the two
    /// integrands are negatives of each other once the ball average is removed.
    pub identity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub label: String,
    pub param: f64,
    pub window: [f64; 2],
    pub mask: BallSpec,
    pub rows: Vec<PairingRow>,
    /// Largest `‖q_proj + q_pres‖_{L²(B)} / ‖q_proj‖_{L²(B)}` over the
    /// snapshots in the window.
    pub assembly_residual: f64,
}

/// Ball-average-free integrands of the two scalar forms, in that order.
pub fn pairing_integrands(state: &State, mask: &BallMask) -> (ScalarField, ScalarField) {
    let f = &state.f;
    let [pi1, pi2, pi3] = pi_fields(f);
    let (_, p) = pressure(state);
    let tau = MatrixField2::new([pi1.add(&pi2), pi3.clone(), pi3.clone(), pi1.sub(&pi2)]);
    let w = grad(&p).sub(&div_mat(&tau));
    let q_proj = inv_laplacian(&div(&w));
    let d2 = |s: &ScalarField, a: Axis, b: Axis| deriv(&deriv(s, a), b);
    let aniso = d2(&pi2, Axis::X1, Axis::X1).sub(&d2(&pi2, Axis::X2, Axis::X2));
    let shear = d2(&pi3, Axis::X1, Axis::X2).scale(2.0);
    let q_pres = mean_zero(&p, Some(mask))
        .sub(&pi1)
        .add(&inv_laplacian(&aniso))
        .add(&inv_laplacian(&shear));
    (mean_zero(&q_proj, Some(mask)), mean_zero(&q_pres, Some(mask)))
}

pub fn flux_pairing(
    run: &RunArtifacts,
    cutoffs: &[CutoffFn],
    mask: &BallMask,
    t0: f64,
    t1: f64,
) -> Result<PairingReport> {
    let states = window_states(run, t0, t1)?;
    if mask.grid() != states[0].grid() {
        return Err(Error::GridMismatch(format!(
            "mask grid differs from run {}",
            run.label
        )));
    }
    // Per snapshot and cutoff: (matrix, projection, pressure, |projection|), then the assembly residual.
    let per_state: Vec<(Vec<[f64; 4]>, f64)> = states
        .par_iter()
        .map(|s| {
            let g = effective_flux(s).g;
            let (q_proj, q_pres) = pairing_integrands(s, mask);
            let sum = q_proj.add(&q_pres);
            let denom = mask.integrate_abs_pow(&q_proj, 2.0).sqrt();
            let num = mask.integrate_abs_pow(&sum, 2.0).sqrt();
            let assembly = if denom > 0.0 { num / denom } else { num };
            let vals = cutoffs
                .iter()
                .map(|c| {
                    let psi_dot = ScalarField::new(
                        s.grid(),
                        (0..s.grid().len())
                            .map(|i| g.at(i).contract(&c.psi(&s.f.at(i))))
                            .collect(),
                    );
                    let phi = s.f.scalar_map(|m| c.phi(&m));
                    let a = q_proj.mul(&phi);
                    let b = q_pres.mul(&phi);
                    [
                        mask.integrate(&psi_dot),
                        mask.integrate(&a),
                        mask.integrate(&b),
                        mask.integrate_abs_pow(&a, 1.0),
                    ]
                })
                .collect();
            (vals, assembly)
        })
        .collect();
    let times: Vec<f64> = states.iter().map(|s| s.t).collect();
    let integrate = |c: usize, q: usize| -> Result<f64> {
        let samples: Vec<(f64, f64)> = times
            .iter()
            .zip(&per_state)
            .map(|(t, v)| (*t, v.0[c][q]))
            .collect();
        trapezoid_window(&samples, t0, t1)
    };
    let rows = cutoffs
        .iter()
        .enumerate()
        .map(|(c, cut)| {
            let (m, a, b, scale) = (
                integrate(c, 0)?,
                integrate(c, 1)?,
                integrate(c, 2)?,
                integrate(c, 3)?,
            );
            Ok(PairingRow {
                cap: cut.cap,
                matrix_pairing: m,
                scalar_projection: a,
                scalar_pressure: b,
                identity_residual: if scale > 0.0 {
                    (a + b).abs() / scale
                } else {
                    (a + b).abs()
                },
            })
        })
        .collect::<Result<_>>()?;
    Ok(PairingReport {
        label: run.label.clone(),
        param: run.param,
        window: [t0, t1],
        mask: mask.spec(),
        rows,
        assembly_residual: per_state.iter().map(|v| v.1).fold(0.0, f64::max),
    })
}

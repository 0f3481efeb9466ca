//! Pointwise 2×2 matrix algebra.
//!
//! Everything here acts on a single matrix and is independent of any grid:
//! the (Π₁, Π₂, Π₃) decomposition of the Cauchy–Green tensor `F Fᵀ`, the
//! truncation `T_k`, polar and eigen (stretch) decompositions and the two
//! matrix inequalities that the integrability estimates rest on.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Universal constant certified for [`frobenius_bound`]: the maximum of the
/// three case constants 5/3, 8 and 2√3.
pub const FROBENIUS_BOUND_C: f64 = 8.0;

/// Constant certified (by brute-force sweep) for [`perturbation_bound`].
pub const PERTURBATION_BOUND_C: f64 = 16.0;

/// Default tolerance on `|det τ − 1|` accepted by [`eigen_stretch`].
pub const DEFAULT_DET_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("matrix is not symmetric positive definite (smallest eigenvalue {0:e})")]
    NotSpd(f64),
    #[error("det = {det} is outside 1 ± {tol:e}")]
    DetOutOfGauge { det: f64, tol: f64 },
    #[error("matrix is singular or orientation-reversing (det = {0:e})")]
    Singular(f64),
}

/// A real 2×2 matrix, `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub const fn diag(d1: f64, d2: f64) -> Self {
        Self::new(d1, 0.0, 0.0, d2)
    }

    /// Counter-clockwise rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn from_rows(r1: [f64; 2], r2: [f64; 2]) -> Self {
        Self::new(r1[0], r1[1], r2[0], r2[1])
    }

    pub fn from_cols(c1: [f64; 2], c2: [f64; 2]) -> Self {
        Self::new(c1[0], c2[0], c1[1], c2[1])
    }

    pub fn row(&self, i: usize) -> [f64; 2] {
        match i {
            0 => [self.a11, self.a12],
            1 => [self.a21, self.a22],
            _ => panic!("row index {i} out of range"),
        }
    }

    pub fn col(&self, j: usize) -> [f64; 2] {
        match j {
            0 => [self.a11, self.a21],
            1 => [self.a12, self.a22],
            _ => panic!("column index {j} out of range"),
        }
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    /// Squared Frobenius norm `|A|²`.
    pub fn norm_sq(&self) -> f64 {
        self.a11 * self.a11 + self.a12 * self.a12 + self.a21 * self.a21 + self.a22 * self.a22
    }

    /// Frobenius norm `|A|`.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// `A : B = Σ A_ij B_ij`.
    pub fn contract(&self, other: &Mat2) -> f64 {
        self.a11 * other.a11 + self.a12 * other.a12 + self.a21 * other.a21 + self.a22 * other.a22
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (self.a11 - other.a11)
            .abs()
            .max((self.a12 - other.a12).abs())
            .max((self.a21 - other.a21).abs())
            .max((self.a22 - other.a22).abs())
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }

    /// Cauchy–Green tensor `τ = A Aᵀ`.
    pub fn gram(&self) -> Self {
        *self * self.transpose()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale(s)
    }
}

/// The three scalars encoding the symmetric tensor `τ = F Fᵀ`:
/// `τ₁₁ = Π₁ + Π₂`, `τ₂₂ = Π₁ − Π₂`, `τ₁₂ = τ₂₁ = Π₃`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PiTriple {
    pub pi1: f64,
    pub pi2: f64,
    pub pi3: f64,
}

impl PiTriple {
    /// Reassembles `τ` from the triple.
    pub fn tau(&self) -> Mat2 {
        Mat2::new(self.pi1 + self.pi2, self.pi3, self.pi3, self.pi1 - self.pi2)
    }

    /// `det τ = Π₁² − Π₂² − Π₃²`.
    pub fn det_tau(&self) -> f64 {
        self.pi1 * self.pi1 - self.pi2 * self.pi2 - self.pi3 * self.pi3
    }

    /// Traceless part `[[Π₂, Π₃], [Π₃, −Π₂]]`.
    pub fn traceless(&self) -> Mat2 {
        Mat2::new(self.pi2, self.pi3, self.pi3, -self.pi2)
    }
}

/// Π decomposition of `F Fᵀ`, built from the rows of `F`.
pub fn pi_decompose(f: &Mat2) -> PiTriple {
    let [r11, r12] = f.row(0);
    let [r21, r22] = f.row(1);
    let n1 = r11 * r11 + r12 * r12;
    let n2 = r21 * r21 + r22 * r22;
    PiTriple {
        pi1: 0.5 * (n1 + n2),
        pi2: 0.5 * (n1 - n2),
        pi3: r11 * r21 + r12 * r22,
    }
}

/// Traceless part of `F Fᵀ`: `F Fᵀ − tr(F Fᵀ) I / 2`.
pub fn hopf_traceless(f: &Mat2) -> Mat2 {
    pi_decompose(f).traceless()
}

/// Piecewise-linear truncation `T_k(z) = min(z, k)`.
pub fn truncate_tk(z: f64, k: f64) -> f64 {
    debug_assert!(k > 0.0, "truncation level must be positive");
    z.min(k)
}

/// Derivative of [`truncate_tk`], taken as 0 on the kink `z = k`.
pub fn truncate_tk_prime(z: f64, k: f64) -> f64 {
    if z < k {
        1.0
    } else {
        0.0
    }
}

/// `(|F|², C (| |F₁|² − |F₂|² | + |F₁·F₂| + |det F|))` with columns `F₁`, `F₂`
/// and `C = 8`.
pub fn frobenius_bound(f: &Mat2) -> (f64, f64) {
    let [c11, c12] = f.col(0);
    let [c21, c22] = f.col(1);
    let n1 = c11 * c11 + c12 * c12;
    let n2 = c21 * c21 + c22 * c22;
    let dot = c11 * c21 + c12 * c22;
    let rhs = FROBENIUS_BOUND_C * ((n1 - n2).abs() + dot.abs() + f.det().abs());
    (f.norm_sq(), rhs)
}

/// `(|E|², C (|E₁₁ − E₂₂|² + |E₁₂ + E₂₁|² + |det E|))` with `C = 16`.
pub fn perturbation_bound(e: &Mat2) -> (f64, f64) {
    let d = e.a11 - e.a22;
    let s = e.a12 + e.a21;
    let rhs = PERTURBATION_BOUND_C * (d * d + s * s + e.det().abs());
    (e.norm_sq(), rhs)
}

/// `τ = Oᵀ diag(λ, 1/λ) O` with `0 < λ ≤ 1`.
///
/// Row `i` of `rotation` is the unit eigenvector belonging to the `i`-th
/// diagonal entry; each row has its first nonzero component positive, and an
/// isotropic `τ` yields the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StretchDecomp {
    pub rotation: Mat2,
    pub lambda: f64,
}

impl StretchDecomp {
    pub fn reconstruct(&self) -> Mat2 {
        let o = self.rotation;
        o.transpose() * Mat2::diag(self.lambda, 1.0 / self.lambda) * o
    }
}

fn sign_normalize(v: [f64; 2]) -> [f64; 2] {
    let lead = if v[0] != 0.0 { v[0] } else { v[1] };
    if lead < 0.0 {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Stretch decomposition of a unimodular SPD `τ` (symmetrized before use).
pub fn eigen_stretch(tau: &Mat2) -> Result<StretchDecomp, TensorError> {
    eigen_stretch_with_tol(tau, DEFAULT_DET_TOL)
}

pub fn eigen_stretch_with_tol(tau: &Mat2, tol_det: f64) -> Result<StretchDecomp, TensorError> {
    let a = tau.a11;
    let d = tau.a22;
    let b = 0.5 * (tau.a12 + tau.a21);
    let half_tr = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let lam_min = half_tr - radius;
    if !(lam_min > 0.0) {
        return Err(TensorError::NotSpd(lam_min));
    }
    let det = a * d - b * b;
    if (det - 1.0).abs() > tol_det {
        return Err(TensorError::DetOutOfGauge { det, tol: tol_det });
    }
    // Avoid cancellation in half_tr - radius: λ_min = det / λ_max.
    let lam_max = half_tr + radius;
    let lambda = det / lam_max;
    if radius <= f64::EPSILON * half_tr {
        return Ok(StretchDecomp {
            rotation: Mat2::IDENTITY,
            lambda,
        });
    }
    // Principal direction of the larger eigenvalue.
    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let (s, c) = theta.sin_cos();
    let v_max = sign_normalize([c, s]);
    let v_min = sign_normalize([-s, c]);
    Ok(StretchDecomp {
        rotation: Mat2::from_rows(v_min, v_max),
        lambda,
    })
}

/// Polar decomposition `F = R U`, `R` a rotation, `U = √(FᵀF)` SPD.
pub fn polar(f: &Mat2) -> Result<(Mat2, Mat2), TensorError> {
    let det = f.det();
    if !(det > 0.0) {
        return Err(TensorError::Singular(det));
    }
    // In 2D the rotation factor has the closed form atan2(F21 − F12, F11 + F22).
    let theta = (f.a21 - f.a12).atan2(f.a11 + f.a22);
    let r = Mat2::rotation(theta);
    let mut u = r.transpose() * *f;
    let off = 0.5 * (u.a12 + u.a21);
    u.a12 = off;
    u.a21 = off;
    Ok((r, u))
}

//! Fourier-space calculus on the periodic box.
//!
//! Functions with a `spec_` prefix act directly on [`Spectrum`]s and are what
//! the time stepper uses; the field-level wrappers transform in and out.

use rustfft::num_complex::Complex64;

use crate::spectral::{Grid2, MatrixField2, ScalarField, Spectrum, VectorField2};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub fn from_index(axis: usize) -> Self {
        match axis {
            1 => Axis::X1,
            2 => Axis::X2,
            _ => panic!("axis must be 1 or 2, got {axis}"),
        }
    }
}

pub fn spec_deriv(grid: &Grid2, s: &[Complex64], axis: Axis) -> Spectrum {
    s.iter()
        .enumerate()
        .map(|(idx, &c)| {
            let (k1, k2) = grid.wavevector(idx);
            let k = match axis {
                Axis::X1 => k1,
                Axis::X2 => k2,
            };
            I * k * c
        })
        .collect()
}

pub fn spec_laplacian(grid: &Grid2, s: &[Complex64]) -> Spectrum {
    s.iter()
        .enumerate()
        .map(|(idx, &c)| {
            let (k1, k2) = grid.wavevector(idx);
            -(k1 * k1 + k2 * k2) * c
        })
        .collect()
}

/// `(−Δ)^{-1}` with the zero-mean gauge (modes with `|k| = 0` are zeroed).
pub fn spec_inv_neg_laplacian(grid: &Grid2, s: &[Complex64]) -> Spectrum {
    s.iter()
        .enumerate()
        .map(|(idx, &c)| {
            let (k1, k2) = grid.wavevector(idx);
            let k2sum = k1 * k1 + k2 * k2;
            if k2sum > 0.0 {
                c / k2sum
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// Leray projection of a spectral vector field; mean modes pass through.
pub fn spec_leray(grid: &Grid2, v1: &mut [Complex64], v2: &mut [Complex64]) {
    for idx in 0..v1.len() {
        let (k1, k2) = grid.wavevector(idx);
        let k2sum = k1 * k1 + k2 * k2;
        if k2sum > 0.0 {
            let proj = (k1 * v1[idx] + k2 * v2[idx]) / k2sum;
            v1[idx] -= k1 * proj;
            v2[idx] -= k2 * proj;
        }
    }
}

/// Physical-space product of two spectra, returned dealiased in spectral form.
pub fn spec_product(grid: &Grid2, a: &[f64], b: &[f64]) -> Spectrum {
    let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mut s = grid.forward(&prod);
    grid.dealias_in_place(&mut s);
    s
}

pub fn deriv(f: &ScalarField, axis: Axis) -> ScalarField {
    let g = &f.grid;
    ScalarField::new(g, g.inverse(&spec_deriv(g, &g.forward(&f.values), axis)))
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = &f.grid;
    ScalarField::new(g, g.inverse(&spec_laplacian(g, &g.forward(&f.values))))
}

/// `(−Δ)^{-1} f` in the zero-mean gauge, so `Δ result = −(f − mean f)`.
pub fn inv_laplacian(f: &ScalarField) -> ScalarField {
    let g = &f.grid;
    ScalarField::new(
        g,
        g.inverse(&spec_inv_neg_laplacian(g, &g.forward(&f.values))),
    )
}

/// Projection onto the modes kept by the 2/3 rule.
pub fn dealias(f: &ScalarField) -> ScalarField {
    let g = &f.grid;
    let mut s = g.forward(&f.values);
    g.dealias_in_place(&mut s);
    ScalarField::new(g, g.inverse(&s))
}

/// Dealiased pointwise product.
pub fn dealiased_product(a: &ScalarField, b: &ScalarField) -> ScalarField {
    let g = &a.grid;
    ScalarField::new(g, g.inverse(&spec_product(g, &a.values, &b.values)))
}

pub fn grad(f: &ScalarField) -> VectorField2 {
    let g = &f.grid;
    let s = g.forward(&f.values);
    VectorField2::new(
        ScalarField::new(g, g.inverse(&spec_deriv(g, &s, Axis::X1))),
        ScalarField::new(g, g.inverse(&spec_deriv(g, &s, Axis::X2))),
    )
}

pub fn div(v: &VectorField2) -> ScalarField {
    deriv(&v.c[0], Axis::X1).add(&deriv(&v.c[1], Axis::X2))
}

/// Velocity gradient `(∇u)_{ij} = ∂_j u_i`.
pub fn grad_vec(u: &VectorField2) -> MatrixField2 {
    MatrixField2::new([
        deriv(&u.c[0], Axis::X1),
        deriv(&u.c[0], Axis::X2),
        deriv(&u.c[1], Axis::X1),
        deriv(&u.c[1], Axis::X2),
    ])
}

/// `div Fᵀ`, component `j` = `Σ_i ∂_i F_ij` (divergence of the columns).
pub fn div_mat_t(f: &MatrixField2) -> VectorField2 {
    VectorField2::new(
        deriv(f.comp(0, 0), Axis::X1).add(&deriv(f.comp(1, 0), Axis::X2)),
        deriv(f.comp(0, 1), Axis::X1).add(&deriv(f.comp(1, 1), Axis::X2)),
    )
}

/// Row divergence, component `i` = `Σ_j ∂_j A_ij` (the momentum-equation `div τ`).
pub fn div_mat(a: &MatrixField2) -> VectorField2 {
    VectorField2::new(
        deriv(a.comp(0, 0), Axis::X1).add(&deriv(a.comp(0, 1), Axis::X2)),
        deriv(a.comp(1, 0), Axis::X1).add(&deriv(a.comp(1, 1), Axis::X2)),
    )
}

/// Leray projection onto divergence-free fields.
pub fn leray_project(v: &VectorField2) -> VectorField2 {
    let g = v.grid();
    let mut s1 = g.forward(&v.c[0].values);
    let mut s2 = g.forward(&v.c[1].values);
    spec_leray(g, &mut s1, &mut s2);
    VectorField2::new(
        ScalarField::new(g, g.inverse(&s1)),
        ScalarField::new(g, g.inverse(&s2)),
    )
}

/// Box `L²` norm computed from the Fourier modes (Parseval).
pub fn mode_l2_norm(f: &ScalarField) -> f64 {
    let g = &f.grid;
    let s = g.forward(&f.values);
    let sum: f64 = s.iter().map(|c| c.norm_sqr()).sum();
    (sum * g.area()).sqrt() / g.len() as f64
}

/// Spectral resampling to another resolution on the same box: modes shared by
/// both grids are copied, the Nyquist row/column is dropped.
pub fn resample(f: &ScalarField, target: &Grid2) -> ScalarField {
    let src = &f.grid;
    assert_eq!(
        src.length(),
        target.length(),
        "resampling needs equal boxes"
    );
    if src.n() == target.n() {
        return ScalarField::new(target, f.values.clone());
    }
    let s = src.forward(&f.values);
    let cutoff = (src.n().min(target.n()) / 2) as i64;
    let nt = target.n();
    let mut out = vec![Complex64::new(0.0, 0.0); target.len()];
    let wrap = |m: i64, n: usize| -> usize {
        if m >= 0 {
            m as usize
        } else {
            (m + n as i64) as usize
        }
    };
    let ratio = (target.len() as f64) / (src.len() as f64);
    for i1 in 0..src.n() {
        let m1 = src.freq(i1);
        if m1.abs() >= cutoff {
            continue;
        }
        for i2 in 0..src.n() {
            let m2 = src.freq(i2);
            if m2.abs() >= cutoff {
                continue;
            }
            out[wrap(m1, nt) * nt + wrap(m2, nt)] = s[src.index(i1, i2)] * ratio;
        }
    }
    ScalarField::new(target, target.inverse(&out))
}

/// Evaluates the trigonometric interpolant of `f` at arbitrary points.
pub struct TrigInterpolant {
    grid: Grid2,
    spec: Spectrum,
}

impl TrigInterpolant {
    pub fn new(f: &ScalarField) -> Self {
        Self {
            grid: f.grid.clone(),
            spec: f.grid.forward(&f.values),
        }
    }

    fn axis_phases(&self, x: f64) -> Vec<Complex64> {
        let g = &self.grid;
        let half = (g.n() / 2) as i64;
        let scale = 2.0 * std::f64::consts::PI / g.length();
        (0..g.n())
            .map(|i| {
                let m = g.freq(i);
                if m == -half {
                    Complex64::new((m as f64 * scale * x).cos(), 0.0)
                } else {
                    Complex64::from_polar(1.0, m as f64 * scale * x)
                }
            })
            .collect()
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let n = self.grid.n();
        let e1 = self.axis_phases(x[0]);
        let e2 = self.axis_phases(x[1]);
        let mut total = Complex64::new(0.0, 0.0);
        for i1 in 0..n {
            let row = &self.spec[i1 * n..(i1 + 1) * n];
            let inner: Complex64 = row.iter().zip(&e2).map(|(c, e)| c * e).sum();
            total += inner * e1[i1];
        }
        total.re / self.grid.len() as f64
    }
}

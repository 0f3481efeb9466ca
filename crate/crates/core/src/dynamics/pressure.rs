use crate::dynamics::State;
use crate::spectral::{
    spec_deriv, spec_inv_neg_laplacian, spec_product, Axis, Grid2, MatrixField2, ScalarField,
    Spectrum,
};

/// Dealiased `(Π₁, Π₂, Π₃)` fields: `2Π₁ = |F|²`, `2Π₂ = |r₁|² − |r₂|²`,
/// `Π₃ = r₁·r₂` with `r_i` the rows of `F`.
pub fn pi_fields(f: &MatrixField2) -> [ScalarField; 3] {
    let g = f.grid();
    let spec = pi_spectra(f);
    std::array::from_fn(|i| ScalarField::new(g, g.inverse(&spec[i])))
}

pub(crate) fn pi_spectra(f: &MatrixField2) -> [Spectrum; 3] {
    let g = f.grid();
    let (f11, f12, f21, f22) = (
        &f.c[0].values,
        &f.c[1].values,
        &f.c[2].values,
        &f.c[3].values,
    );
    let npts = g.len();
    let mut pi = [vec![0.0; npts], vec![0.0; npts], vec![0.0; npts]];
    for p in 0..npts {
        let r1 = f11[p] * f11[p] + f12[p] * f12[p];
        let r2 = f21[p] * f21[p] + f22[p] * f22[p];
        pi[0][p] = 0.5 * (r1 + r2);
        pi[1][p] = 0.5 * (r1 - r2);
        pi[2][p] = f11[p] * f21[p] + f12[p] * f22[p];
    }
    pi.map(|v| {
        let mut s = g.forward(&v);
        g.dealias_in_place(&mut s);
        s
    })
}

fn d(g: &Grid2, s: &Spectrum, a: Axis) -> Spectrum {
    spec_deriv(g, s, a)
}

/// `(P̂, P)` with `ΔP̂ = −div div(u⊗u) + (∂₁²−∂₂²)Π₂ + 2∂₁∂₂Π₃` and `P = P̂ + Π₁`,
/// both zero-mean. This is the pressure of the `FFᵀ` stress (no `δ` term).
pub fn pressure(state: &State) -> (ScalarField, ScalarField) {
    let g = state.grid();
    let (u1, u2) = (&state.u.c[0].values, &state.u.c[1].values);
    let w11 = spec_product(g, u1, u1);
    let w12 = spec_product(g, u1, u2);
    let w22 = spec_product(g, u2, u2);
    let [pi1, pi2, pi3] = pi_spectra(&state.f);
    let (x1, x2) = (Axis::X1, Axis::X2);
    let dd = |s: &Spectrum, a: Axis, b: Axis| d(g, &d(g, s, a), b);
    let a11 = dd(&w11, x1, x1);
    let a12 = dd(&w12, x1, x2);
    let a22 = dd(&w22, x2, x2);
    let p11 = dd(&pi2, x1, x1);
    let p22 = dd(&pi2, x2, x2);
    let q12 = dd(&pi3, x1, x2);
    // ΔP̂ = R, so P̂ = −(−Δ)⁻¹ R.
    let r: Spectrum = (0..g.len())
        .map(|m| -(a11[m] + 2.0 * a12[m] + a22[m]) + p11[m] - p22[m] + 2.0 * q12[m])
        .collect();
    let p_hat_spec: Spectrum = spec_inv_neg_laplacian(g, &r).iter().map(|c| -c).collect();
    let p_hat = ScalarField::new(g, g.inverse(&p_hat_spec));
    let mut pi1_zero = pi1;
    pi1_zero[0] = 0.0.into();
    let pi1_field = ScalarField::new(g, g.inverse(&pi1_zero));
    let p = p_hat.add(&pi1_field);
    (p_hat, p)
}

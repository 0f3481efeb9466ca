use crate::dynamics::{elastic_stress, pi_fields, pressure, rhs, ModelParams, State};
use crate::error::{Error, Result};
use crate::spectral::{
    dealiased_product, deriv, div_mat, grad, inv_laplacian, laplacian, leray_project, Axis,
    MatrixField2, ScalarField, VectorField2,
};

/// The effective viscous flux and its scalar variants.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSet {
    /// `𝒢 = ∇u − (−Δ)⁻¹∇𝒫 div(FFᵀ)`, `𝒢_ij = ∂_j u_i − (−Δ)⁻¹∂_j(𝒫 div τ)_i`
    pub g: MatrixField2,
    /// `curl u − (−Δ)⁻¹[2∂₁∂₂Π₂ + (∂₂²−∂₁²)Π₃]`
    pub g1: ScalarField,
    /// `√2 curl u + (−Δ)⁻¹[(∂₁²−∂₂²)Π₂ + 2∂₁∂₂Π₃]`
    pub g1_tilde: ScalarField,
    /// `√2 curl u − P̂`
    pub g1_hat: ScalarField,
    /// `√2(∂₁u₂+∂₂u₁) + (∂₁u₁−∂₂u₂) + Π₂`
    pub g2: ScalarField,
    /// `(∂₁u₂+∂₂u₁) − √2(∂₁u₁−∂₂u₂) + Π₃`
    pub g3: ScalarField,
}

/// `curl u = ∂₂u₁ − ∂₁u₂`, the orientation under which
/// `curl div FFᵀ = 2∂₁∂₂Π₂ + (∂₂²−∂₁²)Π₃`.
pub fn curl(u: &VectorField2) -> ScalarField {
    deriv(&u.c[0], Axis::X2).sub(&deriv(&u.c[1], Axis::X1))
}

fn dd(f: &ScalarField, a: Axis, b: Axis) -> ScalarField {
    deriv(&deriv(f, a), b)
}

/// `2∂₁∂₂Π₂ + (∂₂²−∂₁²)Π₃`.
pub fn rotated_hopf_bracket(pi2: &ScalarField, pi3: &ScalarField) -> ScalarField {
    dd(pi2, Axis::X1, Axis::X2)
        .scale(2.0)
        .add(&dd(pi3, Axis::X2, Axis::X2))
        .sub(&dd(pi3, Axis::X1, Axis::X1))
}

/// `(∂₁²−∂₂²)Π₂ + 2∂₁∂₂Π₃`.
pub fn hopf_bracket(pi2: &ScalarField, pi3: &ScalarField) -> ScalarField {
    dd(pi2, Axis::X1, Axis::X1)
        .sub(&dd(pi2, Axis::X2, Axis::X2))
        .add(&dd(pi3, Axis::X1, Axis::X2).scale(2.0))
}

pub fn effective_flux(state: &State) -> FluxSet {
    let u = &state.u;
    let force = leray_project(&div_mat(&elastic_stress(&state.f, 0.0)));
    let correction: Vec<VectorField2> = force.c.iter().map(|c| grad(&inv_laplacian(c))).collect();
    let gu: Vec<VectorField2> = u.c.iter().map(grad).collect();
    let g = MatrixField2::new([
        gu[0].c[0].sub(&correction[0].c[0]),
        gu[0].c[1].sub(&correction[0].c[1]),
        gu[1].c[0].sub(&correction[1].c[0]),
        gu[1].c[1].sub(&correction[1].c[1]),
    ]);
    let [_, pi2, pi3] = pi_fields(&state.f);
    let w = curl(u);
    let sqrt2 = std::f64::consts::SQRT_2;
    let g1 = w.sub(&inv_laplacian(&rotated_hopf_bracket(&pi2, &pi3)));
    let g1_tilde = w
        .scale(sqrt2)
        .add(&inv_laplacian(&hopf_bracket(&pi2, &pi3)));
    let (p_hat, _) = pressure(state);
    let g1_hat = w.scale(sqrt2).sub(&p_hat);
    let shear = gu[1].c[0].add(&gu[0].c[1]);
    let stretch = gu[0].c[0].sub(&gu[1].c[1]);
    let g2 = shear.scale(sqrt2).add(&stretch).add(&pi2);
    let g3 = shear.sub(&stretch.scale(sqrt2)).add(&pi3);
    FluxSet {
        g,
        g1,
        g1_tilde,
        g1_hat,
        g2,
        g3,
    }
}

/// Dealiased `u·∇u`.
pub fn advection(u: &VectorField2) -> VectorField2 {
    let comp = |i: usize| {
        dealiased_product(&u.c[0], &deriv(&u.c[i], Axis::X1))
            .add(&dealiased_product(&u.c[1], &deriv(&u.c[i], Axis::X2)))
    };
    VectorField2::new(comp(0), comp(1))
}

/// `‖Δ𝒢 − ∇𝒫a‖_{L²}` and `‖∇𝒫a‖_{L²}` for the acceleration `a`.
fn flux_identity_parts(state: &State, accel: &VectorField2) -> (f64, f64) {
    let flux = effective_flux(state);
    let pa = leray_project(accel);
    let rhs: Vec<VectorField2> = pa.c.iter().map(grad).collect();
    let mut resid = 0.0;
    let mut scale = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let r = rhs[i].c[j].clone();
            resid += laplacian(flux.g.comp(i, j)).sub(&r).l2_norm().powi(2);
            scale += r.l2_norm().powi(2);
        }
    }
    (resid.sqrt(), scale.sqrt())
}

/// `Δ𝒢 = ∇𝒫(∂_tu + u·∇u)` checked with `∂_tu` by the centered difference of
/// `prev` and `next` around `state`. Returns the absolute `L²` residual.
pub fn flux_identity_residual(prev: &State, state: &State, next: &State) -> Result<f64> {
    let (d0, d1) = (state.t - prev.t, next.t - state.t);
    if prev.grid() != state.grid() || next.grid() != state.grid() {
        return Err(Error::WindowMismatch(
            "snapshots live on different grids".into(),
        ));
    }
    if !(d0 > 0.0 && d1 > 0.0) || (d0 - d1).abs() > 1e-9 * d0.max(d1) {
        return Err(Error::WindowMismatch(format!(
            "need three equally spaced snapshots, got gaps {d0} and {d1}"
        )));
    }
    let dudt = next.u.sub(&prev.u).scale(1.0 / (d0 + d1));
    let accel = dudt.add(&advection(&state.u));
    Ok(flux_identity_parts(state, &accel).0)
}

/// Instantaneous form with `∂_tu` from the model tendency (`μ = 1`, `δ = 0`
/// for the identity to hold). Returns `(absolute, relative)` residuals.
pub fn flux_identity_residual_instant(state: &State, params: &ModelParams) -> (f64, f64) {
    let (du, _) = rhs(state, params);
    let accel = du.add(&advection(&state.u));
    let (r, s) = flux_identity_parts(state, &accel);
    (r, if s > 0.0 { r / s } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{curl_potential_f, init, stream_velocity, InitSpec, Integrator};
    use crate::spectral::Grid2;
    use rustfft::num_complex::Complex64;

    fn random_state(g: &Grid2, seed: u64) -> State {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut field = |amp: f64| {
            let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            ScalarField::from_fn(g, move |x, y| {
                amp * (c[0] * (x + c[3]).sin()
                    + c[1] * (2.0 * y - x + c[4]).cos()
                    + c[2] * (x + 3.0 * y + c[5]).sin())
            })
        };
        let psi = field(0.6);
        let p1 = field(0.2);
        let p2 = field(0.2);
        State::new(0.0, stream_velocity(&psi), curl_potential_f(&p1, &p2))
    }

    #[test]
    fn equilibrium_fluxes_vanish() {
        let g = Grid2::periodic(16).unwrap();
        let f = effective_flux(&State::equilibrium(&g));
        assert!(f.g.linf_norm() < 1e-14);
        for s in [&f.g1, &f.g1_tilde, &f.g1_hat, &f.g2, &f.g3] {
            assert!(s.linf_norm() < 1e-14);
        }
    }

    #[test]
    fn flux_is_velocity_gradient_without_elastic_deformation() {
        let g = Grid2::periodic(32).unwrap();
        let s = init(&InitSpec::taylor_green(1.0, 1), &g).unwrap();
        let f = effective_flux(&s);
        let gu = crate::spectral::grad_vec(&s.u);
        assert!(f.g.sub(&gu).linf_norm() < 1e-14);
    }

    #[test]
    fn resting_fluid_flux_matches_term_by_term_assembly() {
        let g = Grid2::periodic(32).unwrap();
        let mut s = random_state(&g, 5);
        s.u = VectorField2::zeros(&g);
        let f = effective_flux(&s);
        // Spectral assembly of −(−Δ)⁻¹∂_j(𝒫 div τ)_i mode by mode.
        let tau = elastic_stress(&s.f, 0.0);
        let t: Vec<_> = tau.c.iter().map(|c| g.forward(&c.values)).collect();
        let i = Complex64::new(0.0, 1.0);
        let mut out = vec![vec![Complex64::new(0.0, 0.0); g.len()]; 4];
        for m in 0..g.len() {
            let (k1, k2) = g.wavevector(m);
            let kk = k1 * k1 + k2 * k2;
            if kk == 0.0 {
                continue;
            }
            let d = [
                i * (k1 * t[0][m] + k2 * t[1][m]),
                i * (k1 * t[2][m] + k2 * t[3][m]),
            ];
            let proj = (k1 * d[0] + k2 * d[1]) / kk;
            let v = [d[0] - k1 * proj, d[1] - k2 * proj];
            let k = [k1, k2];
            for a in 0..2 {
                for b in 0..2 {
                    out[2 * a + b][m] = -(i * k[b] * v[a]) / kk;
                }
            }
        }
        let oracle = MatrixField2::new(std::array::from_fn(|c| {
            ScalarField::new(&g, g.inverse(&out[c]))
        }));
        assert!(f.g.sub(&oracle).linf_norm() < 1e-12);
    }

    #[test]
    fn instant_identity_holds_to_round_off() {
        let g = Grid2::periodic(32).unwrap();
        for seed in 0..5 {
            let s = random_state(&g, seed);
            let (_, rel) = flux_identity_residual_instant(&s, &ModelParams::regularized(0.0, 0.0));
            assert!(rel < 1e-11, "seed {seed}: {rel:e}");
        }
    }

    #[test]
    fn centered_identity_is_second_order() {
        let g = Grid2::periodic(32).unwrap();
        let s0 = random_state(&g, 9);
        let params = ModelParams::regularized(0.0, 0.0);
        let res = |dt: f64| {
            let it = Integrator::new(&g, params, dt);
            let s1 = it.step(&s0).unwrap();
            let s2 = it.step(&s1).unwrap();
            flux_identity_residual(&s0, &s1, &s2).unwrap()
        };
        let ratio = res(0.01) / res(0.005);
        assert!(ratio > 3.5, "ratio {ratio}");
        let eq = State::equilibrium(&g);
        let mut e1 = eq.clone();
        e1.t = 0.1;
        let mut e2 = eq.clone();
        e2.t = 0.2;
        assert_eq!(flux_identity_residual(&eq, &e1, &e2).unwrap(), 0.0);
        e2.t = 0.3;
        assert!(flux_identity_residual(&eq, &e1, &e2).is_err());
    }

    #[test]
    fn variant_cross_checks() {
        let g = Grid2::periodic(32).unwrap();
        let s = random_state(&g, 3);
        let f = effective_flux(&s);
        // 𝒢̃₁ − 𝒢̂₁ = (−Δ)⁻¹ div div(u⊗u).
        let u = &s.u;
        let w = |a: usize, b: usize| dealiased_product(&u.c[a], &u.c[b]);
        let dd_uu = dd(&w(0, 0), Axis::X1, Axis::X1)
            .add(&dd(&w(0, 1), Axis::X1, Axis::X2).scale(2.0))
            .add(&dd(&w(1, 1), Axis::X2, Axis::X2));
        let diff = f.g1_tilde.sub(&f.g1_hat);
        assert!(diff.sub(&inv_laplacian(&dd_uu)).linf_norm() < 1e-12);
        // 𝒢₁ = −(−Δ)⁻¹ curl(∂_tu + u·∇u) at μ = 1, δ = 0.
        let (du, _) = rhs(&s, &ModelParams::regularized(0.0, 0.0));
        let a = du.add(&advection(u));
        let g1 = inv_laplacian(&curl(&a)).scale(-1.0);
        assert!(f.g1.sub(&g1).linf_norm() < 1e-12);
        // Π₂, Π₃ enter 𝒢₂, 𝒢₃ pointwise.
        let [_, pi2, pi3] = pi_fields(&s.f);
        let gu: Vec<VectorField2> = u.c.iter().map(grad).collect();
        let shear = gu[1].c[0].add(&gu[0].c[1]);
        let stretch = gu[0].c[0].sub(&gu[1].c[1]);
        let r2 = std::f64::consts::SQRT_2;
        assert!(
            f.g2.sub(&shear.scale(r2).add(&stretch).add(&pi2))
                .linf_norm()
                < 1e-14
        );
        assert!(
            f.g3.sub(&shear.sub(&stretch.scale(r2)).add(&pi3))
                .linf_norm()
                < 1e-14
        );
    }

    #[test]
    fn brackets_are_related_by_an_eighth_turn() {
        // Symbol of 2∂₁∂₂Π₂ + (∂₂²−∂₁²)Π₃ evaluated at the wavevector rotated
        // by π/4 equals the symbol of (∂₁²−∂₂²)Π₂ + 2∂₁∂₂Π₃ at the original one.
        let g = Grid2::periodic(16).unwrap();
        let s = random_state(&g, 1);
        let [_, pi2, pi3] = pi_fields(&s.f);
        let p2 = g.forward(&pi2.values);
        let p3 = g.forward(&pi3.values);
        let target = g.forward(&hopf_bracket(&pi2, &pi3).values);
        let (c, sn) = (
            std::f64::consts::FRAC_PI_4.cos(),
            std::f64::consts::FRAC_PI_4.sin(),
        );
        for m in 0..g.len() {
            let (k1, k2) = g.wavevector(m);
            let (r1, r2) = (c * k1 - sn * k2, sn * k1 + c * k2);
            // ∂_a∂_b ↦ −k_a k_b.
            let rotated = -2.0 * r1 * r2 * p2[m] + (r1 * r1 - r2 * r2) * p3[m];
            assert!((rotated - target[m]).norm() < 1e-9 * (1.0 + target[m].norm()));
        }
    }
}

//! Acceptance suite. Each test checks one criterion at its stated tolerance
//! and prints a single `PASS`/`FAIL` line (written past the output capture so
//! it shows up in every `cargo test` run).

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use visco_core::diagnostics::{
    constraint_residuals, effective_flux, energy_balance_residual, energy_report,
    exact_energy_balance_residual, flux_identity_residual_instant, integrability_report, moment,
    pi_identity_residual, renorm_residual,
};
use visco_core::dynamics::{
    curl_potential_f, decode_snapshot, encode_snapshot, flow_map_oracle, init, read_snapshot,
    seeded_stream, stream_velocity, write_snapshot, FlowMapOptions, InitSpec, Integrator,
    ModelParams, RunConfig, SeedGrid, State,
};
use visco_core::harness::{
    flux_pairing, oracle_check, osc_defect, pairing_integrands, report, run_family,
    run_family_in_memory, strong_conv, write_report, AnalysisConfig, CutoffFn, FamilyArtifacts,
    RunArtifacts, RunFamily, Sweep,
};
use visco_core::spectral::{grad_vec, BallMask, Grid2, MatrixField2, ScalarField, VectorField2};
use visco_core::tensor::{frobenius_bound, hopf_traceless, pi_decompose, Mat2};

fn verdict(name: &str, pass: bool, detail: &str) {
    let line = format!("{} {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "{name}: {detail}");
}

/// `log₂` of successive ratios for a sequence measured at halving step sizes.
fn orders(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Allowance on an observed order `p` for "order ≥ q": a q-th order error
/// approached from below in the pre-asymptotic range gives `p` slightly
/// under `q`.
const ORDER_SLACK: f64 = 0.05;

fn at_least_order(ord: &[f64], q: f64) -> bool {
    ord.iter().all(|&o| o >= q - ORDER_SLACK)
}

fn fmt_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", items.join(", "))
}

/// Band-limited random scalar field with modes `|m| ≤ 4`.
fn random_band_limited(g: &Grid2, rng: &mut ChaCha8Rng, amp: f64) -> ScalarField {
    let modes: Vec<(f64, f64, f64, f64)> = (0..12)
        .map(|_| {
            let m1 = rng.gen_range(-4i32..=4) as f64;
            let m2 = rng.gen_range(-4i32..=4) as f64;
            (
                m1,
                m2,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let c = rng.gen_range(-1.0..1.0);
    ScalarField::from_fn(g, |x, y| {
        c + amp
            * modes
                .iter()
                .map(|&(a, b, w, ph)| w * (a * x + b * y + ph).cos())
                .sum::<f64>()
    })
}

/// Smooth state with `div u = 0`, `div Fᵀ = 0`, `det F ≠ 1` in general.
fn random_smooth_state(g: &Grid2, seed: u64) -> State {
    let u = stream_velocity(&seeded_stream(g, 0.8, seed));
    let f = curl_potential_f(
        &seeded_stream(g, 0.4, seed + 1000),
        &seeded_stream(g, 0.4, seed + 2000),
    );
    State::new(0.0, u, f)
}

#[test]
fn algebraic_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(20261018);
    let mut worst_tau = 0.0f64;
    let mut worst_trace = 0.0f64;
    let mut worst_det = 0.0f64;
    let mut bound_failures = 0usize;
    for i in 0..1_000_000u32 {
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let mut f = Mat2::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
        .scale(scale);
        if i % 4 == 0 {
            // Unimodular samples.
            let d = f.det();
            if d.abs() > 1e-3 {
                f = f.scale(1.0 / d.abs().sqrt());
                if f.det() < 0.0 {
                    f = Mat2::new(f.a21, f.a22, f.a11, f.a12);
                }
            }
        }
        let tau = f * f.transpose();
        let pi = pi_decompose(&f);
        let size = tau.norm().max(f64::MIN_POSITIVE);
        worst_tau = worst_tau.max(pi.tau().max_abs_diff(&tau) / size);
        let h = hopf_traceless(&f);
        worst_trace = worst_trace.max(h.trace().abs() / size);
        let expect = tau - Mat2::IDENTITY.scale(0.5 * tau.trace());
        worst_tau = worst_tau.max(h.max_abs_diff(&expect) / size);
        worst_det = worst_det.max((pi.det_tau() - f.det() * f.det()).abs() / (size * size));
        let (lhs, rhs) = frobenius_bound(&f);
        if lhs > rhs * (1.0 + 1e-12) {
            bound_failures += 1;
        }
    }

    let g = Grid2::periodic(48).unwrap();
    let mut worst_field = 0.0f64;
    for _ in 0..100 {
        let f = MatrixField2::new(std::array::from_fn(|_| {
            random_band_limited(&g, &mut rng, 0.5)
        }));
        let s = State::new(0.0, VectorField2::zeros(&g), f);
        let tau = s.f.map(|m| m * m.transpose());
        let scale = visco_core::spectral::div_mat(&tau).l2_norm().max(1e-300);
        worst_field = worst_field.max(pi_identity_residual(&s) / scale);
    }
    let pass = worst_tau <= 1e-10
        && worst_trace <= 1e-10
        && worst_det <= 1e-10
        && worst_field <= 1e-10
        && bound_failures == 0;
    verdict(
        "algebraic_identities",
        pass,
        &format!(
            "1e6 matrices: tau/hopf rel {worst_tau:.2e}, trace rel {worst_trace:.2e}, det rel {worst_det:.2e}, \
             C=8 bound violations {bound_failures}; 100 fields: div-identity rel {worst_field:.2e} (tol 1e-10)"
        ),
    );
}

#[test]
fn fixed_point() {
    let g = Grid2::periodic(64).unwrap();
    let eq = State::equilibrium(&g);
    let mut worst = 0.0f64;
    for eta in [0.0, 0.01, 0.1] {
        for delta in [0.0, 0.01, 0.1] {
            let integ = Integrator::new(&g, ModelParams::regularized(eta, delta), 1e-2);
            let end = integ.advance(&eq, 100, |_, _| Ok(())).unwrap();
            worst = worst.max(end.max_abs_diff(&eq));
        }
    }
    verdict(
        "fixed_point",
        worst <= 1e-12,
        &format!(
            "max field change over 9 (eta, delta) pairs, 100 steps, n=64: {worst:.2e} (tol 1e-12)"
        ),
    );
}

struct EnergyRun {
    max_residual: f64,
    max_exact_residual: f64,
    max_increase: f64,
}

fn energy_run(dt: f64) -> EnergyRun {
    let g = Grid2::periodic(128).unwrap();
    let params = ModelParams::regularized(0.01, 0.01);
    let s0 = init(&InitSpec::taylor_green(1.0, 1), &g).unwrap();
    let integ = Integrator::new(&g, params, dt);
    let steps = (1.0 / dt).round() as usize;
    let mut prev = energy_report(&s0, &params);
    let mut out = EnergyRun {
        max_residual: 0.0,
        max_exact_residual: 0.0,
        max_increase: f64::NEG_INFINITY,
    };
    integ
        .advance(&s0, steps, |_, s| {
            let e = energy_report(s, &params);
            out.max_residual = out
                .max_residual
                .max(energy_balance_residual(&prev, &e, dt).abs());
            out.max_exact_residual = out
                .max_exact_residual
                .max(exact_energy_balance_residual(&prev, &e, dt).abs());
            out.max_increase = out.max_increase.max(e.total() - prev.total());
            prev = e;
            Ok(())
        })
        .unwrap();
    out
}

#[test]
fn energy_law() {
    let coarse = energy_run(1e-3);
    let fine = energy_run(5e-4);
    let order = (coarse.max_residual / fine.max_residual).log2();
    let exact_order = (coarse.max_exact_residual / fine.max_exact_residual).log2();
    let monotone = coarse.max_increase <= 0.0 && fine.max_increase <= 0.0;
    let pass = monotone && coarse.max_residual <= 1e-6 && at_least_order(&[order], 2.0);
    verdict(
        "energy_law",
        pass,
        &format!(
            "max step increase of E_delta {:.2e}/{:.2e} (dt 1e-3/5e-4); max per-step balance residual {:.3e} \
             (tol 1e-6), {:.3e} at dt/2, observed order {order:.2} (need >= 2 - {ORDER_SLACK}); \
             balance against the exact rate: {:.3e} -> {:.3e}, order {exact_order:.2}",
            coarse.max_increase,
            fine.max_increase,
            coarse.max_residual,
            fine.max_residual,
            coarse.max_exact_residual,
            fine.max_exact_residual,
        ),
    );
}

/// `(final residuals, worst slack of tr τ ≥ 2 − 10‖det F − 1‖_∞)`.
fn constraint_run(dt: f64) -> ([f64; 4], f64) {
    let g = Grid2::periodic(128).unwrap();
    let params = ModelParams::regularized(0.0, 0.01);
    let s0 = init(&InitSpec::taylor_green(1.0, 1), &g).unwrap();
    let m0 = moment(&s0.f);
    let steps = (1.0 / dt).round() as usize;
    let mut worst_slack = f64::INFINITY;
    let mut check = |s: &State| {
        let (mut tr_min, mut det_max) = (f64::INFINITY, 0.0f64);
        for p in 0..g.len() {
            let m = s.f.at(p);
            tr_min = tr_min.min(m.norm_sq());
            det_max = det_max.max((m.det() - 1.0).abs());
        }
        worst_slack = worst_slack.min(tr_min - (2.0 - 10.0 * det_max));
    };
    check(&s0);
    let end = Integrator::new(&g, params, dt)
        .advance(&s0, steps, |_, s| {
            check(s);
            Ok(())
        })
        .unwrap();
    let c = constraint_residuals(&end, &m0);
    (
        [c.res_det_linf, c.res_div_ft, c.res_piola, c.moment_drift],
        worst_slack,
    )
}

/// Round-off level below which a conserved quantity counts as exactly kept
/// (about 1e-11 relative to `‖F‖_{L²}` on the 2π box).
const ROUND_OFF_FLOOR: f64 = 1e-10;

#[test]
fn constraint_transport() {
    let runs: Vec<([f64; 4], f64)> = [2e-3, 1e-3, 5e-4]
        .iter()
        .map(|&dt| constraint_run(dt))
        .collect();
    let names = ["detF_linf", "divFT_L2", "piola", "moment_drift"];
    let mut pass = true;
    let mut parts = Vec::new();
    for (q, name) in names.iter().enumerate() {
        let vals: Vec<f64> = runs.iter().map(|r| r.0[q]).collect();
        let ord = orders(&vals);
        let at_floor = vals.iter().all(|&v| v <= ROUND_OFF_FLOOR);
        let ok = at_floor || at_least_order(&ord, 2.0);
        pass &= ok;
        parts.push(format!(
            "{name} {} orders {}{}",
            fmt_list(&vals),
            fmt_list(&ord),
            if at_floor { " (round-off floor)" } else { "" }
        ));
    }
    let slack = runs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    pass &= slack >= 0.0;
    parts.push(format!(
        "min slack of tr_tau >= 2 - 10|detF-1|: {slack:.3e}"
    ));
    verdict("constraint_transport", pass, &parts.join("; "));
}

#[test]
fn lagrangian_oracle() {
    // Prescribed linear velocities on a non-periodic patch: closed-form F.
    let g = Grid2::new(64, 4.0).unwrap();
    let c = 2.0;
    let t = 0.1;
    let omega = 1.3;
    let shear = 0.8;
    let rotation = VectorField2::from_fn(&g, |x, y| [-omega * (y - c), omega * (x - c)]);
    let shearing = VectorField2::from_fn(&g, |_, y| [shear * (y - c), 0.0]);
    let seeds = SeedGrid::patch([1.5, 1.5], 0.05, [21, 21]);
    let opts = FlowMapOptions {
        substeps: 20,
        upsample: 1,
    };
    let err_of = |u: &VectorField2, exact: Mat2| -> f64 {
        let series = vec![(0.0, u.clone()), (t, u.clone())];
        let map = flow_map_oracle(&series, 0.0, t, &seeds, opts).unwrap();
        map.jacobian
            .iter()
            .map(|j| j.max_abs_diff(&exact))
            .fold(0.0, f64::max)
    };
    let rot_err = err_of(&rotation, Mat2::rotation(omega * t));
    let shear_err = err_of(&shearing, Mat2::new(1.0, shear * t, 0.0, 1.0));

    // Periodic shear through the PDE transport: F = [[1, t U'(x₂)], [0, 1]].
    let gp = Grid2::periodic(64).unwrap();
    let u = VectorField2::from_fn(&gp, |_, y| [y.sin(), 0.0]);
    let s0 = State::new(0.0, u, MatrixField2::identity(&gp));
    let pde = Integrator::new(&gp, ModelParams::default(), 1e-3)
        .with_frozen_velocity()
        .advance(&s0, 100, |_, _| Ok(()))
        .unwrap();
    let exact = MatrixField2::from_fn(&gp, |_, y| Mat2::new(1.0, t * y.cos(), 0.0, 1.0));
    let pde_shear_err = pde.f.sub(&exact).linf_norm();

    // Taylor-Green: PDE F against the flow map of the computed velocity.
    let cfg = RunConfig {
        n: 128,
        dt: 1e-3,
        t_end: t,
        params: ModelParams::regularized(0.0, 0.0),
        init: InitSpec::taylor_green(1.0, 1),
        ..RunConfig::default()
    };
    let tg = oracle_check(
        &cfg,
        FlowMapOptions {
            substeps: 2,
            upsample: 4,
        },
    )
    .unwrap();
    let pass = rot_err <= 1e-4 && shear_err <= 1e-4 && pde_shear_err <= 1e-4 && tg.l2_error <= 1e-3;
    verdict(
        "lagrangian_oracle",
        pass,
        &format!(
            "rotation {rot_err:.2e}, shear {shear_err:.2e}, PDE shear {pde_shear_err:.2e} (tol 1e-4); \
             Taylor-Green n=128 t=0.1 L2 {:.3e} (tol 1e-3, |F|_L2 {:.3e}, Linf {:.2e})",
            tg.l2_error, tg.l2_norm, tg.linf_error
        ),
    );
}

#[test]
fn flux_identities() {
    let g = Grid2::periodic(64).unwrap();
    // The flux is built from FFᵀ, so the identity is checked with δ = 0.
    let params = ModelParams::regularized(0.02, 0.0);
    let mask = BallMask::centered(&g);
    let cuts = [CutoffFn::new(2.0), CutoffFn::new(3.0), CutoffFn::new(50.0)];
    let (mut worst_flux, mut worst_assembly, mut worst_pairing) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..10 {
        let s = random_smooth_state(&g, 100 + seed);
        worst_flux = worst_flux.max(flux_identity_residual_instant(&s, &params).1);
        let (q_proj, q_pres) = pairing_integrands(&s, &mask);
        let rel = mask.integrate_abs_pow(&q_proj.add(&q_pres), 2.0).sqrt()
            / mask.integrate_abs_pow(&q_proj, 2.0).sqrt();
        worst_assembly = worst_assembly.max(rel);
        let run = RunArtifacts {
            label: format!("seed {seed}"),
            param: 0.0,
            config: RunConfig {
                n: 64,
                ..RunConfig::default()
            },
            records: vec![],
            snapshots: vec![s],
        };
        let rep = flux_pairing(&run, &cuts, &mask, 0.0, 0.0).unwrap();
        for r in &rep.rows {
            worst_pairing = worst_pairing.max(r.identity_residual);
        }
    }
    // With F = I the flux is the velocity gradient.
    let mut s = random_smooth_state(&g, 7);
    s.f = MatrixField2::identity(&g);
    let gu = grad_vec(&s.u);
    let gap = effective_flux(&s).g.sub(&gu).linf_norm() / gu.linf_norm();
    let pass =
        worst_flux <= 1e-9 && worst_assembly <= 1e-9 && worst_pairing <= 1e-9 && gap <= 1e-13;
    verdict(
        "flux_identities",
        pass,
        &format!(
            "10 random states: flux identity rel {worst_flux:.2e}, scalar-form assembly rel {worst_assembly:.2e}, \
             pairing rel {worst_pairing:.2e} (tol 1e-9); F=I: |G - grad u|/|grad u| = {gap:.1e}"
        ),
    );
}

#[test]
fn renormalization() {
    let g = Grid2::periodic(64).unwrap();
    let params = ModelParams::regularized(0.0, 0.0);
    let s0 = init(&InitSpec::warm_start(0.6, 0.3, 11), &g).unwrap();
    let data_max = s0.f.frobenius().max();
    let k_big = 4.0 * data_max;
    let dts = [4e-3, 2e-3, 1e-3, 5e-4];
    let vals: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let s1 = Integrator::new(&g, params, dt).step(&s0).unwrap();
            renorm_residual(&s0, &s1, k_big).unwrap()
        })
        .collect();
    let ord = orders(&vals);
    // Below min |F| (≥ √2 when det F = 1) the truncation saturates everywhere.
    let s1 = Integrator::new(&g, params, 1e-3).step(&s0).unwrap();
    let k_small = 0.5 * s0.f.frobenius().min().min(s1.f.frobenius().min());
    let saturated = renorm_residual(&s0, &s1, k_small).unwrap();
    let pass = at_least_order(&ord, 2.0) && saturated == 0.0;
    verdict(
        "renormalization",
        pass,
        &format!(
            "k = {k_big:.2} (> max|F| = {data_max:.2}): residuals {} over dt {} orders {} (need >= 2 - {ORDER_SLACK}); saturated k = {k_small:.2}: {saturated:e}",
            fmt_list(&vals),
            fmt_list(&dts),
            fmt_list(&ord)
        ),
    );
}

/// `∫₀^{2π} |T_k(√2(1 + sin θ)) − T_k(√2)|³ dθ` in closed form.
fn sin_defect_period(k: f64) -> f64 {
    use std::f64::consts::{PI, SQRT_2};
    // ∫₀^θ sin³ = 2/3 − cos θ + cos³θ/3.
    let s3 = |th: f64| 2.0 / 3.0 - th.cos() + th.cos().powi(3) / 3.0;
    let crossing = |c: f64| (c / SQRT_2).min(1.0).asin();
    // ∫₀^π min(√2 sin θ, c)³ dθ
    let capped = |c: f64| {
        let th = crossing(c);
        2.0 * 2.0 * SQRT_2 * s3(th) + c.powi(3) * (PI - 2.0 * th)
    };
    // ∫₀^π max(√2 sin θ − c, 0)³ dθ
    let excess = |c: f64| {
        let th = crossing(c);
        if th >= PI / 2.0 {
            return 0.0;
        }
        let (s, co) = (th.sin(), th.cos());
        let i1 = 2.0 * co;
        let i2 = (PI - 2.0 * th) / 2.0 + s * co;
        let i3 = 2.0 * co - 2.0 * co.powi(3) / 3.0;
        2.0 * SQRT_2 * i3 - 6.0 * c * i2 + 3.0 * SQRT_2 * c * c * i1 - c.powi(3) * (PI - 2.0 * th)
    };
    let full_half = 2.0 * SQRT_2 * 4.0 / 3.0;
    if k >= SQRT_2 {
        full_half + capped(k - SQRT_2)
    } else {
        excess(SQRT_2 - k)
    }
}

fn tg_eta_sweep() -> FamilyArtifacts {
    let base = RunConfig {
        n: 64,
        dt: 2e-3,
        t_end: 0.5,
        params: ModelParams::regularized(0.1, 0.01),
        init: InitSpec::taylor_green(1.0, 1),
        snapshot_every: 25,
        diagnostics_every: 25,
        ..RunConfig::default()
    };
    run_family_in_memory(&RunFamily::new(base, Sweep::Eta(vec![0.1, 0.05, 0.025, 0.0125])).unwrap())
        .unwrap()
}

#[test]
fn oscillation_defect() {
    let g = Grid2::periodic(256).unwrap();
    let mask = BallMask::whole_box(&g);
    let k_list = [1.0, 2.0, 4.0, 8.0, 16.0];
    let (t0, t1) = (0.0, 1.0);
    let family_of = |j: f64| -> FamilyArtifacts {
        let states = |amp: f64| -> Vec<State> {
            [t0, t1]
                .iter()
                .map(|&t| {
                    let f = MatrixField2::from_fn(&g, |x, _| {
                        Mat2::IDENTITY.scale(1.0 + amp * (j * x).sin())
                    });
                    State::new(t, VectorField2::zeros(&g), f)
                })
                .collect()
        };
        let run = |label: &str, amp: f64| RunArtifacts {
            label: label.into(),
            param: amp,
            config: RunConfig {
                n: 256,
                ..RunConfig::default()
            },
            records: vec![],
            snapshots: states(amp),
        };
        FamilyArtifacts {
            sweep: "j".into(),
            runs: vec![run("oscillating", 1.0), run("weak limit", 0.0)],
            reference: 1,
            k_list: k_list.to_vec(),
            skipped: vec![],
        }
    };
    let mut worst = 0.0f64;
    let mut synthetic = Vec::new();
    for j in [4.0, 8.0, 16.0] {
        let d = osc_defect(&family_of(j), &mask, t0, t1, &k_list).unwrap();
        for (k, v) in k_list.iter().zip(&d.rows[0].defect) {
            let exact = g.area() * (t1 - t0) * sin_defect_period(*k) / (2.0 * std::f64::consts::PI);
            worst = worst.max((v - exact).abs() / exact);
        }
        synthetic.push(format!("j={j}: sup {:.4}", d.rows[0].sup));
    }

    let fam = tg_eta_sweep();
    let tg_mask = BallMask::centered(fam.reference_run().snapshots[0].grid());
    let conv = strong_conv(&fam, &tg_mask, 0.0, 0.5).unwrap();
    let def = osc_defect(&fam, &tg_mask, 0.0, 0.5, &k_list).unwrap();
    let errors: Vec<f64> = conv.rows[..3].iter().map(|r| r.l2_error).collect();
    let sups: Vec<f64> = def.trend.iter().map(|p| p[1]).collect();
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let bounded = sups.windows(2).all(|w| w[1] <= w[0]);
    let pass = worst <= 0.01 && decreasing && conv.monotone && bounded;
    verdict(
        "oscillation_defect",
        pass,
        &format!(
            "synthetic F = (1 + sin jx)I vs closed form, k in {{1,2,4,8,16}}: worst rel err {worst:.2e} (tol 1e-2), {}; \
             eta sweep 0.1..0.0125 against the {} eta={}: L2 errors {} rate {:.2}, sup_k defect {} \
             (finite sweep, no limit claimed)",
            synthetic.join(", "),
            def.reference_note,
            fam.reference_run().param,
            fmt_list(&errors),
            conv.fitted_rate.unwrap_or(f64::NAN),
            fmt_list(&sups),
        ),
    );
}

#[test]
fn integrability_norms() {
    let base = RunConfig {
        n: 64,
        // μ|k_max|²dt must stay O(1) at n = 256 for the integrating-factor
        // stages to remain stable.
        dt: 2.5e-4,
        t_end: 0.25,
        params: ModelParams::regularized(0.01, 0.01),
        init: InitSpec::taylor_green(1.0, 1),
        snapshot_every: 25,
        diagnostics_every: 250,
        ..RunConfig::default()
    };
    let fam = run_family_in_memory(&RunFamily::new(base, Sweep::Grid(vec![64, 128, 256])).unwrap())
        .unwrap();
    let norms: Vec<(f64, f64)> = fam
        .runs
        .iter()
        .map(|r| {
            let mask = BallMask::centered(r.snapshots[0].grid());
            let rep = integrability_report(&r.snapshots, &mask, 0.0, 0.25).unwrap();
            (rep.norm_f_l3, rep.norm_trtau_l32)
        })
        .collect();
    let (f0, t0) = norms[0];
    let within = |v: f64, base: f64| v <= 2.0 * base && v >= 0.5 * base;
    let pass = norms.iter().all(|&(f, t)| within(f, f0) && within(t, t0));
    let fl: Vec<f64> = norms.iter().map(|n| n.0).collect();
    let tl: Vec<f64> = norms.iter().map(|n| n.1).collect();
    verdict(
        "integrability_norms",
        pass,
        &format!(
            "n = 64/128/256, T = 0.25: |F|_L3 {} |tr tau|_L3/2 {} (within 2x of n=64)",
            fmt_list(&fl),
            fmt_list(&tl)
        ),
    );
}

#[test]
fn file_format_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let g = Grid2::periodic(32).unwrap();
    let params = ModelParams::regularized(0.03, 0.02);
    let s = random_smooth_state(&g, 5);
    let path = tmp.path().join("s.vel2");
    write_snapshot(&path, &s, &params).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let (back, p_back) = read_snapshot(&path).unwrap();
    let again = encode_snapshot(&back, &p_back);
    let (decoded, _) = decode_snapshot(&again, &path).unwrap();
    let snapshot_ok =
        bytes == again && p_back == params && back.max_abs_diff(&s) == 0.0 && decoded.t == s.t;

    let base = RunConfig {
        n: 16,
        dt: 0.01,
        t_end: 0.06,
        init: InitSpec::taylor_green(1.0, 1),
        snapshot_every: 2,
        ..RunConfig::default()
    };
    let fam_dir = tmp.path().join("family");
    run_family(
        &RunFamily::new(base, Sweep::Eta(vec![0.1, 0.05])).unwrap(),
        &fam_dir,
    )
    .unwrap();
    let analysis = AnalysisConfig::defaults(0.06, 2.0 * std::f64::consts::PI);
    let mut dirs = Vec::new();
    for name in ["first", "second"] {
        let art = FamilyArtifacts::load(&fam_dir).unwrap();
        let out = tmp.path().join(name);
        write_report(&report(&art, &analysis).unwrap(), &out).unwrap();
        dirs.push(out);
    }
    let mut files: Vec<String> = std::fs::read_dir(&dirs[0])
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    let identical = files.iter().all(|f| {
        std::fs::read(dirs[0].join(f)).unwrap() == std::fs::read(dirs[1].join(f)).unwrap()
    });
    verdict(
        "file_format_round_trip",
        snapshot_ok && identical && files.len() == 7,
        &format!(
            "snapshot write->read->encode byte-identical: {snapshot_ok}; {} report files regenerated identically: {identical}",
            files.len()
        ),
    );
}

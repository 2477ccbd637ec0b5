// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria 1–8. Each test prints one `criterion N: PASS|FAIL`
//! line and then asserts.

#![allow(clippy::too_many_arguments, clippy::needless_range_loop)]

use std::time::{Duration, Instant};

use num_complex::Complex64;
use polaron_reset_core::bath::{discretize, BathSpec, Scheme, SpectralDensityParams};
use polaron_reset_core::lqr::{
    build_system, closed_loop, evaluate_cost, optimize, relaxed_state_vector, riccati_backward,
    riccati_backward_with, steps_for,
};
use polaron_reset_core::oracle::{compare_with_tdvp, oracle_bath};
use polaron_reset_core::polaron::{
    coupled_energy, energy_gradient, excited_population, fixed_point_residual, ground_state,
    GroundStateOptions, PolaronState,
};
use polaron_reset_core::tdvp::{
    decoupling_experiment, evolve, final_displacement_integral, linear_switch_closed_form,
    EvolveOptions, ExperimentOptions, SwitchProfile, Tracking,
};
use rand::{Rng, SeedableRng};

const TF: f64 = 0.4;

fn report(n: u32, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {n}: {verdict} ({:.3} s) {detail}",
        elapsed.as_secs_f64()
    );
}

/// Adaptive Simpson on `[a, b]`, independent of the library's quadrature.
fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64 + Copy>(
        f: F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn default_bath() -> polaron_reset_core::bath::BathDiscretization {
    BathSpec::default().build().unwrap()
}

fn wq() -> f64 {
    SpectralDensityParams::default().omega_q
}

#[test]
fn criterion_1_relaxed_population() {
    let start = Instant::now();
    let p = SpectralDensityParams::default();
    let bath = default_bath();
    let state = ground_state(&bath, p.omega_q, GroundStateOptions::default()).unwrap();
    let got = excited_population(&state);
    let elapsed = start.elapsed();

    let integrand = |w: f64| {
        let j = 2.0 * p.alpha * w * (-w / p.omega_c).exp();
        j / (4.0 * (w + p.omega_q).powi(2))
    };
    let s = simpson(integrand, 0.0, 80.0 * p.omega_c, 1e-16);
    let want = 0.5 * (1.0 - (-2.0 * s).exp());
    let rel = (got - want).abs() / want;
    let pass = rel < 5e-3 && elapsed < Duration::from_secs(1);
    report(
        1,
        pass,
        elapsed,
        &format!("P+ = {got:.6e}, quadrature oracle {want:.6e}, rel {rel:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_fixed_point_consistency() {
    let start = Instant::now();
    let bath = default_bath();
    let weak = ground_state(&bath, wq(), GroundStateOptions::default()).unwrap();
    let sc = ground_state(&bath, wq(), GroundStateOptions::self_consistent()).unwrap();
    let residual = fixed_point_residual(&sc, &bath, wq());
    let rel = (sc.sum_sq() - weak.sum_sq()).abs() / weak.sum_sq();
    let elapsed = start.elapsed();
    let pass = residual <= 1e-12 && rel < 1e-2 && elapsed < Duration::from_secs(1);
    report(
        2,
        pass,
        elapsed,
        &format!("residual {residual:.2e}, relative shift of sum |f|^2 {rel:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_3_smooth_switch_improvement() {
    let start = Instant::now();
    let bath = default_bath();
    let lambdas = [1.0, 1.5, 2.0, 2.5];
    let profiles: Vec<_> = lambdas
        .iter()
        .map(|&l| SwitchProfile::rational(l, TF).unwrap())
        .collect();
    let runs = decoupling_experiment(&bath, wq(), &profiles, &ExperimentOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let p: Vec<f64> = runs.iter().map(|r| r.final_population).collect();
    let relaxed = runs[0].initial_population;
    let factor = relaxed / p[0];
    let ordered = p[2] < p[1] && p[1] < p[0] && p[2] < p[3];
    let pass = (30.0..=300.0).contains(&factor)
        && (1e-7..=1e-6).contains(&p[2])
        && ordered
        && elapsed < Duration::from_secs(10 * lambdas.len() as u64);
    report(
        3,
        pass,
        elapsed,
        &format!(
            "reduction at lambda=1 {factor:.1}x; P+(1, 1.5, 2, 2.5) = {:.3e}, {:.3e}, {:.3e}, {:.3e}",
            p[0], p[1], p[2], p[3]
        ),
    );
    assert!(pass);
}

fn coarse_bath() -> polaron_reset_core::bath::BathDiscretization {
    let spec = BathSpec {
        n_modes: 150,
        ..BathSpec::default()
    };
    spec.build().unwrap()
}

#[test]
fn criterion_4_lqr_headline() {
    let start = Instant::now();
    let bath = coarse_bath();
    let dt = 1e-3;
    let sols: Vec<_> = [1e-7, 1e-9, 1e-11]
        .iter()
        .map(|&r| optimize(&bath, wq(), dt, TF, r).unwrap())
        .collect();
    let elapsed = start.elapsed();
    let p: Vec<f64> = sols.iter().map(|s| s.final_population()).collect();
    let crossings = sols[0].zero_crossings();
    let pass = p[0] > 2e-7
        && p[0] < 5e-6
        && p[1] < p[0]
        && p[2] < p[1]
        && crossings >= 1
        && elapsed < Duration::from_secs(300);
    report(
        4,
        pass,
        elapsed,
        &format!(
            "P+(R=1e-7, 1e-9, 1e-11) = {:.3e}, {:.3e}, {:.3e}; zero crossings at R=1e-7: {crossings}",
            p[0], p[1], p[2]
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_lqr_optimality() {
    let start = Instant::now();
    let bath = coarse_bath();
    let dt = 1e-3;
    let r = 1e-7;
    let system = build_system(&bath, wq(), dt).unwrap();
    let n = steps_for(TF, dt).unwrap();
    let x0 = relaxed_state_vector(&bath, wq());
    let gains = riccati_backward(&system, r, n).unwrap();
    let sol = closed_loop(&system, &gains, &x0).unwrap();
    let optimal = evaluate_cost(&system, &x0, &sol.controls, r).unwrap().total();

    let smooth = SwitchProfile::rational(2.0, TF).unwrap();
    let switch: Vec<f64> = (0..n)
        .map(|t| smooth.value((t as f64 + 0.5) * dt).unwrap())
        .collect();
    let switch_cost = evaluate_cost(&system, &x0, &switch, r).unwrap().total();

    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let mut worst = f64::INFINITY;
    for trial in 0..40 {
        let mut du: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = du.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = 1e-3 * 0.5f64.powi(trial % 8) / norm;
        du.iter_mut().for_each(|v| *v *= scale);
        let u: Vec<f64> = sol.controls.iter().zip(&du).map(|(a, b)| a + b).collect();
        let j = evaluate_cost(&system, &x0, &u, r).unwrap().total();
        worst = worst.min(j - optimal);
    }
    let elapsed = start.elapsed();
    let pass = optimal <= switch_cost && worst >= -1e-12 && elapsed < Duration::from_secs(60);
    report(
        5,
        pass,
        elapsed,
        &format!(
            "J_lqr {optimal:.6e} <= J_switch {switch_cost:.6e}; smallest perturbed change {worst:.3e}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_analytic_cross_checks() {
    let start = Instant::now();
    let spec = BathSpec {
        n_modes: 200,
        ..BathSpec::default()
    };
    let bath = spec.build().unwrap();
    let initial = PolaronState::relaxed(&bath, wq());
    let opts = EvolveOptions {
        tracking: Tracking::None,
        ..EvolveOptions::default()
    };
    let mut integral_err: f64 = 0.0;
    for lambda in [1.0, 2.0] {
        let profile = SwitchProfile::rational(lambda, TF).unwrap();
        let rec = evolve(&initial, &bath, wq(), &profile, &opts).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for (m, f) in bath.modes().iter().zip(rec.final_state.displacements()) {
            let want = final_displacement_integral(*m, wq(), &profile).unwrap();
            num += (f - want).norm_sqr();
            den += want.norm_sqr();
        }
        integral_err = integral_err.max((num / den).sqrt());
    }

    let ramp = SwitchProfile::linear(TF).unwrap();
    let rec = evolve(&initial, &bath, wq(), &ramp, &opts).unwrap();
    let mut closed_err: f64 = 0.0;
    for (m, f) in bath.modes().iter().zip(rec.final_state.displacements()) {
        let w = m.omega + wq();
        let f0 = m.equilibrium(wq()).abs();
        let modulus = f0 * (2.0 * (0.5 * w * TF).sin() / (w * TF)).abs();
        let via_fn = linear_switch_closed_form(*m, wq(), TF).norm();
        closed_err = closed_err
            .max((f.norm() - modulus).abs() / modulus)
            .max((via_fn - modulus).abs() / modulus);
    }
    let elapsed = start.elapsed();
    let pass = integral_err < 1e-6 && closed_err < 1e-10 && elapsed < Duration::from_secs(1);
    report(
        6,
        pass,
        elapsed,
        &format!("endpoint vs integral rel {integral_err:.2e}; linear closed form rel {closed_err:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_oracle_validation() {
    let start = Instant::now();
    let p = SpectralDensityParams::default();
    let profile = SwitchProfile::rational(2.0, TF).unwrap();
    let mut discrepancies = Vec::new();
    let mut valid = true;
    for scale in [1.0, 0.5, 0.25] {
        let bath = oracle_bath(p.omega_c, p.omega_q, 3, 1e-3 * scale * scale).unwrap();
        let cmp = compare_with_tdvp(&bath, p.omega_q, &profile, 6, 2.5e-4).unwrap();
        valid &= cmp.valid;
        discrepancies.push(cmp.relative_discrepancy);
    }
    let elapsed = start.elapsed();
    let pass = valid
        && discrepancies[0] < 0.2
        && discrepancies[1] < discrepancies[0]
        && discrepancies[2] < discrepancies[1]
        && elapsed < Duration::from_secs(60);
    report(
        7,
        pass,
        elapsed,
        &format!(
            "relative discrepancy at g, g/2, g/4: {:.3e}, {:.3e}, {:.3e}",
            discrepancies[0], discrepancies[1], discrepancies[2]
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_numerical_hygiene() {
    let start = Instant::now();
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);

    // Energy gradient against central differences.
    let bath = discretize(&SpectralDensityParams::default(), 64, 10.0 * wq(), Scheme::GaussLegendre).unwrap();
    let relaxed = PolaronState::relaxed(&bath, wq());
    let f: Vec<Complex64> = relaxed
        .displacements()
        .iter()
        .map(|f| f * rng.random_range(0.5..1.5) + Complex64::new(0.0, rng.random_range(-0.01..0.01)))
        .collect();
    let state = PolaronState::new(&bath, f.clone()).unwrap();
    let grad = energy_gradient(&state, &bath, wq(), 0.7).unwrap();
    let mut grad_err: f64 = 0.0;
    let h = 1e-6;
    for k in 0..bath.len() {
        for part in 0..2 {
            let shifted = |d: f64| {
                let mut g = f.clone();
                g[k] += if part == 0 { Complex64::new(d, 0.0) } else { Complex64::new(0.0, d) };
                let s = PolaronState::new(&bath, g).unwrap();
                coupled_energy(&s, &bath, wq(), 0.7).unwrap()
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            let scale = grad[k][part].abs().max(1e-3);
            grad_err = grad_err.max((fd - grad[k][part]).abs() / scale);
        }
    }

    // Riccati PSD probes on every stored P_t.
    let coarse = coarse_bath();
    let system = build_system(&coarse, wq(), 1e-3).unwrap();
    let mut min_form = f64::INFINITY;
    let probes: Vec<Vec<f64>> = (0..12)
        .map(|_| (0..system.dim()).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    riccati_backward_with(&system, 1e-7, 400, |_, p| {
        for x in &probes {
            min_form = min_form.min(p.quadratic_form(x));
        }
    })
    .unwrap();

    // Norm conservation per step without coupling.
    let big = default_bath();
    let init = PolaronState::relaxed(&big, wq());
    let off = SwitchProfile::constant(0.0, TF).unwrap();
    let rec = evolve(
        &init,
        &big,
        wq(),
        &off,
        &EvolveOptions {
            tracking: Tracking::None,
            ..EvolveOptions::default()
        },
    )
    .unwrap();
    let p0 = rec.populations[0];
    let norm_err = rec
        .populations
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / p0)
        .fold(0.0, f64::max);

    // Step-size convergence of the headline switch.
    let smooth = SwitchProfile::rational(2.0, TF).unwrap();
    let run = |dt: f64| {
        let opts = EvolveOptions {
            dt,
            tracking: Tracking::None,
            ..EvolveOptions::default()
        };
        evolve(&init, &big, wq(), &smooth, &opts).unwrap().final_population()
    };
    let coarse_p = run(1e-3);
    let fine_p = run(5e-4);
    let halving = (coarse_p - fine_p).abs() / fine_p;
    let elapsed = start.elapsed();

    let pass = grad_err < 1e-6 && min_form >= -1e-10 && norm_err < 1e-12 && halving < 1e-3;
    report(
        8,
        pass,
        elapsed,
        &format!(
            "gradient rel {grad_err:.2e}; min probe form {min_form:.3e}; per-step norm drift {norm_err:.2e}; dt-halving change {halving:.2e}"
        ),
    );
    assert!(pass);
}

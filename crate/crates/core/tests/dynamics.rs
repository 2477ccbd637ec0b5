// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use polaron_reset_core::bath::{BathDiscretization, BathSpec, Mode, SpectralDensityParams};
use polaron_reset_core::polaron::{ground_state, GroundStateOptions, PolaronState};
use polaron_reset_core::tdvp::{
    asymptotic_final_displacement, evolve, final_displacement_integral, linear_switch_closed_form,
    run_decoupling, EvolveOptions, ExperimentOptions, SwitchProfile, Tracking,
};
use polaron_reset_core::Error;

const TF: f64 = 0.4;

fn wq() -> f64 {
    SpectralDensityParams::default().omega_q
}

fn bath(n: usize) -> BathDiscretization {
    BathSpec {
        n_modes: n,
        ..BathSpec::default()
    }
    .build()
    .unwrap()
}

fn quiet(dt: f64, full_nonlinear: bool) -> EvolveOptions {
    EvolveOptions {
        dt,
        full_nonlinear,
        tracking: Tracking::None,
        record_energy: false,
    }
}

#[test]
fn free_rotation_conserves_every_modulus() {
    let b = bath(300);
    let init = PolaronState::relaxed(&b, wq());
    let off = SwitchProfile::constant(0.0, TF).unwrap();
    let rec = evolve(&init, &b, wq(), &off, &EvolveOptions::default()).unwrap();
    for (a, z) in init.displacements().iter().zip(rec.final_state.displacements()) {
        assert!((a.norm() - z.norm()).abs() <= 1e-12 * a.norm());
    }
    for w in rec.populations.windows(2) {
        assert!((w[1] - w[0]).abs() <= 1e-12 * w[0]);
    }
}

#[test]
fn linear_equations_are_linear() {
    let b = bath(120);
    let init = PolaronState::relaxed(&b, wq());
    let profile = SwitchProfile::rational(2.0, TF).unwrap();
    let scaled_bath = b.scaled(2.0).unwrap();
    let scaled_init = PolaronState::relaxed(&scaled_bath, wq());
    let one = evolve(&init, &b, wq(), &profile, &quiet(1e-3, false)).unwrap();
    let two = evolve(&scaled_init, &scaled_bath, wq(), &profile, &quiet(1e-3, false)).unwrap();
    for (x, y) in one
        .final_state
        .displacements()
        .iter()
        .zip(two.final_state.displacements())
    {
        assert!((x * 2.0 - y).norm() <= 1e-13 * y.norm().max(1e-12));
    }
}

#[test]
fn endpoint_matches_integral_for_lambda_family() {
    let b = bath(200);
    let init = PolaronState::relaxed(&b, wq());
    for lambda in [1.0, 1.5, 2.0, 2.5, 3.0] {
        let profile = SwitchProfile::rational(lambda, TF).unwrap();
        let rec = evolve(&init, &b, wq(), &profile, &quiet(1e-3, false)).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for (m, f) in b.modes().iter().zip(rec.final_state.displacements()) {
            let want = final_displacement_integral(*m, wq(), &profile).unwrap();
            num += (f - want).norm_sqr();
            den += want.norm_sqr();
        }
        assert!((num / den).sqrt() < 1e-6, "lambda={lambda}");
    }
}

#[test]
fn linear_ramp_closed_form() {
    let m = Mode::new(20.0, 3.0);
    let ramp = SwitchProfile::linear(TF).unwrap();
    let direct = final_displacement_integral(m, wq(), &ramp).unwrap();
    let closed = linear_switch_closed_form(m, wq(), TF);
    assert!((direct - closed).norm() < 1e-12 * closed.norm());
    let series = asymptotic_final_displacement(m, wq(), &ramp, 1).unwrap();
    assert!((series - closed).norm() < 1e-12 * closed.norm());
}

#[test]
fn asymptotic_series_for_lambda_two() {
    let profile = SwitchProfile::rational(2.0, TF).unwrap();
    // Leading term vanishes at j = 1.
    let m = Mode::new(50.0, 1.0);
    let j1 = asymptotic_final_displacement(m, wq(), &profile, 1).unwrap();
    assert_eq!(j1, Complex64::new(0.0, 0.0));
    // Truncation error of the j ≤ J partial sum scales as (ω′t_f)^{−(J+1)}.
    for w in [200.0, 400.0, 800.0, 1600.0, 3200.0] {
        let m = Mode::new(w, 1.0);
        let x = (w + wq()) * TF;
        let f0 = m.equilibrium(wq()).abs();
        let exact = final_displacement_integral(m, wq(), &profile).unwrap();
        for (j, c) in [(2, 30.0), (3, 150.0)] {
            let approx = asymptotic_final_displacement(m, wq(), &profile, j).unwrap();
            let scaled = (exact - approx).norm() / f0 * x.powi(j as i32 + 1);
            assert!(scaled < c, "w={w} j={j}: {scaled}");
        }
    }
}

#[test]
fn non_integer_lambda_has_no_expansion() {
    let profile = SwitchProfile::rational(1.5, TF).unwrap();
    let m = Mode::new(50.0, 1.0);
    assert!(matches!(
        asymptotic_final_displacement(m, wq(), &profile, 2),
        Err(Error::UnsupportedProfile { .. })
    ));
}

#[test]
fn final_integral_requires_decoupling() {
    let held = SwitchProfile::constant(1.0, TF).unwrap();
    assert!(matches!(
        final_displacement_integral(Mode::new(1.0, 1.0), wq(), &held),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn step_halving_is_converged() {
    let b = bath(400);
    let init = PolaronState::relaxed(&b, wq());
    for lambda in [1.0, 2.0, 2.5] {
        let p = SwitchProfile::rational(lambda, TF).unwrap();
        let a = evolve(&init, &b, wq(), &p, &quiet(1e-3, false)).unwrap().final_population();
        let c = evolve(&init, &b, wq(), &p, &quiet(5e-4, false)).unwrap().final_population();
        assert!((a - c).abs() / c < 1e-3, "lambda={lambda}");
    }
}

#[test]
fn full_equations_stay_close_to_linear() {
    let b = bath(300);
    let p = SwitchProfile::rational(2.0, TF).unwrap();
    let lin = run_decoupling(&b, wq(), &p, &ExperimentOptions::default()).unwrap();
    let full = run_decoupling(
        &b,
        wq(),
        &p,
        &ExperimentOptions {
            full_nonlinear: true,
            ..ExperimentOptions::default()
        },
    )
    .unwrap();
    let rel = (lin.final_population - full.final_population).abs() / lin.final_population;
    assert!(rel < 0.05, "{rel}");
}

#[test]
fn self_consistent_state_is_stationary_under_full_equations() {
    let b = bath(200);
    let sc = ground_state(&b, wq(), GroundStateOptions::self_consistent()).unwrap();
    let on = SwitchProfile::constant(1.0, TF).unwrap();
    let rec = evolve(&sc, &b, wq(), &on, &quiet(1e-3, true)).unwrap();
    let p0 = rec.populations[0];
    assert!(rec.populations.iter().all(|p| (p - p0).abs() < 1e-10 * p0));
}

#[test]
fn slower_switch_is_more_adiabatic() {
    let b = bath(600);
    let opts = ExperimentOptions::default();
    let fast = run_decoupling(&b, wq(), &SwitchProfile::rational(2.0, 0.4).unwrap(), &opts).unwrap();
    let slow = run_decoupling(&b, wq(), &SwitchProfile::rational(2.0, 4.0).unwrap(), &opts).unwrap();
    assert!(slow.final_population < fast.final_population);
}

#[test]
fn tabulated_replay_matches_analytic_profile() {
    let b = bath(150);
    let init = PolaronState::relaxed(&b, wq());
    let analytic = SwitchProfile::linear(TF).unwrap();
    let table = SwitchProfile::tabulated(&[(0.0, 1.0), (TF, 0.0)]).unwrap();
    let a = evolve(&init, &b, wq(), &analytic, &quiet(1e-3, false)).unwrap();
    let t = evolve(&init, &b, wq(), &table, &quiet(1e-3, false)).unwrap();
    assert!((a.final_population() - t.final_population()).abs() < 1e-12 * a.final_population());
}

#[test]
fn energy_is_recorded_and_conserved_when_coupling_is_fixed() {
    let b = bath(100);
    let sc = ground_state(&b, wq(), GroundStateOptions::self_consistent()).unwrap();
    let on = SwitchProfile::constant(1.0, 0.1).unwrap();
    let rec = evolve(
        &sc,
        &b,
        wq(),
        &on,
        &EvolveOptions {
            full_nonlinear: true,
            record_energy: true,
            ..EvolveOptions::default()
        },
    )
    .unwrap();
    let e = rec.energies.unwrap();
    assert!(e.iter().all(|x| (x - e[0]).abs() < 1e-10 * e[0].abs()));
    assert_eq!(rec.snapshots.len(), rec.times.len());
}

#[test]
fn mismatched_bath_is_rejected() {
    let a = bath(50);
    let c = bath(60);
    let init = PolaronState::relaxed(&a, wq());
    let p = SwitchProfile::linear(TF).unwrap();
    assert!(evolve(&init, &c, wq(), &p, &EvolveOptions::default()).is_err());
}

#[test]
fn leading_term_magnitude_at_moderate_frequency() {
    let profile = SwitchProfile::rational(2.0, TF).unwrap();
    // ω′t_f = 40.
    let m = Mode::new(100.0 - wq(), 1.0);
    let exact = final_displacement_integral(m, wq(), &profile).unwrap().norm();
    let approx = asymptotic_final_displacement(m, wq(), &profile, 2).unwrap().norm();
    assert!(approx / exact < 2.0 && exact / approx < 2.0, "{approx} vs {exact}");
}

#[test]
fn smooth_switch_suppresses_fast_modes_faster_than_the_ramp() {
    let profile = SwitchProfile::rational(2.0, TF).unwrap();
    for w in [500.0, 2000.0, 8000.0] {
        let m = Mode::new(w, 1.0);
        let x = (w + wq()) * TF;
        let ratio = final_displacement_integral(m, wq(), &profile).unwrap().norm()
            / m.equilibrium(wq()).abs();
        assert!(ratio * x < 10.0 / x, "w={w}: {}", ratio * x);
    }
}

#[test]
fn single_probe_mode_endpoint() {
    let p = SpectralDensityParams::default();
    let m = Mode::new(p.omega_c / 2.0, 1.0);
    let b = BathDiscretization::from_modes(vec![m]).unwrap();
    let profile = SwitchProfile::rational(2.0, TF).unwrap();
    let rec = evolve(&PolaronState::relaxed(&b, wq()), &b, wq(), &profile, &quiet(1e-3, false)).unwrap();
    let want = final_displacement_integral(m, wq(), &profile).unwrap();
    let got = rec.final_state.displacements()[0];
    assert!((got - want).norm() < 1e-6 * want.norm());
}

// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form final displacements for full decoupling.
//!
//! Starting from the relaxed state `f(0) = f₀u(0)` the deviation
//! `d = f − f₀u` obeys `ḋ = iω′d − f₀u̇`, hence with `u(t_f) = 0`
//!
//! ```text
//! f(t_f) = −f₀ ∫₀^{t_f} e^{iω′(t_f − t)} u̇(t) dt.
//! ```
//!
//! Repeated integration by parts for a symmetric switch
//! (`u(t) = 1 − u(t_f − t)`, so `u^{(j)}(t_f) = (−1)^{j+1} u^{(j)}(0)`) gives
//!
//! ```text
//! f(t_f) ≈ f₀ Σ_{j≥1} u^{(j)}(0) · (−(−1)^j − e^{iω′t_f}) / (iω′)^j.
//! ```
//!
//! For odd `j` the bracket is `1 − e^{iω′t_f}`; for the linear ramp the
//! series terminates at `j = 1` and reproduces the exact result
//! `f₀ (e^{iω′t_f} − 1)/(iω′t_f)`.

use num_complex::Complex64;

use crate::bath::Mode;
use crate::quadrature::{adaptive_gauss_kronrod, Tolerance};
use crate::tdvp::profile::{Interpolation, ProfileKind, SwitchProfile};
use crate::{Error, Result};

fn phase(x: f64) -> Complex64 {
    Complex64::new(crate::math::cos(x), crate::math::sin(x))
}

/// `f_k(t_f)` for a run that starts relaxed and ends decoupled.
///
/// Analytic profiles are integrated by adaptive Gauss–Kronrod quadrature of
/// `u̇`; tabulated profiles are summed exactly over their increments.
pub fn final_displacement_integral(
    mode: Mode,
    omega_q: f64,
    profile: &SwitchProfile,
) -> Result<Complex64> {
    if !profile.ends_decoupled() {
        return Err(Error::Precondition(alloc::format!(
            "u(t_f) = {} but the closed form needs full decoupling",
            profile.value_unchecked(profile.duration())
        )));
    }
    let w = mode.renormalized(omega_q);
    let f0 = mode.equilibrium(omega_q);
    let tf = profile.duration();
    let integral = match profile.kind() {
        ProfileKind::Tabulated {
            times,
            values,
            interpolation: Interpolation::Linear,
        } => {
            // u̇ is constant on each interval.
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..times.len() - 1 {
                let slope = (values[i + 1] - values[i]) / (times[i + 1] - times[i]);
                let seg = (phase(w * (tf - times[i])) - phase(w * (tf - times[i + 1])))
                    / Complex64::new(0.0, w);
                acc += seg * slope;
            }
            acc
        }
        ProfileKind::Tabulated {
            times,
            values,
            interpolation: Interpolation::Hold,
        } => {
            // u̇ is a train of jumps at the sample times.
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 1..times.len() {
                acc += phase(w * (tf - times[i])) * (values[i] - values[i - 1]);
            }
            acc
        }
        _ => {
            // ∫|u̇| = 1 for a monotone switch, so the absolute floor is a
            // relative one.
            let q = adaptive_gauss_kronrod(
                |t| {
                    let du = profile.derivative(t).unwrap_or(0.0);
                    phase(w * (tf - t)) * du
                },
                0.0,
                tf,
                Tolerance {
                    abs: 1e-14,
                    rel: 1e-13,
                    max_intervals: 20_000,
                },
            )?;
            q.value
        }
    };
    Ok(-integral * f0)
}

/// Partial sum of the integration-by-parts expansion up to `j_max`.
///
/// `u^{(j)}(0) = 0` for `j < λ`, so for `λ = 2` the `j = 1` partial sum is
/// zero. Only symmetric switches with integer-order derivatives at the
/// origin (linear and integer `λ`) are supported.
pub fn asymptotic_final_displacement(
    mode: Mode,
    omega_q: f64,
    profile: &SwitchProfile,
    j_max: usize,
) -> Result<Complex64> {
    if j_max == 0 {
        return Err(crate::error::config("j_max must be at least 1"));
    }
    let derivs = profile.start_derivatives(j_max)?;
    let w = mode.renormalized(omega_q);
    let f0 = mode.equilibrium(omega_q);
    let end = phase(w * profile.duration());
    let iw = Complex64::new(0.0, w);
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, d) in (1..=j_max).zip(derivs) {
        power *= iw;
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        sum += (Complex64::new(sign, 0.0) - end) / power * d;
    }
    Ok(sum * f0)
}

/// Exact final displacement of the linear ramp, `f₀ (e^{iω′t_f} − 1)/(iω′t_f)`.
///
/// Its modulus is `|f₀|·|2 sin(ω′t_f/2)/(ω′t_f)|`.
pub fn linear_switch_closed_form(mode: Mode, omega_q: f64, duration: f64) -> Complex64 {
    let w = mode.renormalized(omega_q);
    let x = w * duration;
    // e^{ix} − 1 = 2i sin(x/2) e^{ix/2}, avoiding cancellation for small x.
    let num = Complex64::new(0.0, 2.0 * crate::math::sin(0.5 * x)) * phase(0.5 * x);
    num / Complex64::new(0.0, x) * mode.equilibrium(omega_q)
}

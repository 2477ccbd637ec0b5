// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! One-step rules for the displacement equations of motion.
//!
//! Linear mode solves `ḟ = iω′f + (i/2)g·u(t)` per step as
//! `f ← e^{iω′h} f + (i g/2) ∫₀^h e^{iω′(h−s)} u(t₀+s) ds`. The forcing
//! integral is evaluated by product integration: `u` is replaced by its cubic
//! interpolant through four interior Gauss nodes, and the kernel moments are
//! integrated to round-off. The rule is exact for constant and linear `u` and
//! for held schedules aligned with the step grid.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bath::BathDiscretization;
use crate::math::{ceil, cos, sin};
use crate::quadrature::GaussLegendre;
use crate::tdvp::profile::SwitchProfile;

const NODES: usize = 4;

/// Precomputed per-mode propagators for a fixed step length.
pub(crate) struct LinearStep {
    rotation: Vec<Complex64>,
    weights: Vec<[Complex64; NODES]>,
    fractions: [f64; NODES],
}

impl LinearStep {
    pub(crate) fn new(bath: &BathDiscretization, omega_q: f64, h: f64) -> Self {
        let interp = GaussLegendre::new(NODES);
        let mut fractions = [0.0; NODES];
        for (f, &x) in fractions.iter_mut().zip(interp.nodes()) {
            *f = 0.5 * (1.0 + x);
        }
        let fine = GaussLegendre::new(16);
        let mut rotation = Vec::with_capacity(bath.len());
        let mut weights = Vec::with_capacity(bath.len());
        for m in bath.modes() {
            let w = m.renormalized(omega_q);
            rotation.push(Complex64::new(cos(w * h), sin(w * h)));
            let moments = kernel_moments(w, h, &fractions, &fine);
            let pre = Complex64::new(0.0, 0.5 * m.coupling);
            weights.push(moments.map(|c| pre * c));
        }
        Self {
            rotation,
            weights,
            fractions,
        }
    }

    /// Advances `f` over `[t0, t0 + h]`.
    pub(crate) fn advance(&self, f: &mut [Complex64], profile: &SwitchProfile, t0: f64, h: f64) {
        let mut u = [0.0; NODES];
        for (u, &s) in u.iter_mut().zip(&self.fractions) {
            *u = profile.sample_in_step(t0, h, s);
        }
        for ((fk, rot), w) in f.iter_mut().zip(&self.rotation).zip(&self.weights) {
            let mut drive = Complex64::new(0.0, 0.0);
            for j in 0..NODES {
                drive += w[j] * u[j];
            }
            *fk = rot * *fk + drive;
        }
    }
}

/// `∫₀^h e^{iω(h−s)} L_j(s) ds` for the Lagrange basis on the given nodes.
fn kernel_moments(
    omega: f64,
    h: f64,
    fractions: &[f64; NODES],
    fine: &GaussLegendre,
) -> [Complex64; NODES] {
    let nodes = fractions.map(|f| f * h);
    let panels = ceil(omega.abs() * h).max(1.0) as usize;
    let width = h / panels as f64;
    let mut out = [Complex64::new(0.0, 0.0); NODES];
    for p in 0..panels {
        let a = p as f64 * width;
        for (s, w) in fine.mapped(a, a + width) {
            let phase = omega * (h - s);
            let kernel = Complex64::new(cos(phase), sin(phase)) * w;
            for j in 0..NODES {
                let mut l = 1.0;
                for m in 0..NODES {
                    if m != j {
                        l *= (s - nodes[m]) / (nodes[j] - nodes[m]);
                    }
                }
                out[j] += kernel * l;
            }
        }
    }
    out
}

/// Right-hand side of the full equations,
/// `ḟ_k = i f_k (ω_q e^{−2Σ|f|²} + ω_k) + (i/2) g_k u`.
pub(crate) fn nonlinear_rhs(
    bath: &BathDiscretization,
    omega_q: f64,
    f: &[Complex64],
    u: f64,
    out: &mut [Complex64],
) {
    let s: f64 = f.iter().map(|x| x.norm_sqr()).sum();
    let dressed = omega_q * crate::math::exp(-2.0 * s);
    for ((o, fk), m) in out.iter_mut().zip(f).zip(bath.modes()) {
        *o = Complex64::new(0.0, 1.0) * (fk * (dressed + m.omega) + 0.5 * m.coupling * u);
    }
}

/// Classical fourth-order Runge–Kutta workspace for the nonlinear equations.
pub(crate) struct Rk4 {
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub(crate) fn new(n: usize) -> Self {
        let z = alloc::vec![Complex64::new(0.0, 0.0); n];
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    pub(crate) fn advance(
        &mut self,
        bath: &BathDiscretization,
        omega_q: f64,
        f: &mut [Complex64],
        profile: &SwitchProfile,
        t0: f64,
        h: f64,
    ) {
        let u0 = profile.sample_in_step(t0, h, 0.0);
        let um = profile.sample_in_step(t0, h, 0.5);
        let u1 = profile.sample_in_step(t0, h, 1.0);
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;

        nonlinear_rhs(bath, omega_q, f, u0, k1);
        for i in 0..f.len() {
            tmp[i] = f[i] + k1[i] * (0.5 * h);
        }
        nonlinear_rhs(bath, omega_q, tmp, um, k2);
        for i in 0..f.len() {
            tmp[i] = f[i] + k2[i] * (0.5 * h);
        }
        nonlinear_rhs(bath, omega_q, tmp, um, k3);
        for i in 0..f.len() {
            tmp[i] = f[i] + k3[i] * h;
        }
        nonlinear_rhs(bath, omega_q, tmp, u1, k4);
        for i in 0..f.len() {
            f[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
}

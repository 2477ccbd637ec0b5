// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Optimal decoupling by the discrete-time linear-quadratic regulator.
//!
//! With `u` held constant over a step of length `δt`, the weak-coupling
//! displacement equations discretize exactly to
//! `f_{k,t+1} = e^{iω′_k δt} f_{k,t} + u_t g_k (e^{iω′_k δt} − 1)/(2ω′_k)`.
//! In real coordinates `x = (f′₁, f″₁, f′₂, f″₂, …)` this is
//! `x_{t+1} = A x_t + B u_t` with `A` block-diagonal (one rotation per mode).
//!
//! The cost is `J = |x_{t_f}|² + R Σ_t u_t²`, i.e. `Q_{t_f} = I`, `Q = 0`,
//! `N = 0`, and `R` is the per-step weight. The optimal control is the state
//! feedback `u_t = −F_t x_t` with gains from the backward Riccati recursion.

use alloc::format;
use alloc::vec::Vec;

use crate::bath::BathDiscretization;
use crate::error::config;
use crate::math::{cos, round, sin};
use crate::polaron::{population_from_sum, PolaronState};
use crate::tdvp::{evolve, EvolveOptions, SwitchProfile, Tracking};
use crate::{Error, Result};

/// Discrete affine dynamics `x_{t+1} = A x_t + B u_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSystem {
    /// `(cos θ_k, sin θ_k)` with `θ_k = ω′_k δt`.
    rotations: Vec<(f64, f64)>,
    b: Vec<f64>,
    dt: f64,
}

impl AffineSystem {
    /// State dimension `2N`.
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn n_modes(&self) -> usize {
        self.rotations.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn rotations(&self) -> &[(f64, f64)] {
        &self.rotations
    }

    /// `A x`, block by block.
    pub fn apply_a(&self, x: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; x.len()];
        for (k, &(c, s)) in self.rotations.iter().enumerate() {
            let (re, im) = (x[2 * k], x[2 * k + 1]);
            out[2 * k] = c * re - s * im;
            out[2 * k + 1] = s * re + c * im;
        }
        out
    }

    /// `Aᵀ x`.
    pub fn apply_a_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; x.len()];
        for (k, &(c, s)) in self.rotations.iter().enumerate() {
            let (re, im) = (x[2 * k], x[2 * k + 1]);
            out[2 * k] = c * re + s * im;
            out[2 * k + 1] = -s * re + c * im;
        }
        out
    }

    /// One step `A x + B u`.
    pub fn step(&self, x: &[f64], u: f64) -> Vec<f64> {
        let mut out = self.apply_a(x);
        for (o, b) in out.iter_mut().zip(&self.b) {
            *o += b * u;
        }
        out
    }

    /// Dense row-major `A`.
    pub fn dense_a(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = alloc::vec![0.0; n * n];
        for (k, &(c, s)) in self.rotations.iter().enumerate() {
            let r = 2 * k;
            a[r * n + r] = c;
            a[r * n + r + 1] = -s;
            a[(r + 1) * n + r] = s;
            a[(r + 1) * n + r + 1] = c;
        }
        a
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: len,
            });
        }
        Ok(())
    }
}

/// Exact zero-order-hold discretization of the weak-coupling equations.
pub fn build_system(bath: &BathDiscretization, omega_q: f64, dt: f64) -> Result<AffineSystem> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(config(format!("dt must be > 0, got {dt}")));
    }
    let mut rotations = Vec::with_capacity(bath.len());
    let mut b = Vec::with_capacity(2 * bath.len());
    for m in bath.modes() {
        let w = m.renormalized(omega_q);
        let theta = w * dt;
        let (c, s) = (cos(theta), sin(theta));
        let half = sin(0.5 * theta);
        let scale = m.coupling / (2.0 * w);
        rotations.push((c, s));
        // cos θ − 1 = −2 sin²(θ/2)
        b.push(scale * (-2.0 * half * half));
        b.push(scale * s);
    }
    Ok(AffineSystem { rotations, b, dt })
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = alloc::vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `xᵀ P x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `Aᵀ P A` for the block-rotation `A`, in O(n²).
    fn congruence(&self, sys: &AffineSystem) -> Self {
        let n = self.n;
        let mut tmp = self.data.clone();
        // tmp = P A: mix column pairs.
        for row in tmp.chunks_exact_mut(n) {
            for (k, &(c, s)) in sys.rotations.iter().enumerate() {
                let (p0, p1) = (row[2 * k], row[2 * k + 1]);
                row[2 * k] = p0 * c + p1 * s;
                row[2 * k + 1] = -p0 * s + p1 * c;
            }
        }
        // out = Aᵀ tmp: mix row pairs.
        for (k, &(c, s)) in sys.rotations.iter().enumerate() {
            let (r0, r1) = tmp.split_at_mut((2 * k + 1) * n);
            let r0 = &mut r0[2 * k * n..];
            let r1 = &mut r1[..n];
            for j in 0..n {
                let (a, b) = (r0[j], r1[j]);
                r0[j] = c * a + s * b;
                r1[j] = -s * a + c * b;
            }
        }
        Self { n, data: tmp }
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = m;
                self.data[j * n + i] = m;
            }
        }
    }
}

/// Gains of the backward Riccati sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSolution {
    /// `gains[t]` is the row `F_t`, `t = 0..n_steps`.
    pub gains: Vec<Vec<f64>>,
    /// `tr P_t` for `t = 0..=n_steps`.
    pub p_traces: Vec<f64>,
    /// Control weight `R` used for the sweep.
    pub r: f64,
}

/// Backward Riccati recursion from `P_{t_f} = I`.
pub fn riccati_backward(system: &AffineSystem, r: f64, n_steps: usize) -> Result<RiccatiSolution> {
    riccati_backward_with(system, r, n_steps, |_, _| {})
}

/// [`riccati_backward`] that hands every iterate `P_t` (from `t = n_steps`
/// down to `0`) to `observe`.
pub fn riccati_backward_with<F: FnMut(usize, &SymMatrix)>(
    system: &AffineSystem,
    r: f64,
    n_steps: usize,
    mut observe: F,
) -> Result<RiccatiSolution> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(config(format!("control weight R must be > 0, got {r}")));
    }
    if n_steps == 0 {
        return Err(config("n_steps must be at least 1"));
    }
    let n = system.dim();
    let mut p = SymMatrix::identity(n);
    let mut gains = alloc::vec![Vec::new(); n_steps];
    let mut p_traces = alloc::vec![0.0; n_steps + 1];
    p_traces[n_steps] = p.trace();
    observe(n_steps, &p);
    for t in (0..n_steps).rev() {
        let pb = p.mul_vec(&system.b);
        let denom = r + pb.iter().zip(&system.b).map(|(a, b)| a * b).sum::<f64>();
        if !(denom > 0.0 && denom.is_finite()) {
            return Err(Error::IllConditioned {
                step: t,
                value: denom,
            });
        }
        // (Bᵀ P A)ᵀ = Aᵀ P B
        let at_pb = system.apply_a_transpose(&pb);
        gains[t] = at_pb.iter().map(|v| v / denom).collect();
        let mut next = p.congruence(system);
        for i in 0..n {
            let row = &mut next.data[i * n..(i + 1) * n];
            let gi = at_pb[i] / denom;
            for (x, a) in row.iter_mut().zip(&at_pb) {
                *x -= gi * a;
            }
        }
        next.symmetrize();
        p = next;
        p_traces[t] = p.trace();
        observe(t, &p);
    }
    Ok(RiccatiSolution { gains, p_traces, r })
}

/// Terminal and control contributions to `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// `Σ_k |f_k(t_f)|²`.
    pub terminal: f64,
    /// `R Σ_t u_t²`.
    pub control: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.terminal + self.control
    }
}

/// Closed-loop result.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrSolution {
    pub gains: Vec<Vec<f64>>,
    pub controls: Vec<f64>,
    /// `states[t]` for `t = 0..=n_steps`.
    pub states: Vec<Vec<f64>>,
    pub cost: CostBreakdown,
    pub r: f64,
    pub dt: f64,
}

impl LqrSolution {
    pub fn final_population(&self) -> f64 {
        population_from_sum(self.cost.terminal)
    }

    /// `R` in the continuous-time convention `R ∫u² dt`, i.e. `R·δt`.
    pub fn r_continuous(&self) -> f64 {
        self.r * self.dt
    }

    /// The control as a held schedule usable by [`crate::tdvp::evolve`].
    pub fn schedule(&self) -> Result<SwitchProfile> {
        SwitchProfile::held(self.dt, &self.controls)
    }

    /// Number of sign changes of `u_t`.
    pub fn zero_crossings(&self) -> usize {
        self.controls
            .windows(2)
            .filter(|w| (w[0] > 0.0 && w[1] <= 0.0) || (w[0] < 0.0 && w[1] >= 0.0))
            .count()
    }
}

/// Simulates `x_{t+1} = (A − B F_t) x_t` from `x0`.
pub fn closed_loop(
    system: &AffineSystem,
    gains: &RiccatiSolution,
    x0: &[f64],
) -> Result<LqrSolution> {
    system.check_dim(x0.len())?;
    for g in &gains.gains {
        system.check_dim(g.len())?;
    }
    let mut states = Vec::with_capacity(gains.gains.len() + 1);
    let mut controls = Vec::with_capacity(gains.gains.len());
    let mut x = x0.to_vec();
    for f in &gains.gains {
        let u = -f.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        let next = system.step(&x, u);
        states.push(core::mem::replace(&mut x, next));
        controls.push(u);
    }
    states.push(x);
    let cost = cost_of(states.last().map(Vec::as_slice).unwrap_or(&[]), &controls, gains.r);
    Ok(LqrSolution {
        gains: gains.gains.clone(),
        controls,
        states,
        cost,
        r: gains.r,
        dt: system.dt,
    })
}

fn cost_of(final_state: &[f64], controls: &[f64], r: f64) -> CostBreakdown {
    CostBreakdown {
        terminal: final_state.iter().map(|v| v * v).sum(),
        control: r * controls.iter().map(|u| u * u).sum::<f64>(),
    }
}

/// Open-loop trajectory for a given control sequence.
pub fn open_loop_states(system: &AffineSystem, x0: &[f64], controls: &[f64]) -> Result<Vec<Vec<f64>>> {
    system.check_dim(x0.len())?;
    let mut states = Vec::with_capacity(controls.len() + 1);
    states.push(x0.to_vec());
    for &u in controls {
        let next = system.step(states.last().unwrap(), u);
        states.push(next);
    }
    Ok(states)
}

/// `J` of an arbitrary control sequence on the discretized system.
pub fn evaluate_cost(
    system: &AffineSystem,
    x0: &[f64],
    controls: &[f64],
    r: f64,
) -> Result<CostBreakdown> {
    let states = open_loop_states(system, x0, controls)?;
    Ok(cost_of(states.last().unwrap(), controls, r))
}

/// Relaxed displacements `f′_k = −g_k/(2ω′_k)`, `f″_k = 0`.
pub fn relaxed_state_vector(bath: &BathDiscretization, omega_q: f64) -> Vec<f64> {
    bath.modes()
        .iter()
        .flat_map(|m| [m.equilibrium(omega_q), 0.0])
        .collect()
}

/// Number of steps for a protocol of length `duration`; must be a multiple of `dt`.
pub fn steps_for(duration: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && duration > 0.0) {
        return Err(config("dt and duration must be > 0"));
    }
    let n = round(duration / dt);
    if n < 1.0 || (n * dt - duration).abs() > 1e-9 * duration {
        return Err(config(format!(
            "duration {duration} ns is not a whole number of {dt} ns steps"
        )));
    }
    Ok(n as usize)
}

/// Builds the system, solves the Riccati sweep and runs the closed loop
/// from the relaxed state.
pub fn optimize(
    bath: &BathDiscretization,
    omega_q: f64,
    dt: f64,
    duration: f64,
    r: f64,
) -> Result<LqrSolution> {
    let system = build_system(bath, omega_q, dt)?;
    let n = steps_for(duration, dt)?;
    let gains = riccati_backward(&system, r, n)?;
    closed_loop(&system, &gains, &relaxed_state_vector(bath, omega_q))
}

/// Replays a held control open-loop through the variational dynamics on
/// another (typically finer) bath and returns the final population.
pub fn evaluate_on_fine_bath(
    controls: &[f64],
    fine_bath: &BathDiscretization,
    omega_q: f64,
    dt: f64,
) -> Result<f64> {
    let profile = SwitchProfile::held(dt, controls)?;
    let initial = PolaronState::relaxed(fine_bath, omega_q);
    let rec = evolve(
        &initial,
        fine_bath,
        omega_q,
        &profile,
        &EvolveOptions {
            dt,
            full_nonlinear: false,
            tracking: Tracking::None,
            record_energy: false,
        },
    )?;
    Ok(rec.final_population())
}

// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact propagation of a few-mode spin-boson model in a truncated Fock space.
//!
//! `H(u) = (ω_q/2)σ_x + Σ_k ω_k b_k†b_k + u (σ_z/2) Σ_k g_k (b_k† + b_k)`,
//! with each mode truncated to `cutoff` levels. Basis index is
//! `q·D + Σ_k n_k·cutoff^{N−1−k}` with `q = 0` for `|↑⟩` and `q = 1` for
//! `|↓⟩`. Time steps apply `exp(−iH(u)h)` through a Taylor series carried to
//! round-off, with `u` frozen at the step midpoint.
//!
//! The variational equations rotate displacements as `e^{+iω′t}`; the exact
//! `⟨σ_z b_k⟩` rotates as `e^{−iω′t}`. Comparisons therefore pair
//! `⟨σ_z b_k⟩` with `conj(f_k)`; populations are unaffected.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bath::{BathDiscretization, Mode};
use crate::error::config;
use crate::math::{exp, powf, sqrt};
use crate::polaron::PolaronState;
use crate::tdvp::{evolve, step_grid, EvolveOptions, SwitchProfile, Tracking, TrajectoryRecord};
use crate::{Error, Result};

/// Largest allowed top-level population of any mode.
pub const LEAKAGE_LIMIT: f64 = 1e-6;
/// Largest allowed coherent-state truncation loss when preparing a state.
pub const PREPARATION_LIMIT: f64 = 1e-8;

const MAX_MODES: usize = 4;
const MAX_CUTOFF: usize = 8;

/// Few-mode spin-boson Hamiltonian in a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSystem {
    omega_q: f64,
    modes: Vec<Mode>,
    cutoff: usize,
    bath_dim: usize,
    /// `occupation[b * n_modes + k]`.
    occupation: Vec<usize>,
    bath_energy: Vec<f64>,
    strides: Vec<usize>,
}

impl TruncatedSystem {
    pub fn new(omega_q: f64, modes: &[Mode], cutoff: usize) -> Result<Self> {
        if modes.is_empty() || modes.len() > MAX_MODES {
            return Err(config(format!(
                "the oracle supports 1..={MAX_MODES} modes, got {}",
                modes.len()
            )));
        }
        if !(2..=MAX_CUTOFF).contains(&cutoff) {
            return Err(config(format!(
                "fock cutoff must be in 2..={MAX_CUTOFF}, got {cutoff}"
            )));
        }
        if !(omega_q > 0.0) {
            return Err(config("omega_q must be > 0"));
        }
        let n = modes.len();
        let bath_dim = cutoff.pow(n as u32);
        let strides: Vec<usize> = (0..n).map(|k| cutoff.pow((n - 1 - k) as u32)).collect();
        let mut occupation = Vec::with_capacity(bath_dim * n);
        let mut bath_energy = Vec::with_capacity(bath_dim);
        for b in 0..bath_dim {
            let mut e = 0.0;
            for (k, m) in modes.iter().enumerate() {
                let nk = (b / strides[k]) % cutoff;
                occupation.push(nk);
                e += m.omega * nk as f64;
            }
            bath_energy.push(e);
        }
        Ok(Self {
            omega_q,
            modes: modes.to_vec(),
            cutoff,
            bath_dim,
            occupation,
            bath_energy,
            strides,
        })
    }

    pub fn from_bath(bath: &BathDiscretization, omega_q: f64, cutoff: usize) -> Result<Self> {
        Self::new(omega_q, bath.modes(), cutoff)
    }

    /// Hilbert-space dimension `2·cutoff^N`.
    pub fn dim(&self) -> usize {
        2 * self.bath_dim
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    fn n(&self, b: usize, k: usize) -> usize {
        self.occupation[b * self.modes.len() + k]
    }

    /// `out = H(u) ψ`.
    pub fn apply_hamiltonian(&self, u: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let d = self.bath_dim;
        let half_q = 0.5 * self.omega_q;
        for q in 0..2 {
            let sz = if q == 0 { 0.5 } else { -0.5 };
            let other = (1 - q) * d;
            for b in 0..d {
                let i = q * d + b;
                let mut acc = psi[other + b] * half_q + psi[i] * self.bath_energy[b];
                if u != 0.0 {
                    let mut c = Complex64::new(0.0, 0.0);
                    for (k, m) in self.modes.iter().enumerate() {
                        let nk = self.n(b, k);
                        if nk > 0 {
                            c += psi[i - self.strides[k]] * sqrt(nk as f64) * m.coupling;
                        }
                        if nk + 1 < self.cutoff {
                            c += psi[i + self.strides[k]] * sqrt((nk + 1) as f64) * m.coupling;
                        }
                    }
                    acc += c * (u * sz);
                }
                out[i] = acc;
            }
        }
    }

    /// Upper bound on `‖H(u)‖`.
    pub fn norm_bound(&self, u: f64) -> f64 {
        let top = (self.cutoff - 1) as f64;
        let bath: f64 = self.modes.iter().map(|m| m.omega * top).sum();
        let coupling: f64 = self.modes.iter().map(|m| m.coupling * sqrt(top)).sum();
        0.5 * self.omega_q + bath + u.abs() * coupling
    }

    /// `⟨ψ|ψ⟩`.
    pub fn norm_sqr(psi: &[Complex64]) -> f64 {
        psi.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Excited-state population `‖(⟨+|⊗I)ψ‖²`, `|+⟩ = (|↑⟩ + |↓⟩)/√2`.
    pub fn excited_population(&self, psi: &[Complex64]) -> f64 {
        let d = self.bath_dim;
        0.5 * (0..d).map(|b| (psi[b] + psi[d + b]).norm_sqr()).sum::<f64>()
    }

    /// `⟨σ_x⟩`.
    pub fn sigma_x(&self, psi: &[Complex64]) -> f64 {
        let d = self.bath_dim;
        2.0 * (0..d).map(|b| (psi[b].conj() * psi[d + b]).re).sum::<f64>()
    }

    /// `⟨H(u)⟩`.
    pub fn energy(&self, psi: &[Complex64], u: f64) -> f64 {
        let mut h = alloc::vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_hamiltonian(u, psi, &mut h);
        psi.iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Largest population of any mode's top Fock level.
    pub fn top_level_population(&self, psi: &[Complex64]) -> f64 {
        let d = self.bath_dim;
        let top = self.cutoff - 1;
        (0..self.modes.len())
            .map(|k| {
                (0..d)
                    .filter(|&b| self.n(b, k) == top)
                    .map(|b| psi[b].norm_sqr() + psi[d + b].norm_sqr())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `ψ ← exp(−iH(u)h) ψ` by a Taylor series summed to round-off.
    fn propagate(&self, u: f64, h: f64, psi: &mut [Complex64], work: &mut [Vec<Complex64>; 2]) {
        let [term, next] = work;
        term.copy_from_slice(psi);
        for m in 1..=60 {
            self.apply_hamiltonian(u, term, next);
            let factor = Complex64::new(0.0, -h / m as f64);
            let mut size = 0.0;
            for (t, n) in term.iter_mut().zip(next.iter()) {
                *t = n * factor;
                size += t.norm_sqr();
            }
            for (p, t) in psi.iter_mut().zip(term.iter()) {
                *p += t;
            }
            if size < 1e-36 {
                break;
            }
        }
    }
}

/// A prepared state and the weight lost to the Fock cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState {
    pub amplitudes: Vec<Complex64>,
    pub truncation_error: f64,
}

fn coherent(f: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(cutoff);
    let mut amp = Complex64::new(exp(-0.5 * f.norm_sqr()), 0.0);
    for n in 0..cutoff {
        c.push(amp);
        amp = amp * f / sqrt((n + 1) as f64);
    }
    c
}

/// `(|↑, f⟩ − |↓, −f⟩)/√2` with truncated coherent states, renormalized.
pub fn prepare_polaron(system: &TruncatedSystem, displacements: &[Complex64]) -> Result<PreparedState> {
    let n = system.modes.len();
    if displacements.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: displacements.len(),
        });
    }
    let plus: Vec<Vec<Complex64>> = displacements.iter().map(|&f| coherent(f, system.cutoff)).collect();
    let minus: Vec<Vec<Complex64>> = displacements.iter().map(|&f| coherent(-f, system.cutoff)).collect();
    let kept: f64 = plus
        .iter()
        .map(|c| c.iter().map(|a| a.norm_sqr()).sum::<f64>())
        .product();
    let truncation_error = (1.0 - kept).max(0.0);
    if truncation_error > PREPARATION_LIMIT {
        return Err(Error::Truncation {
            error: truncation_error,
            threshold: PREPARATION_LIMIT,
        });
    }
    let d = system.bath_dim;
    let mut psi = alloc::vec![Complex64::new(0.0, 0.0); 2 * d];
    for b in 0..d {
        let mut up = Complex64::new(1.0, 0.0);
        let mut down = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let nk = system.n(b, k);
            up *= plus[k][nk];
            down *= minus[k][nk];
        }
        psi[b] = up;
        psi[d + b] = -down;
    }
    let norm = sqrt(TruncatedSystem::norm_sqr(&psi));
    for a in psi.iter_mut() {
        *a /= norm;
    }
    Ok(PreparedState {
        amplitudes: psi,
        truncation_error,
    })
}

/// `⟨σ_z b_k⟩` for every mode.
pub fn displacement_expectations(system: &TruncatedSystem, psi: &[Complex64]) -> Vec<Complex64> {
    let d = system.bath_dim;
    (0..system.modes.len())
        .map(|k| {
            let stride = system.strides[k];
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..2 {
                let sign = if q == 0 { 1.0 } else { -1.0 };
                for b in 0..d {
                    let nk = system.n(b, k);
                    if nk + 1 < system.cutoff {
                        let i = q * d + b;
                        acc += psi[i].conj() * psi[i + stride] * (sign * sqrt((nk + 1) as f64));
                    }
                }
            }
            acc
        })
        .collect()
}

/// Exact trajectory of a truncated system.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTrajectory {
    pub times: Vec<f64>,
    pub u_values: Vec<f64>,
    pub populations: Vec<f64>,
    /// `⟨σ_z b_k⟩` per recorded time.
    pub displacements: Vec<Vec<Complex64>>,
    pub energies: Vec<f64>,
    /// Largest `|⟨ψ|ψ⟩ − 1|` seen.
    pub norm_drift: f64,
    /// Largest top-level population seen.
    pub max_leakage: f64,
    /// `false` when the leakage limit was exceeded.
    pub valid: bool,
    pub final_state: Vec<Complex64>,
}

impl ExactTrajectory {
    pub fn final_population(&self) -> f64 {
        *self.populations.last().unwrap_or(&0.0)
    }
}

/// Propagates `psi0` through `profile` with piecewise-constant `u`.
///
/// Requires `dt·‖H‖ < 1/2` for the largest coupling on the grid.
pub fn exact_evolve(
    system: &TruncatedSystem,
    psi0: &[Complex64],
    profile: &SwitchProfile,
    dt: f64,
) -> Result<ExactTrajectory> {
    if psi0.len() != system.dim() {
        return Err(Error::Dimension {
            expected: system.dim(),
            actual: psi0.len(),
        });
    }
    let (n_steps, last) = step_grid(profile.duration(), dt)?;
    let mut psi = psi0.to_vec();
    let mut work = [psi.clone(), psi.clone()];
    let mut out = ExactTrajectory {
        times: Vec::with_capacity(n_steps + 1),
        u_values: Vec::with_capacity(n_steps + 1),
        populations: Vec::with_capacity(n_steps + 1),
        displacements: Vec::with_capacity(n_steps + 1),
        energies: Vec::with_capacity(n_steps + 1),
        norm_drift: 0.0,
        max_leakage: 0.0,
        valid: true,
        final_state: Vec::new(),
    };
    let norm0 = TruncatedSystem::norm_sqr(psi0);
    let record = |t: f64, psi: &[Complex64], out: &mut ExactTrajectory| {
        let u = profile.value_unchecked(t.min(profile.duration()));
        out.times.push(t);
        out.u_values.push(u);
        out.populations.push(system.excited_population(psi));
        out.displacements.push(displacement_expectations(system, psi));
        out.energies.push(system.energy(psi, u));
        out.norm_drift = out
            .norm_drift
            .max((TruncatedSystem::norm_sqr(psi) - norm0).abs());
        out.max_leakage = out.max_leakage.max(system.top_level_population(psi));
    };
    record(0.0, &psi, &mut out);
    for n in 0..n_steps {
        let t0 = n as f64 * dt;
        let h = if n + 1 == n_steps { last } else { dt };
        let u = profile.sample_in_step(t0, h, 0.5);
        let bound = h * system.norm_bound(u);
        if bound >= 0.5 {
            return Err(config(format!(
                "dt·‖H‖ = {bound:.3} must stay below 0.5; reduce dt"
            )));
        }
        system.propagate(u, h, &mut psi, &mut work);
        if psi.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite { time: t0 + h });
        }
        let t1 = if n + 1 == n_steps { profile.duration() } else { t0 + h };
        record(t1, &psi, &mut out);
    }
    out.valid = out.max_leakage < LEAKAGE_LIMIT;
    out.final_state = psi;
    Ok(out)
}

/// A few-mode bath for oracle runs: frequencies geometrically spaced on
/// `[ω_c/4, 2ω_c]`, couplings chosen so each mode carries an equal share of
/// `Σ_k |f_{k0}|² = target_sum_f2`.
pub fn oracle_bath(
    omega_c: f64,
    omega_q: f64,
    n_modes: usize,
    target_sum_f2: f64,
) -> Result<BathDiscretization> {
    if n_modes == 0 || n_modes > MAX_MODES {
        return Err(config(format!("oracle baths have 1..={MAX_MODES} modes")));
    }
    if !(target_sum_f2 >= 0.0) {
        return Err(config("target_sum_f2 must be >= 0"));
    }
    let lo = 0.25 * omega_c;
    let ratio = 8.0;
    let share = sqrt(target_sum_f2 / n_modes as f64);
    let modes = (0..n_modes)
        .map(|k| {
            let x = if n_modes == 1 {
                0.0
            } else {
                k as f64 / (n_modes - 1) as f64
            };
            let w = lo * powf(ratio, x);
            Mode::new(w, 2.0 * (w + omega_q) * share)
        })
        .collect();
    BathDiscretization::from_modes(modes)
}

/// Exact and variational dynamics side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub exact_final_population: f64,
    pub tdvp_final_population: f64,
    /// `|P_exact − P_tdvp| / P_exact` at `t_f` (0 when both vanish).
    pub relative_discrepancy: f64,
    /// `max_t max_k ||⟨σ_z b_k⟩| − |f_k|| / max_k |f_k(0)|`.
    pub displacement_tracking: f64,
    /// `max_t max_k |⟨σ_z b_k⟩ − conj f_k| / max_k |f_k(0)|`.
    pub displacement_mismatch: f64,
    pub valid: bool,
    pub exact: ExactTrajectory,
    pub tdvp: TrajectoryRecord,
}

/// Runs the oracle and the full (renormalized) variational equations from the
/// same weak-coupling polaron state with a common step.
pub fn compare_with_tdvp(
    bath: &BathDiscretization,
    omega_q: f64,
    profile: &SwitchProfile,
    cutoff: usize,
    dt: f64,
) -> Result<OracleComparison> {
    let system = TruncatedSystem::from_bath(bath, omega_q, cutoff)?;
    let initial = PolaronState::relaxed(bath, omega_q);
    let prepared = prepare_polaron(&system, initial.displacements())?;
    let exact = exact_evolve(&system, &prepared.amplitudes, profile, dt)?;
    let tdvp = evolve(
        &initial,
        bath,
        omega_q,
        profile,
        &EvolveOptions {
            dt,
            full_nonlinear: true,
            tracking: Tracking::All,
            record_energy: false,
        },
    )?;
    let pe = exact.final_population();
    let pt = tdvp.final_population();
    let relative_discrepancy = if pe == 0.0 && pt == 0.0 {
        0.0
    } else {
        (pe - pt).abs() / pe.abs().max(pt.abs())
    };
    let scale = initial
        .displacements()
        .iter()
        .map(|f| f.norm())
        .fold(0.0, f64::max);
    let mut tracking: f64 = 0.0;
    let mut mismatch: f64 = 0.0;
    if scale > 0.0 {
        for (ex, tv) in exact.displacements.iter().zip(&tdvp.snapshots) {
            for (a, b) in ex.iter().zip(tv) {
                tracking = tracking.max((a.norm() - b.norm()).abs() / scale);
                mismatch = mismatch.max((a - b.conj()).norm() / scale);
            }
        }
    }
    Ok(OracleComparison {
        exact_final_population: pe,
        tdvp_final_population: pt,
        relative_discrepancy,
        displacement_tracking: tracking,
        displacement_mismatch: mismatch,
        valid: exact.valid,
        exact,
        tdvp,
    })
}

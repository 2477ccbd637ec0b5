// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Polaron variational state: ground state, population, energy.
//!
//! The state is `(|↑, f⟩ − |↓, −f⟩)/√2`, where `|f⟩` is the product of
//! coherent states with complex displacements `f_k`. The qubit overlap
//! `⟨f|−f⟩ = exp(−2Σ|f_k|²)` sets both the excited-state population and the
//! renormalized qubit splitting.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bath::{BathDiscretization, BathId};
use crate::error::config;
use crate::math::{exp, expm1};
use crate::{Error, Result};

/// Displacements `f_k` of the polaron ansatz, tied to one bath.
#[derive(Debug, Clone, PartialEq)]
pub struct PolaronState {
    displacements: Vec<Complex64>,
    bath: BathId,
}

impl PolaronState {
    pub fn new(bath: &BathDiscretization, displacements: Vec<Complex64>) -> Result<Self> {
        if displacements.len() != bath.len() {
            return Err(Error::Dimension {
                expected: bath.len(),
                actual: displacements.len(),
            });
        }
        if displacements.iter().any(|f| !f.is_finite()) {
            return Err(config("displacements must be finite"));
        }
        Ok(Self {
            displacements,
            bath: bath.id(),
        })
    }

    /// The uncoupled ground state, all `f_k = 0`.
    pub fn zero(bath: &BathDiscretization) -> Self {
        Self {
            displacements: alloc::vec![Complex64::new(0.0, 0.0); bath.len()],
            bath: bath.id(),
        }
    }

    /// The weak-coupling relaxed state `f_k = −g_k/(2(ω_k + ω_q))`.
    pub fn relaxed(bath: &BathDiscretization, omega_q: f64) -> Self {
        Self {
            displacements: bath
                .modes()
                .iter()
                .map(|m| Complex64::new(m.equilibrium(omega_q), 0.0))
                .collect(),
            bath: bath.id(),
        }
    }

    pub(crate) fn from_parts(displacements: Vec<Complex64>, bath: BathId) -> Self {
        Self {
            displacements,
            bath,
        }
    }

    pub fn displacements(&self) -> &[Complex64] {
        &self.displacements
    }

    pub fn into_displacements(self) -> Vec<Complex64> {
        self.displacements
    }

    pub fn bath_id(&self) -> BathId {
        self.bath
    }

    pub fn len(&self) -> usize {
        self.displacements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.displacements.is_empty()
    }

    /// `Σ_k |f_k|²`.
    pub fn sum_sq(&self) -> f64 {
        self.displacements.iter().map(|f| f.norm_sqr()).sum()
    }

    /// Errors unless this state was built on `bath`.
    pub fn check_bath(&self, bath: &BathDiscretization) -> Result<()> {
        if self.displacements.len() != bath.len() {
            return Err(Error::Dimension {
                expected: bath.len(),
                actual: self.displacements.len(),
            });
        }
        if self.bath != bath.id() {
            return Err(config("state belongs to a different bath discretization"));
        }
        Ok(())
    }
}

/// Controls for [`ground_state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateOptions {
    /// Iterate the renormalized equation instead of using the weak-coupling form.
    pub self_consistent: bool,
    /// Stop when the largest displacement change drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self {
            self_consistent: false,
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl GroundStateOptions {
    pub fn self_consistent() -> Self {
        Self {
            self_consistent: true,
            ..Self::default()
        }
    }
}

/// Variational ground state of the coupled qubit and bath.
///
/// Weak coupling gives `f_k = −g_k/(2(ω_q + ω_k))`. The self-consistent
/// branch iterates `f_k = −g_k/(2(ω_q e^{−2Σ|f|²} + ω_k))` from that seed.
pub fn ground_state(
    bath: &BathDiscretization,
    omega_q: f64,
    opts: GroundStateOptions,
) -> Result<PolaronState> {
    if !(opts.tol > 0.0) {
        return Err(config(format!("tol must be > 0, got {}", opts.tol)));
    }
    if !(omega_q > 0.0) {
        return Err(config(format!("omega_q must be > 0, got {omega_q}")));
    }
    let mut f: Vec<f64> = bath
        .modes()
        .iter()
        .map(|m| m.equilibrium(omega_q))
        .collect();
    if opts.self_consistent {
        let mut residual = f64::INFINITY;
        let mut converged = false;
        for _ in 0..opts.max_iter {
            let dressed = omega_q * exp(-2.0 * f.iter().map(|x| x * x).sum::<f64>());
            residual = 0.0;
            for (fk, m) in f.iter_mut().zip(bath.modes()) {
                let next = -m.coupling / (2.0 * (dressed + m.omega));
                residual = residual.max((next - *fk).abs());
                *fk = next;
            }
            if residual < opts.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                iterations: opts.max_iter,
                residual,
            });
        }
    }
    Ok(PolaronState {
        displacements: f.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        bath: bath.id(),
    })
}

/// Largest violation of the self-consistency equation over all modes.
pub fn fixed_point_residual(state: &PolaronState, bath: &BathDiscretization, omega_q: f64) -> f64 {
    let dressed = omega_q * exp(-2.0 * state.sum_sq());
    state
        .displacements
        .iter()
        .zip(bath.modes())
        .map(|(f, m)| (f + m.coupling / (2.0 * (dressed + m.omega))).norm())
        .fold(0.0, f64::max)
}

/// `(1 − exp(−2S))/2` for `S = Σ|f_k|²`.
#[inline]
pub fn population_from_sum(sum_sq: f64) -> f64 {
    if sum_sq.is_infinite() {
        return 0.5;
    }
    -0.5 * expm1(-2.0 * sum_sq)
}

/// Qubit excited-state population of a polaron state.
pub fn excited_population(state: &PolaronState) -> f64 {
    population_from_sum(state.sum_sq())
}

/// Energy expectation `E = −(h_x/2)e^{−2Σ|f|²} + Σω_k|f_k|² + ½Σg_k(f_k+f_k*)`.
///
/// Only the transverse field enters: `h_z` cancels between the two branches
/// and `h_y` drops out of the symmetric combination of cross terms.
pub fn variational_energy(state: &PolaronState, bath: &BathDiscretization, h_x: f64) -> Result<f64> {
    coupled_energy(state, bath, h_x, 1.0)
}

/// [`variational_energy`] with the coupling term scaled by `u`.
pub fn coupled_energy(
    state: &PolaronState,
    bath: &BathDiscretization,
    h_x: f64,
    u: f64,
) -> Result<f64> {
    state.check_bath(bath)?;
    let mut bath_energy = 0.0;
    let mut coupling = 0.0;
    for (f, m) in state.displacements.iter().zip(bath.modes()) {
        bath_energy += m.omega * f.norm_sqr();
        coupling += m.coupling * f.re;
    }
    Ok(-0.5 * h_x * exp(-2.0 * state.sum_sq()) + bath_energy + u * coupling)
}

/// Analytic gradient `(∂E/∂x_k, ∂E/∂y_k)` for `f_k = x_k + i y_k`.
pub fn energy_gradient(
    state: &PolaronState,
    bath: &BathDiscretization,
    h_x: f64,
    u: f64,
) -> Result<Vec<[f64; 2]>> {
    state.check_bath(bath)?;
    let overlap = h_x * exp(-2.0 * state.sum_sq());
    Ok(state
        .displacements
        .iter()
        .zip(bath.modes())
        .map(|(f, m)| {
            [
                2.0 * f.re * overlap + 2.0 * m.omega * f.re + u * m.coupling,
                2.0 * f.im * overlap + 2.0 * m.omega * f.im,
            ]
        })
        .collect())
}

/// Per-mode qubit–bath correlation `(ω_k, g_k f_k)`.
pub fn correlation_profile(
    state: &PolaronState,
    bath: &BathDiscretization,
) -> Result<Vec<(f64, Complex64)>> {
    state.check_bath(bath)?;
    Ok(state
        .displacements
        .iter()
        .zip(bath.modes())
        .map(|(f, m)| (m.omega, f * m.coupling))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::Mode;
    use crate::math::PI;

    fn wq() -> f64 {
        2.0 * PI * 5.0
    }

    fn single() -> BathDiscretization {
        BathDiscretization::from_modes(alloc::vec![Mode::new(wq(), wq())]).unwrap()
    }

    #[test]
    fn zero_coupling_gives_zero_state() {
        let bath = BathDiscretization::from_modes(alloc::vec![
            Mode::new(1.0, 0.0),
            Mode::new(2.0, 0.0)
        ])
        .unwrap();
        for opts in [GroundStateOptions::default(), GroundStateOptions::self_consistent()] {
            let s = ground_state(&bath, wq(), opts).unwrap();
            assert!(s.displacements().iter().all(|f| *f == Complex64::new(0.0, 0.0)));
            assert_eq!(excited_population(&s), 0.0);
        }
    }

    #[test]
    fn single_mode_weak_coupling() {
        let s = ground_state(&single(), wq(), GroundStateOptions::default()).unwrap();
        assert!((s.displacements()[0] - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_mode_energy_by_hand() {
        let bath = single();
        let s = PolaronState::new(&bath, alloc::vec![Complex64::new(-0.25, 0.0)]).unwrap();
        let e = variational_energy(&s, &bath, wq()).unwrap();
        let want = -(wq() / 2.0) * (-0.125f64).exp() + wq() / 16.0 - wq() / 4.0;
        assert!((e - want).abs() < 1e-13 * want.abs());
        let z = PolaronState::zero(&bath);
        assert_eq!(variational_energy(&z, &bath, wq()).unwrap(), -wq() / 2.0);
    }

    #[test]
    fn population_limits() {
        assert_eq!(population_from_sum(0.0), 0.0);
        assert_eq!(population_from_sum(f64::INFINITY), 0.5);
        assert!((population_from_sum(1e3) - 0.5).abs() < 1e-300);
        let mut last = 0.0;
        for k in 0..33 {
            let p = population_from_sum(1e-9 * 2f64.powi(k));
            assert!(p > last && p < 0.5);
            last = p;
        }
    }

    #[test]
    fn self_consistent_reports_non_convergence() {
        let bath = single();
        let err = ground_state(
            &bath,
            wq(),
            GroundStateOptions {
                self_consistent: true,
                tol: 1e-300,
                max_iter: 3,
            },
        )
        .unwrap_err();
        match err {
            Error::NoConvergence { iterations, residual } => {
                assert_eq!(iterations, 3);
                assert!(residual > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(ground_state(&bath, wq(), GroundStateOptions { tol: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn state_checks_bath() {
        let a = single();
        let b = a.scaled(2.0).unwrap();
        let s = PolaronState::relaxed(&a, wq());
        assert!(s.check_bath(&a).is_ok());
        assert!(variational_energy(&s, &b, wq()).is_err());
        assert!(matches!(
            PolaronState::new(&a, Vec::new()),
            Err(Error::Dimension { expected: 1, actual: 0 })
        ));
    }
}

// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::vec::Vec;

use crate::bath::BathDiscretization;
use crate::polaron::{ground_state, GroundStateOptions, PolaronState};
use crate::tdvp::{evolve, EvolveOptions, SwitchProfile, TrajectoryRecord, Tracking};
use crate::{Error, Result};

/// Settings shared by every profile of a decoupling sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    pub dt: f64,
    pub full_nonlinear: bool,
    /// Frequencies [rad/ns] whose nearest modes are tracked in time.
    pub probe_frequencies: Vec<f64>,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            full_nonlinear: false,
            probe_frequencies: Vec::new(),
        }
    }
}

/// One profile's result.
#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingRun {
    pub profile: SwitchProfile,
    pub record: TrajectoryRecord,
    /// `(ω_k, |f_k(t_f)|)` across the whole bath.
    pub final_spectrum: Vec<(f64, f64)>,
    pub initial_population: f64,
    pub final_population: f64,
}

impl DecouplingRun {
    pub fn log10_final_population(&self) -> f64 {
        libm::log10(self.final_population)
    }
}

fn nearest_mode(bath: &BathDiscretization, omega: f64) -> Option<usize> {
    bath.modes()
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1.omega - omega)
                .abs()
                .total_cmp(&(b.1.omega - omega).abs())
        })
        .map(|(i, _)| i)
}

/// Relaxed starting point matching the chosen equations of motion: the
/// weak-coupling displacements for the linear equations, the self-consistent
/// ones for the full equations.
pub(crate) fn relaxed_start(
    bath: &BathDiscretization,
    omega_q: f64,
    full_nonlinear: bool,
) -> Result<PolaronState> {
    let opts = if full_nonlinear {
        GroundStateOptions::self_consistent()
    } else {
        GroundStateOptions::default()
    };
    ground_state(bath, omega_q, opts)
}

/// Runs one profile from the relaxed state.
pub fn run_decoupling(
    bath: &BathDiscretization,
    omega_q: f64,
    profile: &SwitchProfile,
    opts: &ExperimentOptions,
) -> Result<DecouplingRun> {
    let u0 = profile.value(0.0)?;
    if (u0 - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "decoupling starts fully coupled, but u(0) = {u0}"
        )));
    }
    let initial = relaxed_start(bath, omega_q, opts.full_nonlinear)?;
    let mut probes: Vec<usize> = opts
        .probe_frequencies
        .iter()
        .filter_map(|&w| nearest_mode(bath, w))
        .collect();
    probes.dedup();
    let record = evolve(
        &initial,
        bath,
        omega_q,
        profile,
        &EvolveOptions {
            dt: opts.dt,
            full_nonlinear: opts.full_nonlinear,
            tracking: Tracking::Modes(probes),
            record_energy: true,
        },
    )?;
    let final_spectrum = bath
        .modes()
        .iter()
        .zip(record.final_state.displacements())
        .map(|(m, f)| (m.omega, f.norm()))
        .collect();
    Ok(DecouplingRun {
        profile: profile.clone(),
        initial_population: record.populations[0],
        final_population: record.final_population(),
        record,
        final_spectrum,
    })
}

/// Runs every profile in turn.
pub fn decoupling_experiment(
    bath: &BathDiscretization,
    omega_q: f64,
    profiles: &[SwitchProfile],
    opts: &ExperimentOptions,
) -> Result<Vec<DecouplingRun>> {
    profiles
        .iter()
        .map(|p| run_decoupling(bath, omega_q, p, opts))
        .collect()
}

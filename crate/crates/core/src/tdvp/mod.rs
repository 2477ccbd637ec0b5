// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Variational dynamics of the polaron displacements under a switched coupling.
//!
//! The displacements obey
//! `ḟ_k = i f_k (ω_q e^{−2Σ|f|²} + ω_k) + (i/2) g_k u(t)`. At weak coupling
//! the exponential is dropped and every mode is an independent driven
//! rotation at `ω′_k = ω_k + ω_q` about the moving centre `f_{k0} u(t)`.

mod analytic;
mod experiment;
mod integrator;
mod profile;

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

pub use analytic::{asymptotic_final_displacement, final_displacement_integral, linear_switch_closed_form};
pub use experiment::{decoupling_experiment, run_decoupling, DecouplingRun, ExperimentOptions};
pub use profile::{Interpolation, ProfileKind, SwitchProfile};

use crate::bath::BathDiscretization;
use crate::error::config;
use crate::math::ceil;
use crate::polaron::{coupled_energy, population_from_sum, PolaronState};
use crate::{Error, Result};
use integrator::{LinearStep, Rk4};

/// Which modes get a full time series in a [`TrajectoryRecord`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Tracking {
    #[default]
    All,
    Modes(Vec<usize>),
    None,
}

/// Settings for [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    /// Step length [ns].
    pub dt: f64,
    /// Keep the `e^{−2Σ|f|²}` renormalization (classical RK4) instead of the
    /// decoupled linear equations (exact exponential steps).
    pub full_nonlinear: bool,
    pub tracking: Tracking,
    pub record_energy: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            full_nonlinear: false,
            tracking: Tracking::All,
            record_energy: false,
        }
    }
}

/// Sampled trajectory of a decoupling run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub u_values: Vec<f64>,
    pub populations: Vec<f64>,
    pub energies: Option<Vec<f64>>,
    /// Bath indices with recorded snapshots.
    pub tracked_modes: Vec<usize>,
    /// `snapshots[n][i]` is `f_{tracked_modes[i]}(times[n])`.
    pub snapshots: Vec<Vec<Complex64>>,
    pub final_state: PolaronState,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_population(&self) -> f64 {
        *self.populations.last().unwrap_or(&0.0)
    }

    /// Time series of one tracked mode, by bath index.
    pub fn mode_trajectory(&self, mode: usize) -> Option<Vec<Complex64>> {
        let i = self.tracked_modes.iter().position(|&m| m == mode)?;
        Some(self.snapshots.iter().map(|s| s[i]).collect())
    }
}

/// Uniform grid of `n` steps covering `[0, t_f]`; the last step absorbs the
/// remainder when `t_f/dt` is not an integer.
pub(crate) fn step_grid(duration: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(config(format!("dt must be > 0, got {dt}")));
    }
    if dt >= duration {
        return Err(config(format!(
            "dt = {dt} ns must be shorter than the protocol duration {duration} ns"
        )));
    }
    let n = ceil(duration / dt - 1e-9) as usize;
    let last = duration - (n - 1) as f64 * dt;
    Ok((n, last))
}

/// Integrates the displacement equations of motion over the profile.
pub fn evolve(
    initial: &PolaronState,
    bath: &BathDiscretization,
    omega_q: f64,
    profile: &SwitchProfile,
    opts: &EvolveOptions,
) -> Result<TrajectoryRecord> {
    initial.check_bath(bath)?;
    let (n_steps, last) = step_grid(profile.duration(), opts.dt)?;
    let tracked: Vec<usize> = match &opts.tracking {
        Tracking::All => (0..bath.len()).collect(),
        Tracking::Modes(m) => {
            if let Some(&bad) = m.iter().find(|&&k| k >= bath.len()) {
                return Err(config(format!(
                    "tracked mode {bad} out of range for {} modes",
                    bath.len()
                )));
            }
            m.clone()
        }
        Tracking::None => Vec::new(),
    };

    let mut f: Vec<Complex64> = initial.displacements().to_vec();
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut u_values = Vec::with_capacity(n_steps + 1);
    let mut populations = Vec::with_capacity(n_steps + 1);
    let mut energies = opts.record_energy.then(|| Vec::with_capacity(n_steps + 1));
    let mut snapshots = Vec::with_capacity(n_steps + 1);

    let mut record = |t: f64, f: &[Complex64]| -> Result<()> {
        let u = profile.value_unchecked(t.min(profile.duration()));
        let s: f64 = f.iter().map(|x| x.norm_sqr()).sum();
        if !s.is_finite() {
            return Err(Error::NonFinite { time: t });
        }
        times.push(t);
        u_values.push(u);
        populations.push(population_from_sum(s));
        if let Some(e) = energies.as_mut() {
            let state = PolaronState::from_parts(f.to_vec(), bath.id());
            e.push(coupled_energy(&state, bath, omega_q, u)?);
        }
        snapshots.push(tracked.iter().map(|&k| f[k]).collect());
        Ok(())
    };

    record(0.0, &f)?;
    if opts.full_nonlinear {
        let mut rk = Rk4::new(bath.len());
        for n in 0..n_steps {
            let t0 = n as f64 * opts.dt;
            let h = if n + 1 == n_steps { last } else { opts.dt };
            rk.advance(bath, omega_q, &mut f, profile, t0, h);
            let t1 = if n + 1 == n_steps { profile.duration() } else { t0 + h };
            record(t1, &f)?;
        }
    } else {
        let full = LinearStep::new(bath, omega_q, opts.dt);
        let tail = ((last - opts.dt).abs() > 1e-15 * opts.dt)
            .then(|| LinearStep::new(bath, omega_q, last));
        for n in 0..n_steps {
            let t0 = n as f64 * opts.dt;
            let is_last = n + 1 == n_steps;
            match (&tail, is_last) {
                (Some(step), true) => step.advance(&mut f, profile, t0, last),
                _ => full.advance(&mut f, profile, t0, opts.dt),
            }
            let t1 = if is_last { profile.duration() } else { t0 + opts.dt };
            record(t1, &f)?;
        }
    }

    Ok(TrajectoryRecord {
        times,
        u_values,
        populations,
        energies,
        tracked_modes: tracked,
        snapshots,
        final_state: PolaronState::from_parts(f, bath.id()),
    })
}

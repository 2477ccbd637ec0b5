// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use polaron_reset_core::bath::{BathSpec, SpectralDensityParams};
use serde::{Deserialize, Serialize};

/// Which experiment a configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    GroundState,
    DecoupleSweep,
    LqrOptimize,
    OracleValidate,
}

impl ExperimentKind {
    /// The CLI subcommand that runs this experiment.
    pub fn subcommand(self) -> &'static str {
        match self {
            Self::GroundState => "ground-state",
            Self::DecoupleSweep => "decouple",
            Self::LqrOptimize => "lqr",
            Self::OracleValidate => "validate",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GroundState => "ground-state",
            Self::DecoupleSweep => "decouple-sweep",
            Self::LqrOptimize => "lqr-optimize",
            Self::OracleValidate => "oracle-validate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundStateConfig {
    /// Also solve the self-consistent branch.
    pub self_consistent: bool,
}

impl Default for GroundStateConfig {
    fn default() -> Self {
        Self {
            self_consistent: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoupleConfig {
    /// Smoothness constants of the rational switches.
    pub lambdas: Vec<f64>,
    /// Extra schedules read from `t_ns,u` CSV files.
    pub tabulated: Vec<PathBuf>,
    /// Protocol length [ns].
    pub duration: f64,
    /// Step [ns].
    pub dt: f64,
    pub full_nonlinear: bool,
    /// Frequencies [rad/ns] whose nearest modes get a time series.
    pub probe_frequencies: Vec<f64>,
}

impl Default for DecoupleConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![1.0, 1.5, 2.0, 2.5],
            tabulated: Vec::new(),
            duration: 0.4,
            dt: 1e-3,
            full_nonlinear: false,
            probe_frequencies: vec![0.5 * SpectralDensityParams::default().omega_c],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LqrConfig {
    /// Per-step control weights.
    pub r_values: Vec<f64>,
    /// Modes of the bath the controller is designed on.
    pub n_modes_coarse: usize,
    pub dt: f64,
    pub duration: f64,
    /// Replay every control on the full `bath`.
    pub replay_on_fine_bath: bool,
}

impl Default for LqrConfig {
    fn default() -> Self {
        Self {
            r_values: vec![1e-7, 1e-9, 1e-11],
            n_modes_coarse: 150,
            dt: 1e-3,
            duration: 0.4,
            replay_on_fine_bath: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Modes, geometrically spaced on `[ω_c/4, 2ω_c]`.
    pub n_modes: usize,
    /// Fock levels per mode.
    pub cutoff: usize,
    /// `Σ_k |f_{k0}|²` at coupling scale 1.
    pub target_sum_f2: f64,
    /// Coupling scales to run, e.g. `[1, 0.5, 0.25]`.
    pub coupling_scales: Vec<f64>,
    pub lambda: f64,
    pub duration: f64,
    pub dt: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_modes: 3,
            cutoff: 6,
            target_sum_f2: 1e-3,
            coupling_scales: vec![1.0, 0.5, 0.25],
            lambda: 2.0,
            duration: 0.4,
            dt: 2.5e-4,
        }
    }
}

/// A full experiment description.
///
/// `output_dir` is where results go; it is not part of the provenance block
/// written into output files, so a copied config reproduces them anywhere.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    pub bath: BathSpec,
    pub ground_state: GroundStateConfig,
    pub decouple: DecoupleConfig,
    pub lqr: LqrConfig,
    pub oracle: OracleConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("{name} must be > 0, got {v}");
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Checks value ranges that the types cannot express.
    pub fn validate(&self) -> Result<()> {
        let b = &self.bath;
        if !(b.alpha >= 0.0 && b.alpha.is_finite()) {
            bail!("bath.alpha must be >= 0, got {}", b.alpha);
        }
        positive("bath.omega_c", b.omega_c)?;
        positive("bath.omega_q", b.omega_q)?;
        positive("bath.omega_max", b.omega_max)?;
        if b.n_modes == 0 {
            bail!("bath.n_modes must be at least 1");
        }
        let d = &self.decouple;
        for &l in &d.lambdas {
            positive("decouple.lambdas[]", l)?;
        }
        positive("decouple.duration", d.duration)?;
        positive("decouple.dt", d.dt)?;
        let l = &self.lqr;
        for &r in &l.r_values {
            positive("lqr.r_values[]", r)?;
        }
        if l.n_modes_coarse == 0 {
            bail!("lqr.n_modes_coarse must be at least 1");
        }
        positive("lqr.dt", l.dt)?;
        positive("lqr.duration", l.duration)?;
        let o = &self.oracle;
        positive("oracle.lambda", o.lambda)?;
        positive("oracle.duration", o.duration)?;
        positive("oracle.dt", o.dt)?;
        if !(o.target_sum_f2 >= 0.0) {
            bail!("oracle.target_sum_f2 must be >= 0");
        }
        for &s in &o.coupling_scales {
            if !(s >= 0.0 && s.is_finite()) {
                bail!("oracle.coupling_scales[] must be >= 0, got {s}");
            }
        }
        Ok(())
    }

    /// Pins the experiment kind, rejecting a config written for another one.
    pub fn resolve(mut self, kind: ExperimentKind, out: Option<PathBuf>) -> Result<Self> {
        match self.experiment {
            Some(k) if k != kind => bail!(
                "config is for the {k} experiment; run it with `{}`",
                k.subcommand()
            ),
            _ => self.experiment = Some(kind),
        }
        if out.is_some() {
            self.output_dir = out;
        }
        self.validate()?;
        Ok(self)
    }

    /// The provenance copy: everything except the output location.
    pub fn provenance(&self) -> Self {
        Self {
            output_dir: None,
            ..self.clone()
        }
    }

    pub fn to_pretty_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

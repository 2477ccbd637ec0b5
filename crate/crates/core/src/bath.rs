// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Ohmic spectral density and its discretization into bath modes.
//!
//! A discretized bath is a list of modes `(ω_k, g_k)` with
//! `g_k² = J(ω_k)·w_k`, so that `Σ_k g_k² φ(ω_k)` approximates
//! `∫₀^{ω_max} J(ω) φ(ω) dω` for smooth `φ`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::config;
use crate::math::{exp, sqrt, PI};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Parameters of `J(ω) = 2αω·exp(−ω/ω_c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensityParams {
    /// Dimensionless coupling strength.
    pub alpha: f64,
    /// Cutoff angular frequency [rad/ns].
    pub omega_c: f64,
    /// Qubit angular frequency [rad/ns].
    pub omega_q: f64,
}

impl Default for SpectralDensityParams {
    fn default() -> Self {
        let omega_q = 2.0 * PI * 5.0;
        Self {
            alpha: 0.03,
            omega_c: omega_q,
            omega_q,
        }
    }
}

impl SpectralDensityParams {
    /// Validated constructor. `alpha = 0` is accepted as the uncoupled limit.
    pub fn new(alpha: f64, omega_c: f64, omega_q: f64) -> Result<Self> {
        let p = Self {
            alpha,
            omega_c,
            omega_q,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(config(format!("omega_c must be > 0, got {}", self.omega_c)));
        }
        if !(self.omega_q > 0.0 && self.omega_q.is_finite()) {
            return Err(config(format!("omega_q must be > 0, got {}", self.omega_q)));
        }
        Ok(())
    }

    /// `J(ω)`; see [`spectral_density`].
    pub fn density(&self, omega: f64) -> Result<f64> {
        spectral_density(omega, self)
    }
}

/// Ohmic spectral density with exponential cutoff, `2αω·e^{−ω/ω_c}`.
pub fn spectral_density(omega: f64, params: &SpectralDensityParams) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain {
            what: "omega",
            value: omega,
        });
    }
    Ok(2.0 * params.alpha * omega * exp(-omega / params.omega_c))
}

/// Quadrature used to turn the continuum into modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Scheme {
    /// Equal-width panels on `[0, ω_max]`, one mode at each panel midpoint.
    MidpointLinear,
    /// Gauss–Legendre nodes mapped onto `[0, ω_max]`.
    #[default]
    GaussLegendre,
    /// Modes supplied directly by the caller.
    Explicit,
}

/// One bath oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Angular frequency `ω_k` [rad/ns].
    pub omega: f64,
    /// Coupling `g_k` [rad/ns].
    pub coupling: f64,
}

impl Mode {
    pub fn new(omega: f64, coupling: f64) -> Self {
        Self { omega, coupling }
    }

    /// `ω_k + ω_q`, the rotation rate of the displacement.
    #[inline]
    pub fn renormalized(&self, omega_q: f64) -> f64 {
        self.omega + omega_q
    }

    /// Relaxed displacement `−g_k / (2(ω_k + ω_q))`.
    #[inline]
    pub fn equilibrium(&self, omega_q: f64) -> f64 {
        -self.coupling / (2.0 * self.renormalized(omega_q))
    }
}

/// Fingerprint of a bath, used to tie states to the bath they live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BathId(pub u64);

/// A finite set of modes representing `J(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BathDiscretization {
    modes: Vec<Mode>,
    scheme: Scheme,
    omega_max: f64,
    id: BathId,
}

impl BathDiscretization {
    /// Builds a bath from explicit modes.
    ///
    /// Frequencies must be positive and strictly increasing; couplings must
    /// be finite and non-negative. An empty list is allowed.
    pub fn from_modes(modes: Vec<Mode>) -> Result<Self> {
        let omega_max = modes.last().map_or(0.0, |m| m.omega);
        Self::with_scheme(modes, Scheme::Explicit, omega_max)
    }

    fn with_scheme(modes: Vec<Mode>, scheme: Scheme, omega_max: f64) -> Result<Self> {
        let mut prev = 0.0;
        for (k, m) in modes.iter().enumerate() {
            if !(m.omega > prev && m.omega.is_finite()) {
                return Err(config(format!(
                    "mode {k}: frequencies must be positive and strictly increasing (got {})",
                    m.omega
                )));
            }
            if !(m.coupling >= 0.0 && m.coupling.is_finite()) {
                return Err(config(format!(
                    "mode {k}: coupling must be finite and >= 0 (got {})",
                    m.coupling
                )));
            }
            prev = m.omega;
        }
        let id = fingerprint(&modes);
        Ok(Self {
            modes,
            scheme,
            omega_max,
            id,
        })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn id(&self) -> BathId {
        self.id
    }

    /// `Σ_k g_k² φ(ω_k)`.
    pub fn weighted_sum<F: FnMut(f64) -> f64>(&self, mut phi: F) -> f64 {
        self.modes
            .iter()
            .map(|m| m.coupling * m.coupling * phi(m.omega))
            .sum()
    }

    /// Same frequencies with every coupling multiplied by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(config(format!("coupling scale must be >= 0, got {factor}")));
        }
        let modes = self
            .modes
            .iter()
            .map(|m| Mode::new(m.omega, m.coupling * factor))
            .collect();
        Self::with_scheme(modes, self.scheme, self.omega_max)
    }
}

fn fingerprint(modes: &[Mode]) -> BathId {
    // FNV-1a over the raw bits; stable across runs and platforms.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: f64| {
        for b in x.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    eat(modes.len() as f64);
    for m in modes {
        eat(m.omega);
        eat(m.coupling);
    }
    BathId(h)
}

/// Discretizes `J(ω)` on `[0, omega_max]` with `n_modes` modes.
pub fn discretize(
    params: &SpectralDensityParams,
    n_modes: usize,
    omega_max: f64,
    scheme: Scheme,
) -> Result<BathDiscretization> {
    params.validate()?;
    if n_modes == 0 {
        return Err(config("n_modes must be at least 1"));
    }
    if !(omega_max > 0.0 && omega_max.is_finite()) {
        return Err(config(format!("omega_max must be > 0, got {omega_max}")));
    }
    let nodes: Vec<(f64, f64)> = match scheme {
        Scheme::MidpointLinear => {
            let h = omega_max / n_modes as f64;
            (0..n_modes).map(|i| ((i as f64 + 0.5) * h, h)).collect()
        }
        Scheme::GaussLegendre => GaussLegendre::new(n_modes).mapped(0.0, omega_max).collect(),
        Scheme::Explicit => {
            return Err(config("explicit baths are built with from_modes"));
        }
    };
    let mut modes = Vec::with_capacity(n_modes);
    for (omega, w) in nodes {
        let j = spectral_density(omega, params)?;
        modes.push(Mode::new(omega, sqrt(j * w)));
    }
    BathDiscretization::with_scheme(modes, scheme, omega_max)
}

/// `Σ_k |f_k|²` of the weak-coupling polaron, `Σ_k g_k² / (4(ω_k + ω_q)²)`.
pub fn sum_f2(bath: &BathDiscretization, omega_q: f64) -> f64 {
    bath.weighted_sum(|w| {
        let d = 2.0 * (w + omega_q);
        1.0 / (d * d)
    })
}

/// Serializable description of a discretized Ohmic bath.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct BathSpec {
    pub alpha: f64,
    pub omega_c: f64,
    pub omega_q: f64,
    pub n_modes: usize,
    pub omega_max: f64,
    pub scheme: Scheme,
}

impl Default for BathSpec {
    fn default() -> Self {
        let p = SpectralDensityParams::default();
        Self {
            alpha: p.alpha,
            omega_c: p.omega_c,
            omega_q: p.omega_q,
            n_modes: 2000,
            omega_max: 10.0 * p.omega_c,
            scheme: Scheme::GaussLegendre,
        }
    }
}

impl BathSpec {
    pub fn params(&self) -> Result<SpectralDensityParams> {
        SpectralDensityParams::new(self.alpha, self.omega_c, self.omega_q)
    }

    pub fn build(&self) -> Result<BathDiscretization> {
        discretize(&self.params()?, self.n_modes, self.omega_max, self.scheme)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_closed_form() {
        let p = SpectralDensityParams::default();
        assert_eq!(spectral_density(0.0, &p).unwrap(), 0.0);
        let j = spectral_density(p.omega_c, &p).unwrap();
        assert!((j - 0.06 * p.omega_c * (-1f64).exp()).abs() < 1e-14 * j);
        assert!(matches!(
            spectral_density(-1e-9, &p),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn one_panel_midpoint() {
        let p = SpectralDensityParams::default();
        let wmax = 50.0;
        let b = discretize(&p, 1, wmax, Scheme::MidpointLinear).unwrap();
        assert_eq!(b.len(), 1);
        let m = b.modes()[0];
        assert_eq!(m.omega, wmax / 2.0);
        let want = spectral_density(wmax / 2.0, &p).unwrap() * wmax;
        assert!((m.coupling * m.coupling - want).abs() < 1e-13 * want);
    }

    #[test]
    fn rejects_bad_configuration() {
        let p = SpectralDensityParams::default();
        assert!(matches!(
            discretize(&p, 0, 10.0, Scheme::GaussLegendre),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            discretize(&p, 10, 0.0, Scheme::GaussLegendre),
            Err(Error::Config(_))
        ));
        assert!(SpectralDensityParams::new(-0.1, 1.0, 1.0).is_err());
        assert!(SpectralDensityParams::new(0.1, 0.0, 1.0).is_err());
        assert!(BathDiscretization::from_modes(alloc::vec![
            Mode::new(2.0, 1.0),
            Mode::new(1.0, 1.0)
        ])
        .is_err());
        assert!(BathDiscretization::from_modes(alloc::vec![Mode::new(1.0, -1.0)]).is_err());
    }

    #[test]
    fn sum_f2_edge_cases() {
        let empty = BathDiscretization::from_modes(Vec::new()).unwrap();
        assert_eq!(sum_f2(&empty, 1.0), 0.0);
        let wq = 2.0 * PI * 5.0;
        let one = BathDiscretization::from_modes(alloc::vec![Mode::new(wq, wq)]).unwrap();
        assert!((sum_f2(&one, wq) - 1.0 / 16.0).abs() < 1e-16);
    }

    #[test]
    fn modes_are_increasing_and_deterministic() {
        let spec = BathSpec::default();
        let a = spec.build().unwrap();
        let b = spec.build().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.id(), b.id());
        assert!(a.modes().windows(2).all(|w| w[0].omega < w[1].omega));
        assert!(a.modes().iter().all(|m| m.coupling >= 0.0));
        let c = a.scaled(0.5).unwrap();
        assert_ne!(a.id(), c.id());
    }
}

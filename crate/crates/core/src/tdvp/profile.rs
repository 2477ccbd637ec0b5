// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Switching functions `u(t)` for the qubit–bath coupling.

use alloc::format;
use alloc::vec::Vec;

use crate::error::config;
use crate::math::{powf, round};
use crate::{Error, Result};

/// How tabulated samples are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// Piecewise linear; samples span `[0, t_f]`.
    Linear,
    /// Zero-order hold: sample `i` applies on `[t_i, t_{i+1})`, the last one
    /// up to and including `t_f`.
    Hold,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Constant { value: f64 },
    /// `u(t) = 1 − t/t_f`.
    Linear,
    /// `u(t) = 1 − t^λ / (t^λ + (t_f − t)^λ)`.
    RationalLambda { lambda: f64 },
    Tabulated {
        times: Vec<f64>,
        values: Vec<f64>,
        interpolation: Interpolation,
    },
}

/// A coupling schedule on `[0, t_f]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchProfile {
    kind: ProfileKind,
    duration: f64,
}

fn check_duration(duration: f64) -> Result<()> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(config(format!("duration must be > 0, got {duration}")));
    }
    Ok(())
}

impl SwitchProfile {
    pub fn constant(value: f64, duration: f64) -> Result<Self> {
        check_duration(duration)?;
        if !value.is_finite() {
            return Err(config("constant profile value must be finite"));
        }
        Ok(Self {
            kind: ProfileKind::Constant { value },
            duration,
        })
    }

    pub fn linear(duration: f64) -> Result<Self> {
        check_duration(duration)?;
        Ok(Self {
            kind: ProfileKind::Linear,
            duration,
        })
    }

    /// The smooth family `1 − t^λ/(t^λ + (t_f − t)^λ)`; `λ = 1` is the linear ramp.
    pub fn rational(lambda: f64, duration: f64) -> Result<Self> {
        check_duration(duration)?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(config(format!("lambda must be > 0, got {lambda}")));
        }
        Ok(Self {
            kind: ProfileKind::RationalLambda { lambda },
            duration,
        })
    }

    /// Linearly interpolated samples `(t, u)`; the first time must be 0 and
    /// the last one is the duration.
    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(config("a tabulated profile needs at least two samples"));
        }
        let (times, values) = split_samples(samples)?;
        let duration = *times.last().unwrap_or(&0.0);
        check_duration(duration)?;
        Ok(Self {
            kind: ProfileKind::Tabulated {
                times,
                values,
                interpolation: Interpolation::Linear,
            },
            duration,
        })
    }

    /// Piecewise-constant samples `(t_i, u_i)` held until the next sample;
    /// the last value is held up to `duration`.
    pub fn held_samples(samples: &[(f64, f64)], duration: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(config("a held profile needs at least one sample"));
        }
        let (times, values) = split_samples(samples)?;
        check_duration(duration)?;
        if *times.last().unwrap_or(&0.0) >= duration {
            return Err(config("held samples must start before the duration"));
        }
        Ok(Self {
            kind: ProfileKind::Tabulated {
                times,
                values,
                interpolation: Interpolation::Hold,
            },
            duration,
        })
    }

    /// A zero-order-hold schedule with one value per step of length `dt`.
    pub fn held(dt: f64, values: &[f64]) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(config(format!("dt must be > 0, got {dt}")));
        }
        let samples: Vec<(f64, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, &u)| (i as f64 * dt, u))
            .collect();
        Self::held_samples(&samples, values.len() as f64 * dt)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ProfileKind::Constant { .. } => "constant",
            ProfileKind::Linear => "linear",
            ProfileKind::RationalLambda { .. } => "rational-lambda",
            ProfileKind::Tabulated {
                interpolation: Interpolation::Linear,
                ..
            } => "tabulated",
            ProfileKind::Tabulated {
                interpolation: Interpolation::Hold,
                ..
            } => "tabulated-hold",
        }
    }

    /// `u(t)` for `0 ≤ t ≤ t_f`.
    pub fn value(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.duration;
        if !(t >= -slack && t <= self.duration + slack) {
            return Err(Error::Domain {
                what: "t",
                value: t,
            });
        }
        Ok(self.value_unchecked(t.clamp(0.0, self.duration)))
    }

    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        let tf = self.duration;
        match &self.kind {
            ProfileKind::Constant { value } => *value,
            ProfileKind::Linear => 1.0 - t / tf,
            ProfileKind::RationalLambda { lambda } => {
                let a = powf(t / tf, *lambda);
                let b = powf((tf - t) / tf, *lambda);
                b / (a + b)
            }
            ProfileKind::Tabulated {
                times,
                values,
                interpolation,
            } => {
                // Index of the last sample with times[i] <= t.
                let i = times.partition_point(|&s| s <= t).saturating_sub(1);
                match interpolation {
                    Interpolation::Hold => values[i],
                    Interpolation::Linear => {
                        if i + 1 >= times.len() {
                            return values[times.len() - 1];
                        }
                        let w = (t - times[i]) / (times[i + 1] - times[i]);
                        values[i] + w * (values[i + 1] - values[i])
                    }
                }
            }
        }
    }

    /// Value used by step-based integrators at `t0 + frac·h`.
    ///
    /// Held profiles return the sample active at the step midpoint, so a step
    /// aligned with the hold grid sees a single constant value.
    pub(crate) fn sample_in_step(&self, t0: f64, h: f64, frac: f64) -> f64 {
        let t = match self.kind {
            ProfileKind::Tabulated {
                interpolation: Interpolation::Hold,
                ..
            } => t0 + 0.5 * h,
            _ => t0 + frac * h,
        };
        self.value_unchecked(t.clamp(0.0, self.duration))
    }

    /// Analytic `u̇(t)`, or `None` for tabulated profiles.
    pub fn derivative(&self, t: f64) -> Option<f64> {
        let tf = self.duration;
        match self.kind {
            ProfileKind::Constant { .. } => Some(0.0),
            ProfileKind::Linear => Some(-1.0 / tf),
            ProfileKind::RationalLambda { lambda } => {
                let x = t / tf;
                let y = (tf - t) / tf;
                let a = powf(x, lambda);
                let b = powf(y, lambda);
                let s = a + b;
                Some(-lambda * powf(x, lambda - 1.0) * powf(y, lambda - 1.0) / (tf * s * s))
            }
            ProfileKind::Tabulated { .. } => None,
        }
    }

    /// Whether `u(t_f) = 0` (full decoupling at the end).
    pub fn ends_decoupled(&self) -> bool {
        self.value_unchecked(self.duration).abs() <= 1e-14
    }

    /// Derivatives `u^{(j)}(0)` for `j = 1..=j_max`.
    ///
    /// For integer `λ` they come from the exact power series of
    /// `x^λ / (x^λ + (1 − x)^λ)`, and vanish for `j < λ`. Non-integer `λ`
    /// has a `t^λ` branch point at the origin, so derivatives above `λ` do not
    /// exist and the call fails.
    pub fn start_derivatives(&self, j_max: usize) -> Result<Vec<f64>> {
        let tf = self.duration;
        match self.kind {
            ProfileKind::Linear => {
                let mut d = alloc::vec![0.0; j_max];
                if j_max >= 1 {
                    d[0] = -1.0 / tf;
                }
                Ok(d)
            }
            ProfileKind::RationalLambda { lambda } => {
                let order = round(lambda);
                if (lambda - order).abs() > 1e-12 || order > 64.0 {
                    return Err(Error::UnsupportedProfile {
                        operation: "start_derivatives",
                        kind: "non-integer rational-lambda",
                    });
                }
                Ok(rational_start_derivatives(order as usize, tf, j_max))
            }
            _ => Err(Error::UnsupportedProfile {
                operation: "start_derivatives",
                kind: self.kind_name(),
            }),
        }
    }
}

fn split_samples(samples: &[(f64, f64)]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut times = Vec::with_capacity(samples.len());
    let mut values = Vec::with_capacity(samples.len());
    for (i, &(t, u)) in samples.iter().enumerate() {
        if !(t.is_finite() && u.is_finite()) {
            return Err(config(format!("sample {i} is not finite")));
        }
        if i == 0 && t != 0.0 {
            return Err(config("tabulated samples must start at t = 0"));
        }
        if let Some(&prev) = times.last() {
            if !(t > prev) {
                return Err(config(format!("sample times must increase (sample {i})")));
            }
        }
        times.push(t);
        values.push(u);
    }
    Ok((times, values))
}

/// `u^{(j)}(0)` of `1 − x^L/(x^L + (1−x)^L)`, `x = t/t_f`, `j = 1..=j_max`.
fn rational_start_derivatives(order: usize, tf: f64, j_max: usize) -> Vec<f64> {
    // Denominator D(x) = x^L + (1 − x)^L as a power series (a polynomial).
    let len = j_max + 1;
    let mut denom = alloc::vec![0.0; len.max(order + 1)];
    let mut binom = 1.0;
    for (m, d) in denom.iter_mut().enumerate().take(order + 1) {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        *d = sign * binom;
        binom = binom * (order - m) as f64 / (m + 1) as f64;
    }
    denom[order] += 1.0;
    // Reciprocal series 1/D, D(0) = 1.
    let mut recip = alloc::vec![0.0; len];
    recip[0] = 1.0;
    for m in 1..len {
        let mut acc = 0.0;
        for i in 1..=m.min(denom.len() - 1) {
            acc -= denom[i] * recip[m - i];
        }
        recip[m] = acc;
    }
    let mut out = alloc::vec![0.0; j_max];
    let mut factorial = 1.0;
    let mut scale = 1.0;
    for j in 1..=j_max {
        factorial *= j as f64;
        scale /= tf;
        let coeff = if j >= order { -recip[j - order] } else { 0.0 };
        out[j - 1] = coeff * factorial * scale;
    }
    out
}

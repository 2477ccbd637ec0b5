// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Gauss–Legendre rules and adaptive Gauss–Kronrod integration.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{cos, PI};
use crate::{Error, Result};

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes nodes and weights by Newton iteration on `P_n`.
    ///
    /// Nodes are returned in increasing order.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a Gauss–Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi-style initial guess for the i-th largest root.
            let mut x = cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1e-300) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() && d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// `∫_a^b f` with this rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Returns `(P_n(x), P_n'(x))` from the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Tolerances for [`adaptive_gauss_kronrod`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-15,
            rel: 1e-12,
            max_intervals: 4096,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn kronrod_panel<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Panel {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Panel { a, b, value, error }
}

/// Globally adaptive 15-point Gauss–Kronrod quadrature of a complex integrand.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs, rel·|I|)`. Endpoints are never evaluated,
/// so integrable endpoint singularities are tolerated.
pub fn adaptive_gauss_kronrod<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(crate::error::config("integration limits must be finite"));
    }
    if a == b {
        return Ok(Quadrature {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            intervals: 0,
        });
    }
    let mut panels = alloc::vec![kronrod_panel(&mut f, a, b)];
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= tol.abs.max(tol.rel * value.norm()) {
            return Ok(Quadrature {
                value,
                error_estimate: error,
                intervals: panels.len(),
            });
        }
        if panels.len() >= tol.max_intervals {
            return Err(Error::NoConvergence {
                iterations: panels.len(),
                residual: error,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
                if p.error > acc.1 {
                    (i, p.error)
                } else {
                    acc
                }
            });
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // Panel cannot be split further in floating point.
            return Err(Error::NoConvergence {
                iterations: panels.len() + 1,
                residual: error,
            });
        }
        panels.push(kronrod_panel(&mut f, p.a, m));
        panels.push(kronrod_panel(&mut f, m, p.b));
    }
}

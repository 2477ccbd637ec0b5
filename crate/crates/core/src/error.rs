// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

/// Errors produced by the simulation and control routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    /// Invalid parameters or inconsistent sizes.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Fixed-point iteration ran out of iterations.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The integrator produced NaN or infinity.
    #[error("non-finite displacement at t = {time} ns")]
    NonFinite { time: f64 },

    /// An operation was called on input that breaks its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The switching profile kind cannot be used by this operation.
    #[error("{operation} does not support {kind} profiles")]
    UnsupportedProfile {
        operation: &'static str,
        kind: &'static str,
    },

    /// Riccati denominator `R + BᵀPB` was not positive.
    #[error("Riccati denominator {value:e} is not positive at step {step}")]
    IllConditioned { step: usize, value: f64 },

    /// Vector or matrix lengths do not agree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    /// A truncated representation lost too much weight.
    #[error("truncation error {error:e} exceeds {threshold:e}")]
    Truncation { error: f64, threshold: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

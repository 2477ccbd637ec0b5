// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Polaron dynamics and decoupling protocols for dissipative qubit reset.
//!
//! A qubit coupled to an Ohmic bosonic environment relaxes to a polaron
//! state that keeps a finite excited-state population. The coupling is
//! controlled by a scalar factor `u(t)`; switching it off smoothly (or
//! optimally) unwinds the bath displacements and suppresses that residual.
//!
//! The crate is `no_std` and only needs `alloc`:
//!
//! * [`bath`] discretizes the spectral density into a finite set of modes,
//! * [`polaron`] computes the variational ground state, its population,
//!   energy and correlation profile,
//! * [`tdvp`] propagates the displacements under a switching profile and
//!   evaluates the closed-form final displacements,
//! * [`lqr`] synthesizes the optimal decoupling control by backward Riccati
//!   recursion,
//! * [`oracle`] propagates a few-mode truncated spin-boson model exactly,
//!   used to validate the variational dynamics.
//!
//! Units: angular frequencies in rad/ns, times in ns.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bath;
mod error;
pub mod lqr;
mod math;
pub mod oracle;
pub mod polaron;
pub mod quadrature;
pub mod tdvp;

pub use error::{Error, Result};
pub use num_complex::Complex64;

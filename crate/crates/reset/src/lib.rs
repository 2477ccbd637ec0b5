// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner for `polaron-reset-core`: JSON configuration, CSV and
//! JSON outputs, and the `polaron-reset` command-line tool.

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::run;

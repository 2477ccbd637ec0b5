// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! The four experiments behind the CLI subcommands.

use std::path::Path;

use anyhow::{Context, Result};
use polaron_reset_core::bath::{sum_f2, BathSpec};
use polaron_reset_core::lqr::{evaluate_on_fine_bath, optimize};
use polaron_reset_core::oracle::{compare_with_tdvp, oracle_bath};
use polaron_reset_core::polaron::{
    excited_population, fixed_point_residual, ground_state, GroundStateOptions, PolaronState,
};
use polaron_reset_core::tdvp::{
    evolve, run_decoupling, EvolveOptions, ExperimentOptions, SwitchProfile, Tracking,
    TrajectoryRecord,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::{read_schedule, OutputDir};

fn log10(p: f64) -> Option<f64> {
    (p > 0.0).then(|| p.log10())
}

/// Runs whichever experiment `config` is resolved to.
pub fn run(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let dir = OutputDir::create(out, config)?;
    match config.experiment.unwrap_or(ExperimentKind::GroundState) {
        ExperimentKind::GroundState => ground_state_run(config, &dir),
        ExperimentKind::DecoupleSweep => decouple(config, &dir),
        ExperimentKind::LqrOptimize => lqr(config, &dir),
        ExperimentKind::OracleValidate => validate(config, &dir),
    }
}

#[derive(Debug, Serialize)]
pub struct SelfConsistentSummary {
    pub sum_f2: f64,
    pub p_plus: f64,
    pub log10_p_plus: Option<f64>,
    pub max_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct GroundStateSummary {
    pub n_modes: usize,
    pub sum_f2: f64,
    pub p_plus: f64,
    pub log10_p_plus: Option<f64>,
    pub self_consistent: Option<SelfConsistentSummary>,
}

fn ground_state_run(config: &ExperimentConfig, dir: &OutputDir) -> Result<()> {
    let spec = &config.bath;
    let bath = spec.build()?;
    let weak = ground_state(&bath, spec.omega_q, GroundStateOptions::default())?;
    let sc = if config.ground_state.self_consistent {
        Some(ground_state(&bath, spec.omega_q, GroundStateOptions::self_consistent())?)
    } else {
        None
    };
    let p = excited_population(&weak);
    let summary = GroundStateSummary {
        n_modes: bath.len(),
        sum_f2: sum_f2(&bath, spec.omega_q),
        p_plus: p,
        log10_p_plus: log10(p),
        self_consistent: sc.as_ref().map(|s| {
            let p = excited_population(s);
            SelfConsistentSummary {
                sum_f2: s.sum_sq(),
                p_plus: p,
                log10_p_plus: log10(p),
                max_residual: fixed_point_residual(s, &bath, spec.omega_q),
            }
        }),
    };
    let rows = bath.modes().iter().enumerate().map(|(k, m)| {
        let f = weak.displacements()[k].re;
        let mut row = vec![m.omega, m.coupling, f, m.coupling * f];
        if let Some(s) = &sc {
            row.push(s.displacements()[k].re);
        }
        row
    });
    let mut cols = vec!["omega_rad_per_ns", "coupling_rad_per_ns", "f_k", "g_k_f_k_rad_per_ns"];
    if sc.is_some() {
        cols.push("f_k_self_consistent");
    }
    dir.write_csv("spectrum.csv", &[], &cols, rows)?;
    dir.write_summary(config, &summary)
}

fn write_trajectory(
    dir: &OutputDir,
    name: &str,
    record: &TrajectoryRecord,
    bath_omegas: &[f64],
    extra: &[String],
) -> Result<()> {
    let mut cols: Vec<String> = vec!["t_ns".into(), "u".into(), "p_plus".into()];
    for &k in &record.tracked_modes {
        let w = bath_omegas[k];
        cols.push(format!("re_f_at_{w:.6}_rad_per_ns"));
        cols.push(format!("im_f_at_{w:.6}_rad_per_ns"));
    }
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let rows = (0..record.times.len()).map(|i| {
        let mut row = vec![record.times[i], record.u_values[i], record.populations[i]];
        for f in &record.snapshots[i] {
            row.push(f.re);
            row.push(f.im);
        }
        row
    });
    dir.write_csv(name, extra, &col_refs, rows)
}

#[derive(Debug, Serialize)]
pub struct DecoupleEntry {
    pub profile: String,
    pub lambda: Option<f64>,
    pub duration: f64,
    pub initial_p_plus: f64,
    pub final_p_plus: f64,
    pub log10_final_p_plus: Option<f64>,
    pub trajectory_file: String,
    pub spectrum_file: String,
}

enum Curve {
    Rational(f64),
    Table(String, SwitchProfile),
}

fn decouple(config: &ExperimentConfig, dir: &OutputDir) -> Result<()> {
    let spec = &config.bath;
    let d = &config.decouple;
    let bath = spec.build()?;
    let omegas: Vec<f64> = bath.modes().iter().map(|m| m.omega).collect();
    let mut curves: Vec<Curve> = d.lambdas.iter().map(|&l| Curve::Rational(l)).collect();
    for (i, path) in d.tabulated.iter().enumerate() {
        let label = format!("tabulated_{i}");
        curves.push(Curve::Table(label, read_schedule(path)?));
    }
    let opts = ExperimentOptions {
        dt: d.dt,
        full_nonlinear: d.full_nonlinear,
        probe_frequencies: d.probe_frequencies.clone(),
    };
    let results: Vec<Result<DecoupleEntry>> = curves
        .par_iter()
        .map(|curve| -> Result<DecoupleEntry> {
            let (label, lambda, record) = match curve {
                Curve::Rational(l) => {
                    let profile = SwitchProfile::rational(*l, d.duration)?;
                    let run = run_decoupling(&bath, spec.omega_q, &profile, &opts)
                        .with_context(|| format!("lambda = {l}"))?;
                    (format!("lambda_{l}"), Some(*l), run.record)
                }
                Curve::Table(label, profile) => {
                    // Open-loop replay from the relaxed state; the schedule may
                    // start anywhere.
                    let initial = relaxed(&bath, spec, d.full_nonlinear)?;
                    let record = evolve(
                        &initial,
                        &bath,
                        spec.omega_q,
                        profile,
                        &EvolveOptions {
                            dt: d.dt,
                            full_nonlinear: d.full_nonlinear,
                            tracking: Tracking::None,
                            record_energy: false,
                        },
                    )?;
                    (label.clone(), None, record)
                }
            };
            let traj = format!("trajectory_{label}.csv");
            let spec_file = format!("final_spectrum_{label}.csv");
            write_trajectory(dir, &traj, &record, &omegas, &[])?;
            let rows = bath
                .modes()
                .iter()
                .zip(record.final_state.displacements())
                .map(|(m, f)| vec![m.omega, f.norm()]);
            dir.write_csv(&spec_file, &[], &["omega_rad_per_ns", "abs_f_final"], rows)?;
            let p = record.final_population();
            Ok(DecoupleEntry {
                profile: label,
                lambda,
                duration: record.times.last().copied().unwrap_or(0.0),
                initial_p_plus: record.populations[0],
                final_p_plus: p,
                log10_final_p_plus: log10(p),
                trajectory_file: traj,
                spectrum_file: spec_file,
            })
        })
        .collect();
    let entries = results.into_iter().collect::<Result<Vec<_>>>()?;
    dir.write_csv(
        "sweep.csv",
        &[],
        &["lambda", "log10_final_p_plus"],
        entries
            .iter()
            .filter_map(|e| Some(vec![e.lambda?, e.log10_final_p_plus.unwrap_or(f64::NEG_INFINITY)])),
    )?;
    dir.write_summary(config, &entries)
}

fn relaxed(
    bath: &polaron_reset_core::bath::BathDiscretization,
    spec: &BathSpec,
    self_consistent: bool,
) -> Result<PolaronState> {
    let opts = if self_consistent {
        GroundStateOptions::self_consistent()
    } else {
        GroundStateOptions::default()
    };
    Ok(ground_state(bath, spec.omega_q, opts)?)
}

#[derive(Debug, Serialize)]
pub struct LqrEntry {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "R_continuous")]
    pub r_continuous: f64,
    pub n_modes: usize,
    pub dt: f64,
    pub terminal_cost: f64,
    pub control_cost: f64,
    #[serde(rename = "final_P_plus")]
    pub final_p_plus: f64,
    pub log10_final_p_plus: Option<f64>,
    pub zero_crossings: usize,
    pub fine_bath_n_modes: Option<usize>,
    #[serde(rename = "fine_bath_final_P_plus")]
    pub fine_bath_final_p_plus: Option<f64>,
    pub control_file: String,
    pub trajectory_file: String,
}

fn lqr(config: &ExperimentConfig, dir: &OutputDir) -> Result<()> {
    let l = &config.lqr;
    let coarse_spec = BathSpec {
        n_modes: l.n_modes_coarse,
        ..config.bath
    };
    let coarse = coarse_spec.build()?;
    let fine = if l.replay_on_fine_bath {
        Some(config.bath.build()?)
    } else {
        None
    };
    let wq = config.bath.omega_q;
    let results: Vec<Result<LqrEntry>> = l
        .r_values
        .par_iter()
        .map(|&r| -> Result<LqrEntry> {
            let sol = optimize(&coarse, wq, l.dt, l.duration, r).with_context(|| format!("R = {r}"))?;
            let label = format!("R_{r:e}");
            let control_file = format!("control_{label}.csv");
            let trajectory_file = format!("trajectory_{label}.csv");
            dir.write_csv(
                &control_file,
                &["interpolation: hold".into(), format!("duration_ns: {}", crate::output::number(l.duration))],
                &["t_ns", "u"],
                sol.controls
                    .iter()
                    .enumerate()
                    .map(|(i, &u)| vec![i as f64 * l.dt, u]),
            )?;
            dir.write_csv(
                &trajectory_file,
                &[],
                &["t_ns", "u", "p_plus"],
                sol.states.iter().enumerate().map(|(i, x)| {
                    let u = sol.controls.get(i).copied().unwrap_or(f64::NAN);
                    let s: f64 = x.iter().map(|v| v * v).sum();
                    let t = if i == sol.controls.len() { l.duration } else { i as f64 * l.dt };
                    vec![t, u, polaron_reset_core::polaron::population_from_sum(s)]
                }),
            )?;
            let fine_p = match &fine {
                Some(b) => Some(evaluate_on_fine_bath(&sol.controls, b, wq, l.dt)?),
                None => None,
            };
            let p = sol.final_population();
            Ok(LqrEntry {
                r,
                r_continuous: sol.r_continuous(),
                n_modes: coarse.len(),
                dt: l.dt,
                terminal_cost: sol.cost.terminal,
                control_cost: sol.cost.control,
                final_p_plus: p,
                log10_final_p_plus: log10(p),
                zero_crossings: sol.zero_crossings(),
                fine_bath_n_modes: fine.as_ref().map(|b| b.len()),
                fine_bath_final_p_plus: fine_p,
                control_file,
                trajectory_file,
            })
        })
        .collect();
    let entries = results.into_iter().collect::<Result<Vec<_>>>()?;
    dir.write_summary(config, &entries)
}

#[derive(Debug, Serialize)]
pub struct OracleEntry {
    pub coupling_scale: f64,
    pub target_sum_f2: f64,
    pub exact_final_p_plus: f64,
    pub tdvp_final_p_plus: f64,
    pub relative_discrepancy: f64,
    pub displacement_tracking: f64,
    pub max_top_level_population: f64,
    pub norm_drift: f64,
    pub valid: bool,
}

#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub runs: Vec<OracleEntry>,
    /// Discrepancy strictly decreases along `coupling_scales` (when they decrease).
    pub monotone: bool,
    pub all_valid: bool,
}

fn validate(config: &ExperimentConfig, dir: &OutputDir) -> Result<()> {
    let o = &config.oracle;
    let spec = &config.bath;
    let profile = SwitchProfile::rational(o.lambda, o.duration)?;
    let results: Vec<Result<OracleEntry>> = o
        .coupling_scales
        .par_iter()
        .enumerate()
        .map(|(i, &scale)| -> Result<OracleEntry> {
            let target = o.target_sum_f2 * scale * scale;
            let bath = oracle_bath(spec.omega_c, spec.omega_q, o.n_modes, target)?;
            let cmp = compare_with_tdvp(&bath, spec.omega_q, &profile, o.cutoff, o.dt)
                .with_context(|| format!("coupling scale {scale}"))?;
            let omegas: Vec<f64> = bath.modes().iter().map(|m| m.omega).collect();
            let note = [format!("coupling_scale: {}", crate::output::number(scale))];
            write_trajectory(dir, &format!("tdvp_trajectory_{i}.csv"), &cmp.tdvp, &omegas, &note)?;
            let ex = &cmp.exact;
            let mut cols = vec!["t_ns".to_owned(), "u".into(), "p_plus".into()];
            for w in &omegas {
                cols.push(format!("re_sigma_z_b_at_{w:.6}_rad_per_ns"));
                cols.push(format!("im_sigma_z_b_at_{w:.6}_rad_per_ns"));
            }
            let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
            dir.write_csv(
                &format!("exact_trajectory_{i}.csv"),
                &note,
                &col_refs,
                (0..ex.times.len()).map(|j| {
                    let mut row = vec![ex.times[j], ex.u_values[j], ex.populations[j]];
                    for b in &ex.displacements[j] {
                        row.push(b.re);
                        row.push(b.im);
                    }
                    row
                }),
            )?;
            Ok(OracleEntry {
                coupling_scale: scale,
                target_sum_f2: target,
                exact_final_p_plus: cmp.exact_final_population,
                tdvp_final_p_plus: cmp.tdvp_final_population,
                relative_discrepancy: cmp.relative_discrepancy,
                displacement_tracking: cmp.displacement_tracking,
                max_top_level_population: ex.max_leakage,
                norm_drift: ex.norm_drift,
                valid: cmp.valid,
            })
        })
        .collect();
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;
    let monotone = runs.windows(2).all(|w| {
        w[1].coupling_scale >= w[0].coupling_scale
            || w[1].relative_discrepancy < w[0].relative_discrepancy
            || (w[0].relative_discrepancy == 0.0 && w[1].relative_discrepancy == 0.0)
    });
    let all_valid = runs.iter().all(|r| r.valid);
    dir.write_summary(
        config,
        &OracleSummary {
            runs,
            monotone,
            all_valid,
        },
    )
}

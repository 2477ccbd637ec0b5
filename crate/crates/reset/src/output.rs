// Copyright 2026 The polaron-reset Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON files with an embedded provenance block.
//!
//! CSV files start with `#`-prefixed lines holding the resolved config as
//! pretty JSON, then one header row, then comma-separated values printed with
//! 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use polaron_reset_core::tdvp::SwitchProfile;
use serde::Serialize;

use crate::config::ExperimentConfig;

/// Formats `x` with 17 significant digits.
pub fn number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    format!("{x:.16e}")
}

/// Output directory for one experiment run.
pub struct OutputDir {
    root: PathBuf,
    header: String,
}

impl OutputDir {
    pub fn create(root: &Path, config: &ExperimentConfig) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        let mut header = String::from("# polaron-reset output\n# resolved config:\n");
        for line in config.provenance().to_pretty_json().lines() {
            writeln!(header, "# {line}").unwrap();
        }
        let out = Self {
            root: root.to_owned(),
            header,
        };
        out.write_text("config.json", &(config.provenance().to_pretty_json() + "\n"))?;
        Ok(out)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn write_text(&self, name: &str, text: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// Writes a CSV. `extra` lines go after the config block, before the
    /// column header.
    pub fn write_csv(
        &self,
        name: &str,
        extra: &[String],
        columns: &[&str],
        rows: impl IntoIterator<Item = Vec<f64>>,
    ) -> Result<()> {
        let mut text = self.header.clone();
        for e in extra {
            writeln!(text, "# {e}").unwrap();
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.into_iter().map(number).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        self.write_text(name, &text)
    }

    /// Writes `summary.json` as `{"config": …, "results": …}`.
    pub fn write_summary<T: Serialize>(&self, config: &ExperimentConfig, results: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Summary<'a, T> {
            config: ExperimentConfig,
            results: &'a T,
        }
        let s = Summary {
            config: config.provenance(),
            results,
        };
        self.write_text("summary.json", &(serde_json::to_string_pretty(&s)? + "\n"))
    }
}

/// Reads a `t_ns,u` schedule written by the `lqr` subcommand or by hand.
///
/// `#` lines are comments, except `# interpolation: hold|linear` and
/// `# duration_ns: <T>`. Held schedules need the duration; linear ones end
/// at their last sample.
pub fn read_schedule(path: &Path) -> Result<SwitchProfile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading schedule {}", path.display()))?;
    parse_schedule(&text).with_context(|| format!("parsing schedule {}", path.display()))
}

pub fn parse_schedule(text: &str) -> Result<SwitchProfile> {
    let mut hold = false;
    let mut duration = None;
    let mut samples = Vec::new();
    let mut saw_header = false;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            if let Some(v) = c.strip_prefix("interpolation:") {
                hold = match v.trim() {
                    "hold" => true,
                    "linear" => false,
                    other => bail!("line {}: unknown interpolation {other:?}", n + 1),
                };
            } else if let Some(v) = c.strip_prefix("duration_ns:") {
                duration = Some(v.trim().parse::<f64>().with_context(|| format!("line {}", n + 1))?);
            }
            continue;
        }
        if !saw_header {
            saw_header = true;
            if line.starts_with(|c: char| c.is_ascii_alphabetic()) {
                continue;
            }
        }
        let mut cells = line.split(',');
        let mut next = || -> Result<f64> {
            let cell = cells
                .next()
                .ok_or_else(|| anyhow!("line {}: expected two columns", n + 1))?;
            cell.trim()
                .parse::<f64>()
                .with_context(|| format!("line {}: bad number {cell:?}", n + 1))
        };
        samples.push((next()?, next()?));
    }
    let profile = if hold {
        let d = duration.ok_or_else(|| anyhow!("held schedules need a `# duration_ns:` line"))?;
        SwitchProfile::held_samples(&samples, d)?
    } else {
        SwitchProfile::tabulated(&samples)?
    };
    Ok(profile)
}

// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Config-driven front end for the `chargeq` simulator.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::Path;

use config::RunConfig;
use error::{CliError, CliResult};
use output::{render_csv, render_json, write_atomic, OutputFormat};

/// Rendered output of a run together with any failure to report after it
/// has been written.
pub struct Rendered {
    pub text: String,
    pub failure: Option<CliError>,
}

/// Validates, computes and renders `config`. Relative paths inside the
/// config resolve against `base_dir`.
pub fn render(config: &RunConfig, base_dir: &Path) -> CliResult<Rendered> {
    let resolved = config.resolve()?;
    let job = commands::prepare(&resolved, base_dir)?;
    let hash = resolved.hash();
    let report = job.run()?;
    let text = match config.format() {
        OutputFormat::Csv => render_csv(&report.table, &hash),
        OutputFormat::Json => render_json(&report.table, config.command.as_str(), &hash),
    };
    Ok(Rendered {
        text,
        failure: report.failure,
    })
}

/// Runs `config`, writing to its output path or to stdout.
pub fn execute(config: &RunConfig, base_dir: &Path) -> CliResult<()> {
    let output = config.output.as_ref().map(|p| base_dir.join(p));
    if let Some(path) = &output {
        let parent = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        if !parent.is_dir() {
            return Err(CliError::Config(format!(
                "output directory {} does not exist",
                parent.display()
            )));
        }
    }
    let rendered = render(config, base_dir)?;
    match &output {
        Some(path) => write_atomic(path, &rendered.text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(rendered.text.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    rendered.failure.map_or(Ok(()), Err)
}

/// Loads a config file; relative paths in it resolve against its directory.
pub fn execute_file(path: &Path) -> CliResult<()> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let config = RunConfig::from_json(&text)?;
    let base = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    execute(&config, base)
}

/// Sizes the global thread pool from `CHARGEQ_THREADS` when it is set.
pub fn configure_threads(value: Option<&str>) -> CliResult<()> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("CHARGEQ_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size thread pool: {e}")))
}

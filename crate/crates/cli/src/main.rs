// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use chargeq_cli::config::{CommandName, RunConfig};
use chargeq_cli::error::CliResult;
use chargeq_cli::output::OutputFormat;
use chargeq_cli::{configure_threads, execute, execute_file};

/// Charge-qubit simulation toolkit.
///
/// Thread count can be pinned with CHARGEQ_THREADS. Exit status is 0 on
/// success, 1 for configuration errors and 2 when a numerical procedure
/// does not converge.
#[derive(Parser)]
#[command(name = "chargeq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON config file
    Run { config: PathBuf },
    /// Eigenvalues along a detuning sweep
    Spectrum(Flags<SpectrumArgs>),
    /// Noise-averaged fidelity of a single gate
    Gate(Flags<GateArgs>),
    /// Infidelity against σε for the bare and composite gates
    Sweep(Flags<SweepArgs>),
    /// Rotating-frame relaxation rate
    T1rho(Flags<T1rhoArgs>),
    /// Detuning noise from point-charge fluctuators
    Geometry(Flags<GeometryArgs>),
    /// Fit gate parameters to a target rotation
    Calibrate(Flags<CalibrateArgs>),
    /// Population transfer of the pulsed CNOT
    Twoqubit(Flags<TwoQubitArgs>),
}

#[derive(Args)]
struct Flags<T: Args> {
    #[command(flatten)]
    params: T,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    /// cq or cd
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    qubit: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_d_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_a_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_b_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_ghz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_min_ghz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_max_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<usize>,
}

#[derive(Args, Serialize)]
struct NoiseArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    range_sigmas: Option<f64>,
    /// correlated or independent
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    correlation: Option<String>,
}

#[derive(Args, Serialize)]
struct GateArgs {
    /// bare_xpi_cd, bare_xpi_cq or composite_xpi_cq
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gate: Option<String>,
    /// JSON schedule document
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule_file: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    qubit: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tunnel_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_eps_ghz: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    /// Comma-separated σε values
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_eps_ghz: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_min_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_max_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tunnel_ghz: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
}

#[derive(Args, Serialize)]
struct T1rhoArgs {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_ac_ghz: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    s_z_amplitude: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    s_x_amplitude: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_min_rad_per_ns: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sweet_spot: Option<bool>,
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y but got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok([p(x)?, p(y)?])
}

#[derive(Args, Serialize)]
struct GeometryArgs {
    /// Dot position as x,y in nm; give exactly three times
    #[arg(long = "dot-nm", value_parser = parse_point, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dots_nm: Option<Vec<[f64; 2]>>,
    /// Fluctuator position as x,y in nm; repeatable
    #[arg(long = "fluctuator-nm", value_parser = parse_point, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    fluctuators_nm: Option<Vec<[f64; 2]>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon_r: Option<f64>,
}

#[derive(Args, Serialize)]
struct CalibrateArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    qubit: Option<String>,
    /// x or z
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    target_axis: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    target_angle_rad: Option<f64>,
    /// x_duration, z_duration or x_duration_coupling
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_ghz: Option<f64>,
    /// Bound as lo,hi; one per parameter
    #[arg(long = "bound", value_parser = parse_point)]
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<Vec<[f64; 2]>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
}

#[derive(Args, Serialize)]
struct TwoQubitArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t2_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    j_ghz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    far_detuning_ghz: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    enforce_constraints: Option<bool>,
}

fn from_flags<T: Args + Serialize>(command: CommandName, flags: Flags<T>) -> RunConfig {
    RunConfig {
        command,
        output: flags.out.output,
        format: flags.out.format,
        params: serde_json::to_value(&flags.params).expect("flags serialise"),
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    configure_threads(std::env::var("CHARGEQ_THREADS").ok().as_deref())?;
    let config = match cli.command {
        Command::Run { config } => return execute_file(&config),
        Command::Spectrum(f) => from_flags(CommandName::Spectrum, f),
        Command::Gate(f) => from_flags(CommandName::Gate, f),
        Command::Sweep(f) => from_flags(CommandName::Sweep, f),
        Command::T1rho(f) => from_flags(CommandName::T1rho, f),
        Command::Geometry(f) => from_flags(CommandName::Geometry, f),
        Command::Calibrate(f) => from_flags(CommandName::Calibrate, f),
        Command::Twoqubit(f) => from_flags(CommandName::Twoqubit, f),
    };
    execute(&config, std::path::Path::new("."))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chargeq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

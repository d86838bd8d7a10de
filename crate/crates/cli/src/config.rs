// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Run configuration documents.
//!
//! A run is one JSON object with a `command`, an optional `output` path and
//! `format`, and a flat `params` block whose keys carry their units
//! (`_ghz`, `_ns`, `_nm`). Missing parameters take their documented
//! defaults; unknown keys are rejected.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use chargeq::noise::{Correlation, DEFAULT_GRID_N, DEFAULT_KAPPA, DEFAULT_OMEGA_MIN, DEFAULT_RANGE_SIGMAS};
use chargeq::spectrum::QubitKind;
use chargeq::tomography::GateKind;

use crate::error::{CliError, CliResult};
use crate::output::{sha256_hex, OutputFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Spectrum,
    Gate,
    Sweep,
    T1rho,
    Geometry,
    Calibrate,
    Twoqubit,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Spectrum => "spectrum",
            CommandName::Gate => "gate",
            CommandName::Sweep => "sweep",
            CommandName::T1rho => "t1rho",
            CommandName::Geometry => "geometry",
            CommandName::Calibrate => "calibrate",
            CommandName::Twoqubit => "twoqubit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(default = "empty_object")]
    pub params: serde_json::Value,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))
    }

    /// Output format, defaulting to JSON for `calibrate` and CSV otherwise.
    pub fn format(&self) -> OutputFormat {
        self.format.unwrap_or(match self.command {
            CommandName::Calibrate => OutputFormat::Json,
            _ => OutputFormat::Csv,
        })
    }

    pub fn resolve(&self) -> CliResult<CommandConfig> {
        CommandConfig::parse(self.command, &self.params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub qubit: QubitKind,
    pub eps_d_ghz: f64,
    pub t_a_ghz: f64,
    pub t_b_ghz: f64,
    /// Double-dot tunnel coupling.
    pub t_ghz: f64,
    /// Range of the swept detuning: `eps_q` for the triple dot, `eps_d` for
    /// the double dot.
    pub sweep_min_ghz: f64,
    pub sweep_max_ghz: f64,
    pub points: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            qubit: QubitKind::Cq,
            eps_d_ghz: 0.0,
            t_a_ghz: 2.5,
            t_b_ghz: 2.5,
            t_ghz: 2.5,
            sweep_min_ghz: -20.0,
            sweep_max_ghz: 20.0,
            points: 401,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateConfig {
    pub gate: Option<GateKind>,
    /// Schedule document; relative paths resolve against the config file.
    pub schedule_file: Option<PathBuf>,
    /// Kind assumed for an empty schedule document.
    pub qubit: Option<QubitKind>,
    pub tunnel_ghz: f64,
    pub sigma_eps_ghz: f64,
    pub kappa: f64,
    pub grid_n: usize,
    pub range_sigmas: f64,
    pub correlation: Correlation,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            gate: None,
            schedule_file: None,
            qubit: None,
            tunnel_ghz: 10.0,
            sigma_eps_ghz: 0.1,
            kappa: DEFAULT_KAPPA,
            grid_n: DEFAULT_GRID_N,
            range_sigmas: DEFAULT_RANGE_SIGMAS,
            correlation: Correlation::Correlated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Explicit list; when absent the grid is log-spaced from
    /// `sigma_min_ghz` to `sigma_max_ghz`.
    pub sigma_eps_ghz: Option<Vec<f64>>,
    pub sigma_min_ghz: f64,
    pub sigma_max_ghz: f64,
    pub points: usize,
    pub tunnel_ghz: f64,
    pub kappa: f64,
    pub grid_n: usize,
    pub range_sigmas: f64,
    pub correlation: Correlation,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sigma_eps_ghz: None,
            sigma_min_ghz: 1e-3,
            sigma_max_ghz: 1.0,
            points: 13,
            tunnel_ghz: 10.0,
            kappa: DEFAULT_KAPPA,
            grid_n: DEFAULT_GRID_N,
            range_sigmas: DEFAULT_RANGE_SIGMAS,
            correlation: Correlation::Correlated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct T1rhoConfig {
    pub eps_ac_ghz: Vec<f64>,
    pub t_ghz: f64,
    /// Amplitude `A` of `S_z(ω) = A/ω`.
    pub s_z_amplitude: f64,
    pub s_x_amplitude: f64,
    pub omega_min_rad_per_ns: f64,
    pub sweet_spot: bool,
}

impl Default for T1rhoConfig {
    fn default() -> Self {
        Self {
            eps_ac_ghz: vec![0.1, 0.2, 0.5, 1.0, 2.0],
            t_ghz: 2.0,
            s_z_amplitude: 1.0,
            s_x_amplitude: 1.0,
            omega_min_rad_per_ns: DEFAULT_OMEGA_MIN,
            sweet_spot: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub dots_nm: [[f64; 2]; 3],
    pub fluctuators_nm: Vec<[f64; 2]>,
    pub epsilon_r: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            dots_nm: [[-200.0, 0.0], [0.0, 0.0], [200.0, 0.0]],
            fluctuators_nm: vec![[-1000.0, 0.0], [-2000.0, 0.0], [-3000.0, 0.0]],
            epsilon_r: chargeq::geometry::EPS_R_SI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Z,
}

/// Parametrised schedules searched by `calibrate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateFamily {
    /// One X segment at coupling `fixed_ghz`; free duration.
    XDuration,
    /// One Z segment at detuning `fixed_ghz`; free duration.
    ZDuration,
    /// One X segment; free duration and coupling.
    XDurationCoupling,
}

impl GateFamily {
    pub fn parameter_count(self) -> usize {
        match self {
            GateFamily::XDuration | GateFamily::ZDuration => 1,
            GateFamily::XDurationCoupling => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateFamily::XDuration => "x_duration",
            GateFamily::ZDuration => "z_duration",
            GateFamily::XDurationCoupling => "x_duration_coupling",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateConfig {
    pub qubit: QubitKind,
    pub target_axis: Axis,
    pub target_angle_rad: f64,
    pub family: GateFamily,
    pub fixed_ghz: f64,
    pub bounds: Vec<[f64; 2]>,
    pub initial: Vec<f64>,
    pub tolerance: f64,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        Self {
            qubit: QubitKind::Cq,
            target_axis: Axis::X,
            target_angle_rad: std::f64::consts::PI,
            family: GateFamily::XDuration,
            fixed_ghz: 1.0,
            bounds: vec![[0.05, 0.5]],
            initial: vec![0.1],
            tolerance: chargeq::calibrate::DEFAULT_OBJECTIVE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoQubitConfig {
    pub t2_ghz: f64,
    pub j_ghz: f64,
    pub far_detuning_ghz: f64,
    /// Reject couplings below `10·t2`.
    pub enforce_constraints: bool,
}

impl Default for TwoQubitConfig {
    fn default() -> Self {
        Self {
            t2_ghz: 1.0,
            j_ghz: 10.0,
            far_detuning_ghz: -1000.0,
            enforce_constraints: true,
        }
    }
}

/// Parameters of a run with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", content = "params", rename_all = "lowercase")]
pub enum CommandConfig {
    Spectrum(SpectrumConfig),
    Gate(GateConfig),
    Sweep(SweepConfig),
    T1rho(T1rhoConfig),
    Geometry(GeometryConfig),
    Calibrate(CalibrateConfig),
    Twoqubit(TwoQubitConfig),
}

fn parse_params<T: DeserializeOwned>(command: CommandName, params: &serde_json::Value) -> CliResult<T> {
    if !params.is_object() {
        return Err(CliError::Config(format!(
            "{}: params must be a JSON object",
            command.as_str()
        )));
    }
    serde_json::from_value(params.clone()).map_err(|e| CliError::Config(format!("{}: {e}", command.as_str())))
}

impl CommandConfig {
    pub fn parse(command: CommandName, params: &serde_json::Value) -> CliResult<Self> {
        Ok(match command {
            CommandName::Spectrum => CommandConfig::Spectrum(parse_params(command, params)?),
            CommandName::Gate => CommandConfig::Gate(parse_params(command, params)?),
            CommandName::Sweep => CommandConfig::Sweep(parse_params(command, params)?),
            CommandName::T1rho => CommandConfig::T1rho(parse_params(command, params)?),
            CommandName::Geometry => CommandConfig::Geometry(parse_params(command, params)?),
            CommandName::Calibrate => CommandConfig::Calibrate(parse_params(command, params)?),
            CommandName::Twoqubit => CommandConfig::Twoqubit(parse_params(command, params)?),
        })
    }

    /// SHA-256 of the canonical (sorted-key) JSON of the resolved config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_value(self).expect("config serialises");
        sha256_hex(canonical.to_string().as_bytes())
    }
}

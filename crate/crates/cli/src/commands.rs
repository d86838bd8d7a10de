// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Validated jobs built from a resolved config, and their execution.
//!
//! [`prepare`] performs every check that can fail on bad input, so a job
//! that reaches [`Job::run`] only fails for numerical reasons.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use chargeq::calibrate::{
    calibrate_gate, rotation_x, rotation_z, sensitivity_coefficient, CalibrationProblem, SensitivityOrder,
};
use chargeq::dynamics::{gate_x, gate_z, PulseSchedule, PulseSegment, ScheduleDocument};
use chargeq::geometry::{coulomb_constant, monopole_detunings, Fluctuator, TripleDotGeometry};
use chargeq::model::{h_cd, h_cq_position, CdParams, CqParams};
use chargeq::noise::{t1rho_terms, QuasistaticNoiseModel, SpectralDensity};
use chargeq::qmath::herm_eigenvalues;
use chargeq::spectrum::QubitKind;
use chargeq::tomography::{gate_infidelity, process_of_schedule, GateKind};
use chargeq::twoqubit::{
    cnot_protocol, cnot_protocol_unchecked, population_transfer, truth_table_fidelity, TwoQubitSchedule,
};

use crate::config::{
    Axis, CalibrateConfig, CommandConfig, GateConfig, GateFamily, GeometryConfig, SpectrumConfig, SweepConfig,
    T1rhoConfig, TwoQubitConfig,
};
use crate::error::{compute_err, config_err, CliError, CliResult};
use crate::output::{Cell, Table};

/// Result of a job. A calibration that stops short of its tolerance still
/// produces a table, with `failure` set.
#[derive(Debug)]
pub struct Report {
    pub table: Table,
    pub failure: Option<CliError>,
}

impl From<Table> for Report {
    fn from(table: Table) -> Self {
        Self { table, failure: None }
    }
}

pub enum Job {
    Spectrum {
        kind: QubitKind,
        swept: Vec<f64>,
        hamiltonians: Vec<chargeq::qmath::ComplexMatrix>,
    },
    Gate {
        label: String,
        schedule: PulseSchedule,
        model: QuasistaticNoiseModel,
    },
    Sweep {
        sigmas: Vec<f64>,
        schedules: [PulseSchedule; 3],
        template: QuasistaticNoiseModel,
    },
    T1rho {
        cfg: T1rhoConfig,
        s_z: SpectralDensity,
        s_x: SpectralDensity,
    },
    Geometry {
        geometry: TripleDotGeometry,
        fluctuators: Vec<Fluctuator>,
    },
    Calibrate {
        cfg: CalibrateConfig,
        problem: CalibrationProblem,
    },
    TwoQubit {
        schedule: TwoQubitSchedule,
    },
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    let mut v: Vec<f64> = (0..n)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64))
        .collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

fn noise_model(
    sigma: f64,
    kappa: f64,
    grid_n: usize,
    range_sigmas: f64,
    correlation: chargeq::noise::Correlation,
) -> CliResult<QuasistaticNoiseModel> {
    let m = QuasistaticNoiseModel {
        sigma_eps: sigma,
        kappa,
        grid_n,
        range_sigmas,
        correlation,
    };
    m.validate().map_err(config_err)?;
    Ok(m)
}

pub fn prepare(cfg: &CommandConfig, base_dir: &Path) -> CliResult<Job> {
    match cfg {
        CommandConfig::Spectrum(c) => prepare_spectrum(c),
        CommandConfig::Gate(c) => prepare_gate(c, base_dir),
        CommandConfig::Sweep(c) => prepare_sweep(c),
        CommandConfig::T1rho(c) => prepare_t1rho(c),
        CommandConfig::Geometry(c) => prepare_geometry(c),
        CommandConfig::Calibrate(c) => prepare_calibrate(c),
        CommandConfig::Twoqubit(c) => prepare_twoqubit(c),
    }
}

fn prepare_spectrum(c: &SpectrumConfig) -> CliResult<Job> {
    check(c.points >= 1, || "spectrum: points must be at least 1".into())?;
    check(
        c.sweep_min_ghz.is_finite() && c.sweep_max_ghz.is_finite() && c.sweep_min_ghz <= c.sweep_max_ghz,
        || {
            format!(
                "spectrum: invalid sweep range [{}, {}]",
                c.sweep_min_ghz, c.sweep_max_ghz
            )
        },
    )?;
    let swept = linspace(c.sweep_min_ghz, c.sweep_max_ghz, c.points);
    let hamiltonians = swept
        .iter()
        .map(|&x| match c.qubit {
            QubitKind::Cq => CqParams::new(c.eps_d_ghz, x, c.t_a_ghz, c.t_b_ghz).map(|p| h_cq_position(&p)),
            QubitKind::Cd => CdParams::new(x, c.t_ghz).map(|p| h_cd(&p)),
        })
        .collect::<chargeq::Result<Vec<_>>>()
        .map_err(config_err)?;
    Ok(Job::Spectrum {
        kind: c.qubit,
        swept,
        hamiltonians,
    })
}

fn load_schedule(path: &Path, kind: Option<QubitKind>) -> CliResult<PulseSchedule> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: ScheduleDocument = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("malformed schedule {}: {e}", path.display())))?;
    PulseSchedule::from_document(&doc, kind).map_err(config_err)
}

fn prepare_gate(c: &GateConfig, base_dir: &Path) -> CliResult<Job> {
    let (label, schedule) = match (&c.gate, &c.schedule_file) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "gate: give either gate or schedule_file, not both".into(),
            ))
        }
        (_, Some(file)) => {
            let path: PathBuf = base_dir.join(file);
            (file.display().to_string(), load_schedule(&path, c.qubit)?)
        }
        (g, None) => {
            let g = g.unwrap_or(GateKind::CompositeXpiCq);
            (gate_label(g).to_string(), g.schedule(c.tunnel_ghz).map_err(config_err)?)
        }
    };
    check(c.sigma_eps_ghz >= 0.0 && c.sigma_eps_ghz.is_finite(), || {
        format!("gate: sigma_eps_ghz must be nonnegative, got {}", c.sigma_eps_ghz)
    })?;
    let model = noise_model(c.sigma_eps_ghz, c.kappa, c.grid_n, c.range_sigmas, c.correlation)?;
    Ok(Job::Gate { label, schedule, model })
}

pub fn gate_label(g: GateKind) -> &'static str {
    match g {
        GateKind::BareXpiCd => "bare_xpi_cd",
        GateKind::BareXpiCq => "bare_xpi_cq",
        GateKind::CompositeXpiCq => "composite_xpi_cq",
    }
}

fn prepare_sweep(c: &SweepConfig) -> CliResult<Job> {
    let sigmas = match &c.sigma_eps_ghz {
        Some(list) => {
            check(!list.is_empty(), || "sweep: sigma_eps_ghz list is empty".into())?;
            list.clone()
        }
        None => {
            check(c.points >= 1, || "sweep: points must be at least 1".into())?;
            check(
                c.sigma_min_ghz > 0.0 && c.sigma_min_ghz <= c.sigma_max_ghz && c.sigma_max_ghz.is_finite(),
                || {
                    format!(
                        "sweep: need 0 < sigma_min_ghz <= sigma_max_ghz, got [{}, {}]",
                        c.sigma_min_ghz, c.sigma_max_ghz
                    )
                },
            )?;
            logspace(c.sigma_min_ghz, c.sigma_max_ghz, c.points)
        }
    };
    if let Some(bad) = sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(CliError::Config(format!(
            "sweep: sigma values must be nonnegative, got {bad}"
        )));
    }
    let template = noise_model(0.0, c.kappa, c.grid_n, c.range_sigmas, c.correlation)?;
    let schedules = [
        GateKind::BareXpiCd.schedule(c.tunnel_ghz).map_err(config_err)?,
        GateKind::BareXpiCq.schedule(c.tunnel_ghz).map_err(config_err)?,
        GateKind::CompositeXpiCq.schedule(c.tunnel_ghz).map_err(config_err)?,
    ];
    Ok(Job::Sweep {
        sigmas,
        schedules,
        template,
    })
}

fn prepare_t1rho(c: &T1rhoConfig) -> CliResult<Job> {
    check(!c.eps_ac_ghz.is_empty(), || "t1rho: eps_ac_ghz list is empty".into())?;
    check(c.t_ghz > 0.0 && c.t_ghz.is_finite(), || {
        format!("t1rho: t_ghz must be positive, got {}", c.t_ghz)
    })?;
    if let Some(bad) = c.eps_ac_ghz.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(CliError::Config(format!(
            "t1rho: drive amplitudes must be nonnegative, got {bad}"
        )));
    }
    let s_z = SpectralDensity::with_cutoff(c.s_z_amplitude, c.omega_min_rad_per_ns).map_err(config_err)?;
    let s_x = SpectralDensity::with_cutoff(c.s_x_amplitude, c.omega_min_rad_per_ns).map_err(config_err)?;
    Ok(Job::T1rho {
        cfg: c.clone(),
        s_z,
        s_x,
    })
}

fn prepare_geometry(c: &GeometryConfig) -> CliResult<Job> {
    let geometry = TripleDotGeometry::new(c.dots_nm).map_err(config_err)?;
    coulomb_constant(c.epsilon_r).map_err(config_err)?;
    check(!c.fluctuators_nm.is_empty(), || "geometry: no fluctuators given".into())?;
    let fluctuators: Vec<Fluctuator> = c
        .fluctuators_nm
        .iter()
        .map(|&p| Fluctuator::new(p).with_permittivity(c.epsilon_r))
        .collect();
    for f in &fluctuators {
        check(f.position.iter().all(|v| v.is_finite()), || {
            "geometry: fluctuator positions must be finite".into()
        })?;
        check(!c.dots_nm.contains(&f.position), || {
            format!("geometry: fluctuator at {:?} coincides with a dot", f.position)
        })?;
    }
    Ok(Job::Geometry { geometry, fluctuators })
}

fn family_schedule(cfg: &CalibrateConfig, p: &[f64]) -> chargeq::Result<PulseSchedule> {
    let seg = match cfg.family {
        GateFamily::XDuration => gate_x(1.0, cfg.fixed_ghz, cfg.qubit)?,
        GateFamily::ZDuration => gate_z(1.0, cfg.fixed_ghz, cfg.qubit)?,
        GateFamily::XDurationCoupling => gate_x(1.0, p[1], cfg.qubit)?,
    };
    PulseSchedule::from_segments(cfg.qubit, [PulseSegment::new(seg.params, p[0])?.into()])
}

fn prepare_calibrate(c: &CalibrateConfig) -> CliResult<Job> {
    let n = c.family.parameter_count();
    check(c.bounds.len() == n && c.initial.len() == n, || {
        format!(
            "calibrate: family {} takes {n} parameters, got {} bounds and {} initial values",
            c.family.as_str(),
            c.bounds.len(),
            c.initial.len()
        )
    })?;
    check(c.target_angle_rad.is_finite(), || {
        "calibrate: target angle must be finite".into()
    })?;
    let target = match c.target_axis {
        Axis::X => rotation_x(c.target_angle_rad),
        Axis::Z => rotation_z(c.target_angle_rad),
    };
    let bounds = c.bounds.iter().map(|b| (b[0], b[1])).collect();
    let problem = CalibrationProblem::new(target, bounds, c.initial.clone(), c.tolerance).map_err(config_err)?;
    if c.family == GateFamily::XDurationCoupling {
        check(problem.bounds()[1].0 > 0.0, || {
            "calibrate: coupling bounds must be positive".into()
        })?;
    }
    check(problem.bounds()[0].0 >= 0.0, || {
        "calibrate: duration bounds must be nonnegative".into()
    })?;
    for corner in [
        problem.bounds().iter().map(|b| b.0).collect::<Vec<_>>(),
        problem.bounds().iter().map(|b| b.1).collect(),
    ] {
        family_schedule(c, &corner).map_err(config_err)?;
    }
    Ok(Job::Calibrate {
        cfg: c.clone(),
        problem,
    })
}

fn prepare_twoqubit(c: &TwoQubitConfig) -> CliResult<Job> {
    let schedule = if c.enforce_constraints {
        cnot_protocol(c.t2_ghz, c.j_ghz, c.far_detuning_ghz)
    } else {
        cnot_protocol_unchecked(c.t2_ghz, c.j_ghz, c.far_detuning_ghz)
    }
    .map_err(config_err)?;
    Ok(Job::TwoQubit { schedule })
}

impl Job {
    pub fn run(&self) -> CliResult<Report> {
        match self {
            Job::Spectrum {
                kind,
                swept,
                hamiltonians,
            } => {
                let mut table = match kind {
                    QubitKind::Cq => Table::new(&["eps_q_ghz", "e0_ghz", "e1_ghz", "e2_ghz"]),
                    QubitKind::Cd => Table::new(&["eps_d_ghz", "e0_ghz", "e1_ghz"]),
                };
                for (x, h) in swept.iter().zip(hamiltonians) {
                    let mut row = vec![Cell::from(*x)];
                    row.extend(herm_eigenvalues(h).map_err(compute_err)?.into_iter().map(Cell::from));
                    table.push(row);
                }
                Ok(table.into())
            }
            Job::Gate { label, schedule, model } => {
                let infidelity = gate_infidelity(schedule, model).map_err(compute_err)?;
                let purity = process_of_schedule(schedule, model).map_err(compute_err)?.purity();
                let c2 = sensitivity_coefficient(schedule, SensitivityOrder::Second).map_err(compute_err)?;
                let mut table = Table::new(&[
                    "gate",
                    "duration_ns",
                    "sigma_eps_ghz",
                    "kappa",
                    "infidelity",
                    "purity",
                    "sensitivity_c2",
                ]);
                table.push(vec![
                    label.as_str().into(),
                    schedule.total_duration().into(),
                    model.sigma_eps.into(),
                    model.kappa.into(),
                    infidelity.into(),
                    purity.into(),
                    c2.into(),
                ]);
                Ok(table.into())
            }
            Job::Sweep {
                sigmas,
                schedules,
                template,
            } => {
                let rows = sigmas
                    .par_iter()
                    .map(|&sigma| {
                        let model = QuasistaticNoiseModel {
                            sigma_eps: sigma,
                            ..*template
                        };
                        let mut row = vec![Cell::from(sigma)];
                        for s in schedules {
                            row.push(gate_infidelity(s, &model)?.into());
                        }
                        Ok(row)
                    })
                    .collect::<chargeq::Result<Vec<_>>>()
                    .map_err(compute_err)?;
                let mut table = Table::new(&[
                    "sigma_eps_ghz",
                    "infidelity_cd_bare",
                    "infidelity_cq_bare",
                    "infidelity_cq_composite",
                ]);
                rows.into_iter().for_each(|r| table.push(r));
                Ok(table.into())
            }
            Job::T1rho { cfg, s_z, s_x } => {
                let mut table = Table::new(&[
                    "eps_ac_ghz",
                    "longitudinal_per_ns",
                    "transverse_sum_per_ns",
                    "transverse_difference_per_ns",
                    "rate_per_ns",
                ]);
                for &e in &cfg.eps_ac_ghz {
                    let b = t1rho_terms(e, cfg.t_ghz, s_z, s_x, cfg.sweet_spot).map_err(compute_err)?;
                    table.push(vec![
                        e.into(),
                        b.longitudinal.into(),
                        b.transverse_sum.into(),
                        b.transverse_difference.into(),
                        b.total().into(),
                    ]);
                }
                Ok(table.into())
            }
            Job::Geometry { geometry, fluctuators } => {
                let mut table = Table::new(&["x_nm", "y_nm", "delta_eps_d_ghz", "delta_eps_q_ghz", "ratio"]);
                for f in fluctuators {
                    let (d, q) = monopole_detunings(geometry, f).map_err(compute_err)?;
                    table.push(vec![
                        f.position[0].into(),
                        f.position[1].into(),
                        d.into(),
                        q.into(),
                        (q / d).into(),
                    ]);
                }
                Ok(table.into())
            }
            Job::Calibrate { cfg, problem } => {
                let family = |p: &[f64]| family_schedule(cfg, p);
                let r = calibrate_gate(problem, &family).map_err(compute_err)?;
                let mut columns = vec!["family".to_string()];
                columns.extend((0..r.params.len()).map(|i| format!("param_{i}")));
                columns.extend(["objective", "iterations", "converged", "total_duration_ns"].map(String::from));
                let mut row = vec![Cell::from(cfg.family.as_str())];
                row.extend(r.params.iter().map(|&v| Cell::from(v)));
                row.extend([
                    r.objective.into(),
                    r.iterations.into(),
                    r.converged.into(),
                    r.total_duration_ns.into(),
                ]);
                let failure = (!r.converged).then(|| {
                    CliError::NonConvergence(format!(
                        "objective {:.3e} above tolerance {:.3e} after {} iterations",
                        r.objective,
                        problem.tolerance(),
                        r.iterations
                    ))
                });
                Ok(Report {
                    table: Table {
                        columns,
                        rows: vec![row],
                    },
                    failure,
                })
            }
            Job::TwoQubit { schedule } => {
                let p = population_transfer(schedule).map_err(compute_err)?;
                let f = truth_table_fidelity(schedule).map_err(compute_err)?;
                let labels = ["00", "01", "10", "11"];
                let mut table = Table::new(&["output_state", "from_00", "from_01", "from_10", "from_11"]);
                for (out, row) in p.iter().enumerate() {
                    let mut cells = vec![Cell::from(labels[out])];
                    cells.extend(row.iter().map(|&v| Cell::from(v)));
                    table.push(cells);
                }
                table.push(vec![
                    "truth_table_fidelity".into(),
                    f.into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                ]);
                Ok(table.into())
            }
        }
    }
}

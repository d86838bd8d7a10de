// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Choi-state process tomography and noise-averaged process fidelities.
//!
//! A process acts on the system half of `|Φ> = (|00> + |11>)/√2`, with the
//! ancilla of the same dimension as the system. For the triple dot the
//! maximally entangled state only spans the logical pair `{C, E}`, so
//! leakage shows up as lost fidelity. The averaged Choi state is used
//! directly as the process matrix and `F = Tr[χ_ideal χ_actual]`.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{bare_xpi, composite_xpi, NoiseOffsets, PulseSchedule};
use crate::error::{invalid, Error, Result};
use crate::noise::QuasistaticNoiseModel;
use crate::qmath::{c64, herm_eig, kron, ComplexMatrix};
use crate::spectrum::QubitKind;

/// Tolerance on trace and Hermiticity of a process matrix.
pub const PROCESS_TOL: f64 = 1e-10;
/// Most negative eigenvalue allowed in a process matrix.
pub const PROCESS_PSD_TOL: f64 = 1e-8;
/// Purity defect below which a process counts as pure.
pub const PURE_TOL: f64 = 1e-8;
/// Largest excursion outside `[0, 1]` silently clamped by [`process_fidelity`].
pub const CLAMP_TOL: f64 = 1e-9;

/// Choi state of a process on a `dim`-level system (matrix is `dim² × dim²`).
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl ProcessMatrix {
    /// Wraps a Choi matrix after checking trace, Hermiticity and positivity.
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: matrix.dim(),
            });
        }
        let p = Self { dim, matrix };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() >= PROCESS_TOL || tr.im.abs() >= PROCESS_TOL {
            return Err(Error::InvalidState(format!("process trace is {tr}")));
        }
        let herm = self.matrix.hermiticity_residual();
        if herm >= PROCESS_TOL {
            return Err(Error::InvalidState(format!("process not Hermitian ({herm:.3e})")));
        }
        let min_eig = herm_eig(&self.matrix)?.values[0];
        if min_eig <= -PROCESS_PSD_TOL {
            return Err(Error::InvalidState(format!("process has eigenvalue {min_eig:.3e}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Tr(χ²)`.
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product_re(&self.matrix)
    }
}

/// `|Φ><Φ|` with `|Φ> = (|00> + |11>)/√2` (double dot) or
/// `(|CC> + |EE>)/√2` (triple dot).
pub fn choi_initial(kind: QubitKind) -> ProcessMatrix {
    let d = kind.dim();
    let mut phi = vec![c64(0.0, 0.0); d * d];
    for k in 0..2 {
        phi[k * d + k] = c64(1.0 / SQRT_2, 0.0);
    }
    ProcessMatrix {
        dim: d,
        matrix: ComplexMatrix::projector(&phi),
    }
}

fn evolve_choi(rho0: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    let ext = kron(&ComplexMatrix::identity(u.dim()), u);
    rho0.conjugate_by(&ext)
}

/// Pure Choi state of a unitary acting on a `kind` system.
pub fn process_of_unitary(u: &ComplexMatrix, kind: QubitKind) -> Result<ProcessMatrix> {
    if u.dim() != kind.dim() {
        return Err(Error::DimensionMismatch {
            expected: kind.dim(),
            found: u.dim(),
        });
    }
    ProcessMatrix::new(kind.dim(), evolve_choi(choi_initial(kind).matrix(), u))
}

/// Choi state of `schedule` under a single noise realisation.
pub fn process_at_offsets(schedule: &PulseSchedule, noise: NoiseOffsets) -> Result<ProcessMatrix> {
    process_of_unitary(&schedule.propagator(noise)?, schedule.kind())
}

/// Noise-averaged Choi state. Quadrature nodes are propagated in parallel
/// and accumulated in ascending-offset order, so the result does not depend
/// on the thread count.
pub fn process_of_schedule(schedule: &PulseSchedule, model: &QuasistaticNoiseModel) -> Result<ProcessMatrix> {
    let kind = schedule.kind();
    let rho0 = choi_initial(kind);
    let grid = model.quadrature_grid()?;
    let states = grid
        .par_iter()
        .map(|p| {
            let u = schedule.propagator(p.offsets())?;
            Ok(evolve_choi(rho0.matrix(), &u).scale_real(p.weight))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = ComplexMatrix::zeros(kind.dim() * kind.dim());
    for s in &states {
        acc = &acc + s;
    }
    ProcessMatrix::new(kind.dim(), acc)
}

/// `F = Re Tr[χ_ideal χ_actual]` for a pure ideal process.
pub fn process_fidelity(ideal: &ProcessMatrix, actual: &ProcessMatrix) -> Result<f64> {
    if ideal.dim != actual.dim {
        return Err(Error::DimensionMismatch {
            expected: ideal.dim,
            found: actual.dim,
        });
    }
    let purity = ideal.purity();
    if (purity - 1.0).abs() > PURE_TOL {
        return Err(invalid(format!("ideal process must be pure, purity = {purity}")));
    }
    let f = ideal.matrix.trace_product_re(&actual.matrix);
    if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&f) {
        return Err(Error::InvalidState(format!("fidelity {f} lies outside [0, 1]")));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `1 − F` of `schedule` averaged over `model`, relative to its own
/// noiseless process.
pub fn gate_infidelity(schedule: &PulseSchedule, model: &QuasistaticNoiseModel) -> Result<f64> {
    let ideal = process_at_offsets(schedule, NoiseOffsets::ZERO)?;
    let actual = process_of_schedule(schedule, model)?;
    Ok(1.0 - process_fidelity(&ideal, &actual)?)
}

/// Gates compared in the fidelity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    BareXpiCd,
    BareXpiCq,
    CompositeXpiCq,
}

impl GateKind {
    pub const ALL: [GateKind; 3] = [GateKind::BareXpiCd, GateKind::BareXpiCq, GateKind::CompositeXpiCq];

    /// Schedule for a given nearest-neighbour tunnel coupling: `t` of the
    /// double dot, or `t_a = t_b` of the triple dot (logical `√2·t_a`). The
    /// composite gate uses `t_x` equal to that logical coupling and
    /// `eps_z = 2π t_x`.
    pub fn schedule(self, tunnel_coupling: f64) -> Result<PulseSchedule> {
        if !(tunnel_coupling > 0.0) || !tunnel_coupling.is_finite() {
            return Err(invalid(format!(
                "tunnel coupling must be positive, got {tunnel_coupling}"
            )));
        }
        match self {
            GateKind::BareXpiCd => bare_xpi(tunnel_coupling, QubitKind::Cd),
            GateKind::BareXpiCq => bare_xpi(SQRT_2 * tunnel_coupling, QubitKind::Cq),
            GateKind::CompositeXpiCq => composite_xpi(2.0 * PI * SQRT_2 * tunnel_coupling),
        }
    }
}

/// `(σε, 1 − F)` for each entry of `sigmas`, holding every other field of
/// `template` fixed.
pub fn infidelity_curve(
    gate: GateKind,
    tunnel_coupling: f64,
    sigmas: &[f64],
    template: &QuasistaticNoiseModel,
) -> Result<Vec<(f64, f64)>> {
    let schedule = gate.schedule(tunnel_coupling)?;
    sigmas
        .iter()
        .map(|&sigma| {
            let model = QuasistaticNoiseModel {
                sigma_eps: sigma,
                ..*template
            };
            Ok((sigma, gate_infidelity(&schedule, &model)?))
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(invalid("need at least two points for a slope"));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(invalid("log-log slope needs strictly positive data"));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

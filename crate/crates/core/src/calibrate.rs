// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Noise-sensitivity coefficients of pulse schedules and a bounded
//! Nelder–Mead search for gate parameters.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dynamics::{NoiseOffsets, PulseSchedule};
use crate::error::{invalid, Error, Result};
use crate::model::{IDX_C, IDX_E};
use crate::qmath::{c64, unitarity_defect, ComplexMatrix};
use crate::spectrum::QubitKind;
use crate::tomography::{process_at_offsets, process_fidelity, process_of_unitary, ProcessMatrix};

/// Relative disagreement allowed between the two Richardson stages.
pub const SENSITIVITY_REL_TOL: f64 = 0.05;
/// Disagreement below this, in infidelity units at the step, counts as
/// converged whatever its relative size.
pub const SENSITIVITY_ABS_FLOOR: f64 = 1e-10;
/// Default objective tolerance of [`calibrate_gate`].
pub const DEFAULT_OBJECTIVE_TOL: f64 = 1e-10;
/// Simplex diameter, relative to the search box, at which the search stops.
pub const SIMPLEX_TOL: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 500;

/// Expansion order of the infidelity in `δεd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SensitivityOrder {
    Second,
    Fourth,
}

impl SensitivityOrder {
    pub fn power(self) -> i32 {
        match self {
            SensitivityOrder::Second => 2,
            SensitivityOrder::Fourth => 4,
        }
    }

    pub fn from_power(k: u32) -> Result<Self> {
        match k {
            2 => Ok(SensitivityOrder::Second),
            4 => Ok(SensitivityOrder::Fourth),
            _ => Err(invalid(format!("sensitivity order must be 2 or 4, got {k}"))),
        }
    }
}

fn central_difference(f: &dyn Fn(f64) -> Result<f64>, h: f64, order: SensitivityOrder) -> Result<f64> {
    let f0 = f(0.0)?;
    match order {
        SensitivityOrder::Second => Ok((f(h)? + f(-h)? - 2.0 * f0) / (2.0 * h * h)),
        SensitivityOrder::Fourth => {
            let num = f(2.0 * h)? - 4.0 * f(h)? + 6.0 * f0 - 4.0 * f(-h)? + f(-2.0 * h)?;
            Ok(num / (24.0 * h.powi(4)))
        }
    }
}

/// Coefficient `c_k` in `1 − F(δεd) ≈ c_k δεd^k` for a single static
/// dipolar offset, with no quadrupolar noise.
pub fn sensitivity_coefficient(schedule: &PulseSchedule, order: SensitivityOrder) -> Result<f64> {
    let ideal = process_at_offsets(schedule, NoiseOffsets::ZERO)?;
    let f = |delta: f64| -> Result<f64> {
        let actual = process_at_offsets(schedule, NoiseOffsets::dipolar(delta))?;
        Ok(1.0 - process_fidelity(&ideal, &actual)?)
    };
    let self_f = f(0.0)?;
    if self_f.abs() > 1e-9 {
        return Err(Error::InvalidState(format!("schedule self-infidelity is {self_f:.3e}")));
    }
    let scale = schedule.max_coupling();
    let h = if scale > 0.0 { 1e-3 * scale } else { 1e-3 };
    let c_h = central_difference(&f, h, order)?;
    let c_h2 = central_difference(&f, h / 2.0, order)?;
    let gap = (c_h - c_h2).abs();
    if gap > SENSITIVITY_REL_TOL * c_h2.abs() && gap * h.powi(order.power()) > SENSITIVITY_ABS_FLOOR {
        return Err(Error::NonConvergence(format!(
            "finite differences disagree: c(h) = {c_h:.6e}, c(h/2) = {c_h2:.6e}"
        )));
    }
    Ok((4.0 * c_h2 - c_h) / 3.0)
}

/// `exp(−iθσx/2)`.
pub fn rotation_x(theta: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    ComplexMatrix::from_vec(2, vec![c64(c, 0.0), c64(0.0, -s), c64(0.0, -s), c64(c, 0.0)]).expect("2x2")
}

/// `exp(−iθσz/2)`.
pub fn rotation_z(theta: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    ComplexMatrix::from_vec(2, vec![c64(c, -s), c64(0.0, 0.0), c64(0.0, 0.0), c64(c, s)]).expect("2x2")
}

/// Places a logical 2×2 unitary on the `{C, E}` block of the triple dot,
/// acting trivially on the leakage state.
pub fn embed_logical(u: &ComplexMatrix, kind: QubitKind) -> Result<ComplexMatrix> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    match kind {
        QubitKind::Cd => Ok(u.clone()),
        QubitKind::Cq => {
            let mut m = ComplexMatrix::identity(3);
            let idx = [IDX_C, IDX_E];
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    m[(i, j)] = u[(a, b)];
                }
            }
            Ok(m)
        }
    }
}

/// Target and search box for [`calibrate_gate`].
#[derive(Debug, Clone)]
pub struct CalibrationProblem {
    target: ComplexMatrix,
    bounds: Vec<(f64, f64)>,
    initial: Vec<f64>,
    tolerance: f64,
}

impl CalibrationProblem {
    /// `initial` is clamped into `bounds`.
    pub fn new(target: ComplexMatrix, bounds: Vec<(f64, f64)>, initial: Vec<f64>, tolerance: f64) -> Result<Self> {
        if target.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: target.dim(),
            });
        }
        let defect = unitarity_defect(&target);
        if defect > 1e-10 {
            return Err(invalid(format!("target is not unitary (defect {defect:.3e})")));
        }
        if bounds.is_empty() {
            return Err(invalid("empty search domain: no parameters"));
        }
        if let Some((i, b)) = bounds
            .iter()
            .enumerate()
            .find(|(_, (lo, hi))| !(lo <= hi) || !lo.is_finite() || !hi.is_finite())
        {
            return Err(invalid(format!("empty search domain: bound {i} is [{}, {}]", b.0, b.1)));
        }
        if initial.len() != bounds.len() {
            return Err(Error::DimensionMismatch {
                expected: bounds.len(),
                found: initial.len(),
            });
        }
        if !(tolerance > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {tolerance}")));
        }
        let initial = clamp(&initial, &bounds);
        Ok(Self {
            target,
            bounds,
            initial,
            tolerance,
        })
    }

    pub fn target(&self) -> &ComplexMatrix {
        &self.target
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// Outcome of [`calibrate_gate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub params: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub total_duration_ns: f64,
}

fn clamp(x: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter().zip(bounds).map(|(&v, &(lo, hi))| v.clamp(lo, hi)).collect()
}

#[derive(Clone)]
struct Vertex {
    x: Vec<f64>,
    f: f64,
    duration: f64,
}

fn better(a: &Vertex, b: &Vertex) -> Ordering {
    a.f.total_cmp(&b.f).then(a.duration.total_cmp(&b.duration))
}

struct Objective<'a> {
    family: &'a dyn Fn(&[f64]) -> Result<PulseSchedule>,
    bounds: &'a [(f64, f64)],
    target: Option<ProcessMatrix>,
    target_u: &'a ComplexMatrix,
}

impl Objective<'_> {
    fn eval(&mut self, x: Vec<f64>) -> Result<Vertex> {
        let x = clamp(&x, self.bounds);
        let schedule = (self.family)(&x)?;
        let kind = schedule.kind();
        if self.target.is_none() {
            self.target = Some(process_of_unitary(&embed_logical(self.target_u, kind)?, kind)?);
        }
        let ideal = self.target.as_ref().expect("target set above");
        if ideal.dim() != kind.dim() {
            return Err(invalid("gate family changed qubit kind during the search"));
        }
        let actual = process_at_offsets(&schedule, NoiseOffsets::ZERO)?;
        let f = 1.0 - process_fidelity(ideal, &actual)?;
        Ok(Vertex {
            x,
            f,
            duration: schedule.total_duration(),
        })
    }
}

fn diameter(simplex: &[Vertex], bounds: &[(f64, f64)]) -> f64 {
    let best = &simplex[0].x;
    simplex[1..]
        .iter()
        .flat_map(|v| {
            v.x.iter().zip(best).zip(bounds).map(|((a, b), (lo, hi))| {
                let w = hi - lo;
                (a - b).abs() / if w > 0.0 { w } else { 1.0 }
            })
        })
        .fold(0.0, f64::max)
}

/// Minimises `1 − F(target, family(x))` over the box with a Nelder–Mead
/// simplex. Trial points are clamped into the box; among equal objectives
/// the shorter schedule wins.
pub fn calibrate_gate(
    problem: &CalibrationProblem,
    family: &dyn Fn(&[f64]) -> Result<PulseSchedule>,
) -> Result<CalibrationResult> {
    let bounds = problem.bounds();
    let mut obj = Objective {
        family,
        bounds,
        target: None,
        target_u: problem.target(),
    };
    let x0 = obj.eval(problem.initial().to_vec())?;
    let finish = |v: &Vertex, iterations: usize, tol: f64| CalibrationResult {
        params: v.x.clone(),
        objective: v.f,
        iterations,
        converged: v.f < tol,
        total_duration_ns: v.duration,
    };
    if x0.f < problem.tolerance() {
        return Ok(finish(&x0, 0, problem.tolerance()));
    }

    let n = bounds.len();
    let mut simplex = vec![x0.clone()];
    for i in 0..n {
        let (lo, hi) = bounds[i];
        let step = 0.05 * (hi - lo);
        let mut x = x0.x.clone();
        x[i] = if x[i] + step <= hi { x[i] + step } else { x[i] - step };
        simplex.push(obj.eval(x)?);
    }

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        simplex.sort_by(better);
        if diameter(&simplex, bounds) < SIMPLEX_TOL {
            break;
        }
        iterations += 1;
        let worst = simplex[n].clone();
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v.x[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |s: f64| -> Vec<f64> { centroid.iter().zip(&worst.x).map(|(c, w)| c + s * (c - w)).collect() };
        let reflected = obj.eval(along(1.0))?;
        if better(&reflected, &simplex[0]) == Ordering::Less {
            let expanded = obj.eval(along(2.0))?;
            simplex[n] = if better(&expanded, &reflected) == Ordering::Less {
                expanded
            } else {
                reflected
            };
            continue;
        }
        if better(&reflected, &simplex[n - 1]) == Ordering::Less {
            simplex[n] = reflected;
            continue;
        }
        let contracted = if better(&reflected, &worst) == Ordering::Less {
            obj.eval(along(0.5))?
        } else {
            obj.eval(along(-0.5))?
        };
        if better(&contracted, &worst.clone().min_by(&reflected)) == Ordering::Less {
            simplex[n] = contracted;
            continue;
        }
        let best = simplex[0].x.clone();
        for v in simplex.iter_mut().skip(1) {
            let x = v.x.iter().zip(&best).map(|(a, b)| b + 0.5 * (a - b)).collect();
            *v = obj.eval(x)?;
        }
    }
    simplex.sort_by(better);
    let best = if better(&simplex[0], &x0) == Ordering::Greater {
        &x0
    } else {
        &simplex[0]
    };
    Ok(finish(best, iterations, problem.tolerance()))
}

impl Vertex {
    fn min_by(self, other: &Vertex) -> Vertex {
        if better(other, &self) == Ordering::Less {
            other.clone()
        } else {
            self
        }
    }
}

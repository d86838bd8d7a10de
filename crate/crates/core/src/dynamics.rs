// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Pulse schedules and coherent density-matrix evolution.
//!
//! A schedule is an ordered list of segments. Constant segments are square
//! pulses of fixed control parameters; driven segments modulate the detuning
//! with a microwave tone and are integrated as a product of short
//! piecewise-constant steps sampled at their midpoints. Quasistatic noise
//! enters as constant detuning offsets shared by every segment of one
//! realisation.
//!
//! Triple-dot states live in the `{C, E, L}` basis, double-dot states in the
//! position basis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{h_cd, h_cq_even_odd, CdParams, CqParams};
use crate::qmath::{expm_unitary, herm_eig, ComplexMatrix};
use crate::spectrum::QubitKind;

/// Tolerance on trace and Hermiticity of a density matrix.
pub const STATE_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Quasistatic detuning offsets of one noise realisation, in GHz.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseOffsets {
    pub delta_eps_d: f64,
    pub delta_eps_q: f64,
}

impl NoiseOffsets {
    pub const ZERO: NoiseOffsets = NoiseOffsets {
        delta_eps_d: 0.0,
        delta_eps_q: 0.0,
    };

    pub fn new(delta_eps_d: f64, delta_eps_q: f64) -> Self {
        Self {
            delta_eps_d,
            delta_eps_q,
        }
    }

    pub fn dipolar(delta_eps_d: f64) -> Self {
        Self::new(delta_eps_d, 0.0)
    }
}

/// Control parameters held during a segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SegmentParams {
    Cq(CqParams),
    Cd(CdParams),
}

impl SegmentParams {
    pub fn kind(&self) -> QubitKind {
        match self {
            SegmentParams::Cq(_) => QubitKind::Cq,
            SegmentParams::Cd(_) => QubitKind::Cd,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SegmentParams::Cq(p) => p.validate(),
            SegmentParams::Cd(p) => p.validate(),
        }
    }

    /// Hamiltonian including noise offsets. The double dot only sees `δεd`.
    pub fn hamiltonian(&self, noise: NoiseOffsets) -> ComplexMatrix {
        match self {
            SegmentParams::Cq(p) => h_cq_even_odd(&p.with_offsets(noise.delta_eps_d, noise.delta_eps_q)),
            SegmentParams::Cd(p) => h_cd(&p.with_offset(noise.delta_eps_d)),
        }
    }

    /// Logical tunnel coupling (`t` for the double dot).
    pub fn coupling(&self) -> f64 {
        match self {
            SegmentParams::Cq(p) => p.t_logical(),
            SegmentParams::Cd(p) => p.t,
        }
    }

    /// Copy with the driven detuning (`eps_q` or `eps_d`) shifted by `delta`.
    fn with_drive(&self, delta: f64) -> Self {
        match self {
            SegmentParams::Cq(p) => SegmentParams::Cq(p.with_offsets(0.0, delta)),
            SegmentParams::Cd(p) => SegmentParams::Cd(p.with_offset(delta)),
        }
    }
}

/// Square pulse of constant parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment {
    pub params: SegmentParams,
    pub duration_ns: f64,
}

impl PulseSegment {
    pub fn new(params: SegmentParams, duration_ns: f64) -> Result<Self> {
        let seg = Self { params, duration_ns };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.duration_ns >= 0.0) || !self.duration_ns.is_finite() {
            return Err(invalid(format!(
                "segment duration must be finite and nonnegative, got {}",
                self.duration_ns
            )));
        }
        Ok(())
    }

    pub fn propagator(&self, noise: NoiseOffsets) -> Result<ComplexMatrix> {
        expm_unitary(&self.params.hamiltonian(noise), self.duration_ns)
    }
}

/// Segment whose driven detuning follows
/// `eps(τ) = eps_bar + eps_ac·cos(2πντ + phase)`.
///
/// The quadrupolar detuning is driven for the triple dot and the dipolar one
/// for the double dot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSegment {
    pub base: SegmentParams,
    pub eps_ac: f64,
    pub nu: f64,
    pub phase: f64,
    pub duration_ns: f64,
    pub max_step_ns: f64,
}

impl DriveSegment {
    pub fn new(
        base: SegmentParams,
        eps_ac: f64,
        nu: f64,
        phase: f64,
        duration_ns: f64,
        max_step_ns: f64,
    ) -> Result<Self> {
        let seg = Self {
            base,
            eps_ac,
            nu,
            phase,
            duration_ns,
            max_step_ns,
        };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.eps_ac >= 0.0) || !self.eps_ac.is_finite() {
            return Err(invalid(format!(
                "drive amplitude must be nonnegative, got {}",
                self.eps_ac
            )));
        }
        if !(self.nu >= 0.0) || !self.nu.is_finite() || !self.phase.is_finite() {
            return Err(invalid(format!(
                "drive frequency must be nonnegative and phase finite (nu = {}, phase = {})",
                self.nu, self.phase
            )));
        }
        if !(self.duration_ns >= 0.0) || !self.duration_ns.is_finite() {
            return Err(invalid(format!(
                "segment duration must be finite and nonnegative, got {}",
                self.duration_ns
            )));
        }
        if !(self.max_step_ns > 0.0) {
            return Err(invalid(format!("max_step must be positive, got {}", self.max_step_ns)));
        }
        if self.nu > 0.0 && self.max_step_ns > 1.0 / (20.0 * self.nu) {
            return Err(invalid(format!(
                "max_step {} ns is too coarse for a {} GHz drive (limit 1/(20 nu) = {} ns)",
                self.max_step_ns,
                self.nu,
                1.0 / (20.0 * self.nu)
            )));
        }
        Ok(())
    }

    /// Number of piecewise-constant steps and their common length.
    pub fn steps(&self) -> (usize, f64) {
        if self.duration_ns == 0.0 {
            return (0, 0.0);
        }
        let n = (self.duration_ns / self.max_step_ns).ceil().max(1.0) as usize;
        (n, self.duration_ns / n as f64)
    }

    /// Propagator of step `k` of length `dt`, sampled at the step midpoint.
    fn step_propagator(&self, k: usize, dt: f64, noise: NoiseOffsets) -> Result<ComplexMatrix> {
        let t_mid = (k as f64 + 0.5) * dt;
        let drive = self.eps_ac * (2.0 * PI * self.nu * t_mid + self.phase).cos();
        expm_unitary(&self.base.with_drive(drive).hamiltonian(noise), dt)
    }

    pub fn propagator(&self, noise: NoiseOffsets) -> Result<ComplexMatrix> {
        let (n, dt) = self.steps();
        let mut u = ComplexMatrix::identity(self.base.kind().dim());
        for k in 0..n {
            u = &self.step_propagator(k, dt, noise)? * &u;
        }
        Ok(u)
    }
}

/// One element of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    Constant(PulseSegment),
    Driven(DriveSegment),
}

impl Segment {
    pub fn kind(&self) -> QubitKind {
        match self {
            Segment::Constant(s) => s.params.kind(),
            Segment::Driven(s) => s.base.kind(),
        }
    }

    pub fn duration_ns(&self) -> f64 {
        match self {
            Segment::Constant(s) => s.duration_ns,
            Segment::Driven(s) => s.duration_ns,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Segment::Constant(s) => s.validate(),
            Segment::Driven(s) => s.validate(),
        }
    }

    pub fn propagator(&self, noise: NoiseOffsets) -> Result<ComplexMatrix> {
        match self {
            Segment::Constant(s) => s.propagator(noise),
            Segment::Driven(s) => s.propagator(noise),
        }
    }

    fn coupling(&self) -> f64 {
        match self {
            Segment::Constant(s) => s.params.coupling(),
            Segment::Driven(s) => s.base.coupling(),
        }
    }
}

impl From<PulseSegment> for Segment {
    fn from(s: PulseSegment) -> Self {
        Segment::Constant(s)
    }
}

impl From<DriveSegment> for Segment {
    fn from(s: DriveSegment) -> Self {
        Segment::Driven(s)
    }
}

/// Time-ordered list of segments acting on one qubit kind.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    kind: QubitKind,
    segments: Vec<Segment>,
}

impl PulseSchedule {
    pub fn new(kind: QubitKind) -> Self {
        Self {
            kind,
            segments: Vec::new(),
        }
    }

    pub fn from_segments(kind: QubitKind, segments: impl IntoIterator<Item = Segment>) -> Result<Self> {
        let mut s = Self::new(kind);
        for seg in segments {
            s.push(seg)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, segment: impl Into<Segment>) -> Result<()> {
        let segment = segment.into();
        if segment.kind() != self.kind {
            return Err(invalid(format!(
                "segment of kind {:?} cannot join a {:?} schedule",
                segment.kind(),
                self.kind
            )));
        }
        segment.validate()?;
        self.segments.push(segment);
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &PulseSchedule) -> Result<PulseSchedule> {
        let mut out = self.clone();
        for seg in &other.segments {
            out.push(*seg)?;
        }
        Ok(out)
    }

    pub fn kind(&self) -> QubitKind {
        self.kind
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration_ns).sum()
    }

    /// Largest logical tunnel coupling over all segments.
    pub fn max_coupling(&self) -> f64 {
        self.segments.iter().map(Segment::coupling).fold(0.0, f64::max)
    }

    /// `U_n ⋯ U_2 U_1` for one noise realisation.
    pub fn propagator(&self, noise: NoiseOffsets) -> Result<ComplexMatrix> {
        let mut u = ComplexMatrix::identity(self.kind.dim());
        for seg in &self.segments {
            u = &seg.propagator(noise)? * &u;
        }
        Ok(u)
    }
}

/// Checks Hermiticity, unit trace and positivity of a density matrix.
pub fn validate_density_matrix(rho: &ComplexMatrix, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.dim(),
        });
    }
    let herm = rho.hermiticity_residual();
    if herm >= STATE_TOL {
        return Err(Error::InvalidState(format!("not Hermitian (residual {herm:.3e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() >= STATE_TOL || tr.im.abs() >= STATE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let min_eig = herm_eig(rho)?.values[0];
    if min_eig < -POSITIVITY_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
    }
    Ok(())
}

/// Evolves `rho0` through every segment of `schedule` under one quasistatic
/// noise realisation.
pub fn evolve(rho0: &ComplexMatrix, schedule: &PulseSchedule, noise: NoiseOffsets) -> Result<ComplexMatrix> {
    validate_density_matrix(rho0, schedule.kind().dim())?;
    let mut rho = rho0.clone();
    for seg in schedule.segments() {
        rho = rho.conjugate_by(&seg.propagator(noise)?);
    }
    Ok(rho)
}

/// Evolves `rho0` through a single driven segment.
pub fn evolve_driven(rho0: &ComplexMatrix, seg: &DriveSegment, noise: NoiseOffsets) -> Result<ComplexMatrix> {
    evolve_driven_observed(rho0, seg, noise, |_, _| {})
}

/// Like [`evolve_driven`], calling `observe(time_ns, rho)` after every step.
pub fn evolve_driven_observed(
    rho0: &ComplexMatrix,
    seg: &DriveSegment,
    noise: NoiseOffsets,
    mut observe: impl FnMut(f64, &ComplexMatrix),
) -> Result<ComplexMatrix> {
    seg.validate()?;
    validate_density_matrix(rho0, seg.base.kind().dim())?;
    let (n, dt) = seg.steps();
    let mut rho = rho0.clone();
    for k in 0..n {
        rho = rho.conjugate_by(&seg.step_propagator(k, dt, noise)?);
        observe((k + 1) as f64 * dt, &rho);
    }
    Ok(rho)
}

fn symmetric_params(kind: QubitKind, detuning: f64, coupling: f64) -> Result<SegmentParams> {
    Ok(match kind {
        QubitKind::Cq => SegmentParams::Cq(CqParams::symmetric(detuning, coupling)?),
        QubitKind::Cd => SegmentParams::Cd(CdParams::new(detuning, coupling)?),
    })
}

/// `X_alpha` at the sweet spot: coupling `t_x` held for `alpha/(4π t_x)`.
///
/// For the triple dot `t_x` is the logical coupling, so `t_a = t_b = t_x/√2`.
pub fn gate_x(alpha: f64, t_x: f64, kind: QubitKind) -> Result<PulseSegment> {
    if !(t_x > 0.0) {
        return Err(invalid(format!("X gate needs a positive tunnel coupling, got {t_x}")));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid(format!("X rotation angle must be positive, got {alpha}")));
    }
    PulseSegment::new(symmetric_params(kind, 0.0, t_x)?, alpha / (4.0 * PI * t_x))
}

/// `Z_beta` with couplings off: detuning `±eps_z` held for `|beta|/(2π|eps_z|)`.
///
/// The sign of `beta` flips the detuning; the duration only depends on
/// magnitudes.
pub fn gate_z(beta: f64, eps_z: f64, kind: QubitKind) -> Result<PulseSegment> {
    if eps_z == 0.0 || !eps_z.is_finite() {
        return Err(invalid(format!("Z gate needs a nonzero detuning, got {eps_z}")));
    }
    if beta == 0.0 || !beta.is_finite() {
        return Err(invalid(format!("Z rotation angle must be nonzero, got {beta}")));
    }
    let detuning = eps_z.abs() * (beta * eps_z).signum();
    let duration = beta.abs() / (2.0 * PI * eps_z.abs());
    PulseSegment::new(symmetric_params(kind, detuning, 0.0)?, duration)
}

/// Single-segment `X_pi`.
pub fn bare_xpi(t_x: f64, kind: QubitKind) -> Result<PulseSchedule> {
    PulseSchedule::from_segments(kind, [gate_x(PI, t_x, kind)?.into()])
}

/// Three-pulse `Z_2π X_3π Z_-2π` on the triple dot with `t_x = eps_z/2π`.
///
/// The product is read right to left: `Z_-2π` is applied first.
pub fn composite_xpi(eps_z: f64) -> Result<PulseSchedule> {
    if !(eps_z > 0.0) {
        return Err(invalid(format!("composite X_pi needs eps_z > 0, got {eps_z}")));
    }
    let t_x = eps_z / (2.0 * PI);
    PulseSchedule::from_segments(
        QubitKind::Cq,
        [
            gate_z(-2.0 * PI, eps_z, QubitKind::Cq)?.into(),
            gate_x(3.0 * PI, t_x, QubitKind::Cq)?.into(),
            gate_z(2.0 * PI, eps_z, QubitKind::Cq)?.into(),
        ],
    )
}

/// `|C>` (triple dot) or `|0>` (double dot) as a density matrix.
pub fn ground_projector(kind: QubitKind) -> ComplexMatrix {
    let mut rho = ComplexMatrix::zeros(kind.dim());
    rho[(0, 0)] = crate::qmath::c64(1.0, 0.0);
    rho
}

/// Logical eigenstates `(|C> ∓ |E>)/√2` of `t σx` at the sweet spot.
pub fn sweet_spot_eigenstates(kind: QubitKind) -> (Vec<num_complex::Complex64>, Vec<num_complex::Complex64>) {
    let s = FRAC_1_SQRT_2;
    let mut lower = vec![num_complex::Complex64::new(0.0, 0.0); kind.dim()];
    let mut upper = lower.clone();
    lower[0].re = s;
    lower[1].re = -s;
    upper[0].re = s;
    upper[1].re = s;
    (lower, upper)
}

// ---------------------------------------------------------------------------
// JSON schedule documents

/// One segment as written in a schedule document.
///
/// Drive fields are either all present (driven segment) or all absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SegmentRecord {
    Cq {
        eps_d: f64,
        eps_q: f64,
        t_a: f64,
        t_b: f64,
        duration_ns: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps_ac: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nu: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phase: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_step_ns: Option<f64>,
    },
    Cd {
        eps_d: f64,
        t: f64,
        duration_ns: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps_ac: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nu: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phase: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_step_ns: Option<f64>,
    },
}

/// `{"segments": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub segments: Vec<SegmentRecord>,
}

type DriveFields = (Option<f64>, Option<f64>, Option<f64>, Option<f64>);

fn build_segment(base: SegmentParams, duration_ns: f64, drive: DriveFields) -> Result<Segment> {
    match drive {
        (None, None, None, None) => Ok(PulseSegment::new(base, duration_ns)?.into()),
        (Some(eps_ac), Some(nu), Some(phase), Some(max_step_ns)) => {
            Ok(DriveSegment::new(base, eps_ac, nu, phase, duration_ns, max_step_ns)?.into())
        }
        _ => Err(invalid("drive segments need all of eps_ac, nu, phase and max_step_ns")),
    }
}

impl SegmentRecord {
    fn to_segment(self) -> Result<Segment> {
        match self {
            SegmentRecord::Cq {
                eps_d,
                eps_q,
                t_a,
                t_b,
                duration_ns,
                eps_ac,
                nu,
                phase,
                max_step_ns,
            } => build_segment(
                SegmentParams::Cq(CqParams::new(eps_d, eps_q, t_a, t_b)?),
                duration_ns,
                (eps_ac, nu, phase, max_step_ns),
            ),
            SegmentRecord::Cd {
                eps_d,
                t,
                duration_ns,
                eps_ac,
                nu,
                phase,
                max_step_ns,
            } => build_segment(
                SegmentParams::Cd(CdParams::new(eps_d, t)?),
                duration_ns,
                (eps_ac, nu, phase, max_step_ns),
            ),
        }
    }

    fn from_segment(seg: &Segment) -> Self {
        let (base, duration_ns, drive) = match seg {
            Segment::Constant(s) => (s.params, s.duration_ns, (None, None, None, None)),
            Segment::Driven(s) => (
                s.base,
                s.duration_ns,
                (Some(s.eps_ac), Some(s.nu), Some(s.phase), Some(s.max_step_ns)),
            ),
        };
        let (eps_ac, nu, phase, max_step_ns) = drive;
        match base {
            SegmentParams::Cq(p) => SegmentRecord::Cq {
                eps_d: p.eps_d,
                eps_q: p.eps_q,
                t_a: p.t_a,
                t_b: p.t_b,
                duration_ns,
                eps_ac,
                nu,
                phase,
                max_step_ns,
            },
            SegmentParams::Cd(p) => SegmentRecord::Cd {
                eps_d: p.eps_d,
                t: p.t,
                duration_ns,
                eps_ac,
                nu,
                phase,
                max_step_ns,
            },
        }
    }
}

impl PulseSchedule {
    pub fn to_document(&self) -> ScheduleDocument {
        ScheduleDocument {
            segments: self.segments.iter().map(SegmentRecord::from_segment).collect(),
        }
    }

    /// Builds a schedule from a document. An empty document needs `kind`.
    pub fn from_document(doc: &ScheduleDocument, default_kind: Option<QubitKind>) -> Result<Self> {
        let segments = doc
            .segments
            .iter()
            .map(|r| r.to_segment())
            .collect::<Result<Vec<_>>>()?;
        let kind = segments
            .first()
            .map(Segment::kind)
            .or(default_kind)
            .ok_or_else(|| invalid("empty schedule document needs an explicit qubit kind"))?;
        PulseSchedule::from_segments(kind, segments)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("schedule serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ScheduleDocument =
            serde_json::from_str(text).map_err(|e| invalid(format!("malformed schedule JSON: {e}")))?;
        Self::from_document(&doc, None)
    }
}

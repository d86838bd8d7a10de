// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Two capacitively coupled qubits in their logical subspaces and the
//! pulsed CNOT built from a conditionally resonant X rotation.
//!
//! Each qubit uses the basis `{|C>, |E>}` with `|0̃> = |C>` (σz = +1). The
//! product basis is ordered `|q1 q2>` with index `2·q1 + q2`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qmath::{expm_unitary, kron, ComplexMatrix};

/// Single-qubit logical parameters, GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalParams {
    pub eps_q: f64,
    pub t: f64,
}

impl LogicalParams {
    pub fn new(eps_q: f64, t: f64) -> Result<Self> {
        let p = Self { eps_q, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eps_q.is_finite() || !self.t.is_finite() {
            return Err(invalid("logical parameters must be finite"));
        }
        if self.t < 0.0 {
            return Err(invalid(format!("tunnel coupling must be nonnegative, got {}", self.t)));
        }
        Ok(())
    }

    /// `(eps_q/2)(1 + σz) + t σx`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[self.eps_q, self.t], [self.t, 0.0]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitParams {
    pub q1: LogicalParams,
    pub q2: LogicalParams,
    pub j: f64,
}

impl TwoQubitParams {
    pub fn validate(&self) -> Result<()> {
        self.q1.validate()?;
        self.q2.validate()?;
        if !self.j.is_finite() {
            return Err(invalid("coupling J must be finite"));
        }
        Ok(())
    }
}

/// `h₁⊗I + I⊗h₂ + J σz⊗σz`.
pub fn h_two_qubit(p: &TwoQubitParams) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let z = ComplexMatrix::pauli_z();
    let h = &kron(&p.q1.hamiltonian(), &id) + &kron(&id, &p.q2.hamiltonian());
    &h + &kron(&z, &z).scale_real(p.j)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitSegment {
    pub params: TwoQubitParams,
    pub duration_ns: f64,
}

impl TwoQubitSegment {
    pub fn new(params: TwoQubitParams, duration_ns: f64) -> Result<Self> {
        params.validate()?;
        if !(duration_ns >= 0.0) || !duration_ns.is_finite() {
            return Err(invalid(format!(
                "segment duration must be nonnegative, got {duration_ns}"
            )));
        }
        Ok(Self { params, duration_ns })
    }

    pub fn propagator(&self) -> Result<ComplexMatrix> {
        expm_unitary(&h_two_qubit(&self.params), self.duration_ns)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TwoQubitSchedule {
    pub segments: Vec<TwoQubitSegment>,
}

impl TwoQubitSchedule {
    pub fn propagator(&self) -> Result<ComplexMatrix> {
        let mut u = ComplexMatrix::identity(4);
        for s in &self.segments {
            u = &s.propagator()? * &u;
        }
        Ok(u)
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_ns).sum()
    }
}

/// Smallest `J/t₂` accepted by [`cnot_protocol`].
pub const MIN_COUPLING_RATIO: f64 = 10.0;

/// CNOT controlled on `|0̃>` of qubit 1: qubit 1 idles far detuned with no
/// tunnelling while qubit 2 is pulsed to `eps_q2 = −2J`, `t₂` on, for
/// `1/(4t₂)`. Requires `J ≥ 10 t₂` and `far_detuning < −10·max(J, t₂)`.
pub fn cnot_protocol(t2: f64, j: f64, far_detuning: f64) -> Result<TwoQubitSchedule> {
    if !(j >= MIN_COUPLING_RATIO * t2) {
        return Err(invalid(format!(
            "J = {j} GHz is below {MIN_COUPLING_RATIO}·t2 = {} GHz; the uncontrolled branch would flip with probability up to {:.3e}",
            MIN_COUPLING_RATIO * t2,
            t2 * t2 / (t2 * t2 + 4.0 * j * j)
        )));
    }
    if !(far_detuning < -10.0 * j.max(t2)) {
        return Err(invalid(format!(
            "far detuning {far_detuning} GHz must lie below −10·max(J, t2) = {} GHz",
            -10.0 * j.max(t2)
        )));
    }
    cnot_protocol_unchecked(t2, j, far_detuning)
}

/// [`cnot_protocol`] without the design constraints, for exploring the
/// degraded regime.
pub fn cnot_protocol_unchecked(t2: f64, j: f64, far_detuning: f64) -> Result<TwoQubitSchedule> {
    if !(t2 > 0.0) || !t2.is_finite() {
        return Err(invalid(format!("target tunnel coupling must be positive, got {t2}")));
    }
    let params = TwoQubitParams {
        q1: LogicalParams::new(far_detuning, 0.0)?,
        q2: LogicalParams::new(-2.0 * j, t2)?,
        j,
    };
    Ok(TwoQubitSchedule {
        segments: vec![TwoQubitSegment::new(params, 1.0 / (4.0 * t2))?],
    })
}

/// `P[out][in]`, the probability of measuring basis state `out` after
/// preparing `in`.
pub fn population_transfer(schedule: &TwoQubitSchedule) -> Result<[[f64; 4]; 4]> {
    let u = schedule.propagator()?;
    let mut p = [[0.0; 4]; 4];
    for (out, row) in p.iter_mut().enumerate() {
        for (inp, v) in row.iter_mut().enumerate() {
            *v = u[(out, inp)].norm_sqr();
        }
    }
    Ok(p)
}

/// Output basis index of the zero-controlled CNOT.
pub fn cnot_image(input: usize) -> usize {
    match input {
        0 => 1,
        1 => 0,
        other => other,
    }
}

/// Mean over the four basis inputs of the population on the CNOT image.
pub fn truth_table_fidelity(schedule: &TwoQubitSchedule) -> Result<f64> {
    let p = population_transfer(schedule)?;
    Ok((0..4).map(|i| p[cnot_image(i)][i]).sum::<f64>() / 4.0)
}

/// Flip probability of the target when the control is `|1̃>`:
/// `(t²/(t² + 4J²)) sin²(π√(4J² + t²)/(2t))`, at most `t²/(t² + 4J²)`.
pub fn leak_through(t2: f64, j: f64) -> f64 {
    let w = (4.0 * j * j + t2 * t2).sqrt();
    let s = (std::f64::consts::PI * w / (2.0 * t2)).sin();
    t2 * t2 / (w * w) * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::herm_eigenvalues;

    #[test]
    fn uncoupled_spectrum_is_pairwise_sum() {
        let q1 = LogicalParams::new(1.3, 0.7).unwrap();
        let q2 = LogicalParams::new(-0.4, 2.1).unwrap();
        let e = herm_eigenvalues(&h_two_qubit(&TwoQubitParams { q1, q2, j: 0.0 })).unwrap();
        let a = herm_eigenvalues(&q1.hamiltonian()).unwrap();
        let b = herm_eigenvalues(&q2.hamiltonian()).unwrap();
        let mut sums: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
        sums.sort_by(f64::total_cmp);
        for (x, y) in e.iter().zip(&sums) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_detuning_shift() {
        let (e1, e2, j) = (3.0, 1.5, 0.8);
        let p = TwoQubitParams {
            q1: LogicalParams::new(e1, 0.0).unwrap(),
            q2: LogicalParams::new(e2, 0.0).unwrap(),
            j,
        };
        let h = h_two_qubit(&p);
        for q1 in 0..2 {
            let s1 = if q1 == 0 { 1.0 } else { -1.0 };
            for q2 in 0..2 {
                let s2 = if q2 == 0 { 1.0 } else { -1.0 };
                let i = 2 * q1 + q2;
                let expected = 0.5 * e1 * (1.0 + s1) + 0.5 * (e2 + 2.0 * j * s1) * (1.0 + s2) - j * s1;
                assert!((h[(i, i)].re - expected).abs() < 1e-12);
                for k in 0..4 {
                    if k != i {
                        assert_eq!(h[(i, k)].norm(), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn control_conserved_without_tunnelling() {
        let p = TwoQubitParams {
            q1: LogicalParams::new(-50.0, 0.0).unwrap(),
            q2: LogicalParams::new(0.3, 1.7).unwrap(),
            j: 4.0,
        };
        let h = h_two_qubit(&p);
        let z1 = kron(&ComplexMatrix::pauli_z(), &ComplexMatrix::identity(2));
        assert!(h.commutator(&z1).max_abs() < 1e-12);
        assert!(h.is_hermitian(1e-15));
    }

    #[test]
    fn cnot_at_design_coupling() {
        let t2 = 1.0;
        let s = cnot_protocol(t2, 10.0, -1000.0).unwrap();
        let p = population_transfer(&s).unwrap();
        assert!(p[1][0] >= 0.99);
        let leak = p[3][2];
        assert!(leak <= 1.0 / 401.0 + 1e-12);
        assert!((leak - leak_through(t2, 10.0)).abs() < 1e-12);
        assert!(truth_table_fidelity(&s).unwrap() >= 0.99);
    }

    #[test]
    fn weak_coupling_is_rejected_or_degraded() {
        assert!(cnot_protocol(1.0, 5.0, -1000.0).is_err());
        assert!(cnot_protocol(1.0, 10.0, -50.0).is_err());
        let s = cnot_protocol_unchecked(1.0, 1.0, -1000.0).unwrap();
        let f = truth_table_fidelity(&s).unwrap();
        assert!(f < 0.99);
        assert!((f - (1.0 - 0.5 * leak_through(1.0, 1.0))).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_flips_both_branches() {
        let s = cnot_protocol_unchecked(2.0, 0.0, -1000.0).unwrap();
        let p = population_transfer(&s).unwrap();
        assert!(p[1][0] > 1.0 - 1e-12);
        assert!(p[3][2] > 1.0 - 1e-12);
        assert!((truth_table_fidelity(&s).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn populations_are_doubly_stochastic() {
        let s = cnot_protocol_unchecked(0.7, 2.3, -100.0).unwrap();
        let p = population_transfer(&s).unwrap();
        for (i, row) in p.iter().enumerate() {
            let row: f64 = row.iter().sum();
            let col: f64 = (0..4).map(|k| p[k][i]).sum();
            assert!((row - 1.0).abs() < 1e-12 && (col - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_respects_leak_envelope() {
        let t2 = 1.0;
        for k in 0..10 {
            let ratio = 1.0 + 49.0 * k as f64 / 9.0;
            let s = cnot_protocol_unchecked(t2, ratio * t2, -1000.0).unwrap();
            let f = truth_table_fidelity(&s).unwrap();
            let bound = 1.0 - 0.5 / (1.0 + 4.0 * ratio * ratio);
            assert!(f >= bound - 1e-12, "J/t2 = {ratio}: {f} < {bound}");
        }
    }
}

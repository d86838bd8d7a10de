// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Qubit splittings, their low-order noise expansions, sweet spots and the
//! leakage overlap of the triple-dot qubit.
//!
//! For the triple dot the logical levels are the lowest and highest
//! eigenvalues and the leakage level sits in the middle.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{h_cd, h_cq_even_odd, CdParams, CqParams, IDX_C};
use crate::qmath::herm_eig;

/// Which qubit flavour a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitKind {
    /// Charge dipole: one electron in a double dot.
    Cd,
    /// Charge quadrupole: one electron in a linear triple dot.
    Cq,
}

impl QubitKind {
    /// Hilbert-space dimension simulated for this kind.
    pub fn dim(self) -> usize {
        match self {
            QubitKind::Cd => 2,
            QubitKind::Cq => 3,
        }
    }
}

/// Detuning that multiplies the linear term of an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinearVariable {
    DeltaEpsD,
    DeltaEpsQ,
}

/// `E01 ≈ constant + linear·δ_lin + quadratic·δεd²`.
///
/// For the double dot both terms are in `δεd`; for the triple dot the linear
/// term is in `δεq` and the quadratic one in `δεd`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingExpansion {
    pub constant: f64,
    pub linear_coeff: f64,
    pub quadratic_coeff: f64,
    pub which_linear_variable: LinearVariable,
}

impl SplittingExpansion {
    pub fn evaluate(&self, delta_linear: f64, delta_eps_d: f64) -> f64 {
        self.constant + self.linear_coeff * delta_linear + self.quadratic_coeff * delta_eps_d * delta_eps_d
    }
}

/// `√(eps_d² + 4t²)`.
pub fn splitting_cd(eps_d: f64, t: f64) -> f64 {
    eps_d.hypot(2.0 * t)
}

/// Gap between highest and lowest eigenvalue of the triple-dot Hamiltonian.
pub fn splitting_cq_exact(p: &CqParams) -> f64 {
    let eig = herm_eig(&h_cq_even_odd(p)).expect("real symmetric Hamiltonian");
    eig.values[2] - eig.values[0]
}

/// Gap of the double-dot Hamiltonian obtained from the eigensolver.
pub fn splitting_cd_numeric(p: &CdParams) -> f64 {
    let eig = herm_eig(&h_cd(p)).expect("real symmetric Hamiltonian");
    eig.values[1] - eig.values[0]
}

/// Noise expansion of the double-dot splitting around `eps_d_bar`.
pub fn expansion_cd(eps_d_bar: f64, t: f64) -> Result<SplittingExpansion> {
    if !(t >= 0.0) {
        return Err(invalid(format!("tunnel coupling must be nonnegative, got {t}")));
    }
    let s2 = eps_d_bar * eps_d_bar + 4.0 * t * t;
    if s2 == 0.0 || t == 0.0 {
        return Err(Error::Degenerate(format!(
            "expansion undefined at eps_d = {eps_d_bar}, t = {t}"
        )));
    }
    let s = s2.sqrt();
    Ok(SplittingExpansion {
        constant: s,
        linear_coeff: eps_d_bar / s,
        quadratic_coeff: 2.0 * t * t / (s2 * s),
        which_linear_variable: LinearVariable::DeltaEpsD,
    })
}

/// Noise expansion of the triple-dot splitting at `eps_d_bar = 0`.
pub fn expansion_cq(eps_q_bar: f64, t_logical: f64) -> Result<SplittingExpansion> {
    if !(t_logical > 0.0) {
        return Err(invalid(format!(
            "logical tunnel coupling must be positive, got {t_logical}"
        )));
    }
    let t2 = t_logical * t_logical;
    let s = (eps_q_bar * eps_q_bar + 4.0 * t2).sqrt();
    Ok(SplittingExpansion {
        constant: s,
        linear_coeff: eps_q_bar / s,
        quadratic_coeff: (eps_q_bar * eps_q_bar + 2.0 * t2) / (t2 * s),
        which_linear_variable: LinearVariable::DeltaEpsQ,
    })
}

/// Probability `|<L̃|C>|²` that `|C>` projects onto the perturbed leakage
/// eigenstate at `eps_q = 0` with dipolar offset `delta_eps_d`.
pub fn leakage_overlap(delta_eps_d: f64, t_logical: f64) -> Result<f64> {
    if delta_eps_d == 0.0 && t_logical == 0.0 {
        return Err(Error::Degenerate(
            "leakage overlap undefined when both the offset and the coupling vanish".into(),
        ));
    }
    if !(t_logical >= 0.0) || !delta_eps_d.is_finite() {
        return Err(invalid(format!(
            "invalid leakage-overlap inputs (delta_eps_d = {delta_eps_d}, t = {t_logical})"
        )));
    }
    let p = CqParams::symmetric(0.0, t_logical)?.with_offsets(delta_eps_d, 0.0);
    let eig = herm_eig(&h_cq_even_odd(&p))?;
    Ok(eig.vectors[(IDX_C, 1)].norm_sqr())
}

/// Location of a sweet spot of the exact splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweetSpot {
    Cd { eps_d: f64 },
    Cq { eps_d: f64, eps_q: f64 },
}

/// Centered finite-difference step used for splitting derivatives.
pub fn derivative_step(t: f64) -> f64 {
    1e-4 * t.max(1.0)
}

/// `∂E01/∂εd` of the double dot by centered differences.
pub fn dsplitting_cd(eps_d: f64, t: f64) -> f64 {
    let h = derivative_step(t);
    (splitting_cd(eps_d + h, t) - splitting_cd(eps_d - h, t)) / (2.0 * h)
}

/// `(∂E01/∂εd, ∂E01/∂εq)` of the triple dot at symmetric couplings, by
/// centered differences of the exact splitting.
pub fn dsplitting_cq(eps_d: f64, eps_q: f64, t_logical: f64) -> (f64, f64) {
    let h = derivative_step(t_logical);
    let base = CqParams::symmetric(eps_q, t_logical).expect("validated coupling");
    let e = |dd: f64, dq: f64| splitting_cq_exact(&base.with_offsets(eps_d + dd, dq));
    (
        (e(h, 0.0) - e(-h, 0.0)) / (2.0 * h),
        (e(0.0, h) - e(0.0, -h)) / (2.0 * h),
    )
}

const SWEET_SPOT_DERIVATIVE_TOL: f64 = 1e-8;
const BISECTION_MAX_ITER: usize = 200;

/// Root of `f` in `[lo, hi]` by bisection, stopping once `|f| < tol`.
fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    if f_lo.abs() < tol {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi.abs() < tol {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NonConvergence(format!(
            "no sign change of the derivative in [{lo}, {hi}]"
        )));
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() < tol {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            return Ok(mid);
        }
    }
    Err(Error::NonConvergence(
        "bisection did not reach the derivative tolerance".into(),
    ))
}

/// Finds the sweet spot of the exact splitting by bisecting its numeric
/// derivative. For the triple dot `t` is the logical coupling and both
/// detunings are located in turn.
pub fn find_sweet_spots(kind: QubitKind, t: f64) -> Result<SweetSpot> {
    if !(t > 0.0) {
        return Err(invalid(format!("tunnel coupling must be positive, got {t}")));
    }
    // Brackets are asymmetric so the midpoint is never the root itself.
    let (lo, hi) = (-3.0 * t, 2.0 * t);
    match kind {
        QubitKind::Cd => {
            let eps_d = bisect_root(|e| dsplitting_cd(e, t), lo, hi, SWEET_SPOT_DERIVATIVE_TOL)?;
            Ok(SweetSpot::Cd { eps_d })
        }
        QubitKind::Cq => {
            let eps_q = bisect_root(|q| dsplitting_cq(0.0, q, t).1, lo, hi, SWEET_SPOT_DERIVATIVE_TOL)?;
            let eps_d = bisect_root(|d| dsplitting_cq(d, eps_q, t).0, lo, hi, SWEET_SPOT_DERIVATIVE_TOL)?;
            Ok(SweetSpot::Cq { eps_d, eps_q })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cd_splitting_examples() {
        assert_eq!(splitting_cd(0.0, 10.0), 20.0);
        assert_eq!(splitting_cd(6.0, 4.0), 10.0);
        assert_eq!(splitting_cd(3.0, 2.0), 5.0);
        let p = CdParams::new(6.0, 4.0).unwrap();
        assert!((splitting_cd_numeric(&p) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn cq_splitting_examples() {
        let t = 3.0;
        let p = CqParams::symmetric(0.0, t).unwrap();
        assert!((splitting_cq_exact(&p) - 2.0 * t).abs() < 1e-12);

        let p = CqParams::symmetric(0.0, 2.0).unwrap().with_offsets(0.1, 0.0);
        assert!((splitting_cq_exact(&p) - 2.0 * 4.01_f64.sqrt()).abs() < 1e-12);

        let p = CqParams::new(0.0, 5.0, 2.5, 2.5).unwrap();
        assert!((splitting_cq_exact(&p) - 75.0_f64.sqrt()).abs() < 1e-12);
    }

    /// Centered first and second differences of `f` at `x`.
    fn fd(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
        let (fp, f0, fm) = (f(x + h), f(x), f(x - h));
        ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
    }

    #[test]
    fn cd_expansion_matches_finite_differences() {
        let e = expansion_cd(0.0, 4.0).unwrap();
        assert_eq!(e.linear_coeff, 0.0);

        let e = expansion_cd(3.0, 2.0).unwrap();
        assert!((e.linear_coeff - 0.6).abs() < 1e-15);
        assert!((e.quadratic_coeff - 0.064).abs() < 1e-15);
        let (d1, d2) = fd(|x| splitting_cd(x, 2.0), 3.0, 1e-4);
        assert!((d1 - 0.6).abs() < 1e-8);
        assert!((0.5 * d2 - 0.064).abs() < 1e-5);

        let e = expansion_cd(4.0, 1.5).unwrap();
        let (d1, d2) = fd(|x| splitting_cd(x, 1.5), 4.0, 1e-4);
        assert!((d1 - e.linear_coeff).abs() < 1e-6 * e.linear_coeff);
        assert!((0.5 * d2 - e.quadratic_coeff).abs() < 1e-4 * e.quadratic_coeff);
    }

    #[test]
    fn cd_expansion_rejects_degenerate_point() {
        assert!(matches!(expansion_cd(0.0, 0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn cq_expansion_examples() {
        let t = 2.5;
        let e = expansion_cq(0.0, t).unwrap();
        assert_eq!(e.linear_coeff, 0.0);
        assert!((e.quadratic_coeff - 1.0 / t).abs() < 1e-15);

        let e = expansion_cq(0.0, 2.0).unwrap();
        let exact = 2.0 * 4.01_f64.sqrt();
        // Remainder is the quartic term -δ⁴/(4t³) = -3.125e-6.
        let remainder = exact - e.evaluate(0.0, 0.1);
        assert!((remainder + 3.125e-6).abs() < 1e-8);

        let e = expansion_cq(3.0, 2.0).unwrap();
        assert!((e.quadratic_coeff - 0.85).abs() < 1e-15);
        let base = CqParams::symmetric(3.0, 2.0).unwrap();
        let (_, d2) = fd(|x| splitting_cq_exact(&base.with_offsets(x, 0.0)), 0.0, 1e-3);
        assert!((0.5 * d2 - 0.85).abs() < 1e-5);

        assert!(expansion_cq(1.0, 0.0).is_err());
    }

    #[test]
    fn leakage_overlap_examples() {
        assert!(leakage_overlap(0.0, 2.0).unwrap().abs() < 1e-15);
        assert!((leakage_overlap(1.0, 2.0).unwrap() - 0.2).abs() < 1e-12);
        assert!((leakage_overlap(1.3, 1.3).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(leakage_overlap(0.0, 0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn leakage_level_stays_at_zero() {
        for &eq in &[-20.0, -3.0, 0.0, 0.7, 12.0] {
            let p = CqParams::symmetric(eq, 3.5).unwrap();
            let eig = herm_eig(&h_cq_even_odd(&p)).unwrap();
            assert!(eig.values[1].abs() < 1e-12);
        }
    }

    #[test]
    fn sweet_spots() {
        match find_sweet_spots(QubitKind::Cd, 10.0).unwrap() {
            SweetSpot::Cd { eps_d } => assert!(eps_d.abs() < 1e-6),
            other => panic!("unexpected {other:?}"),
        }
        match find_sweet_spots(QubitKind::Cq, 14.142).unwrap() {
            SweetSpot::Cq { eps_d, eps_q } => {
                assert!(eps_d.abs() < 1e-6);
                assert!(eps_q.abs() < 1e-6);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(find_sweet_spots(QubitKind::Cq, 0.0).is_err());
    }

    #[test]
    fn cq_linear_derivative_off_sweet_spot() {
        let t = 2.0;
        let (_, dq) = dsplitting_cq(0.0, 3.0, t);
        assert!((dq - 3.0 / (9.0 + 4.0 * t * t).sqrt()).abs() < 1e-6);
    }
}

// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Hamiltonians of the double-dot (charge dipole) and linear triple-dot
//! (charge quadrupole) qubits.
//!
//! Energies are ordinary frequencies `E/h` in GHz. The triple-dot Hamiltonian
//! is written either in the position basis `{|100>, |010>, |001>}` or in the
//! even/odd basis `{C, E, L}` with
//!
//! ```text
//! |C> = |010>,  |E> = (|100> + |001>)/√2,  |L> = (|100> - |001>)/√2
//! ```
//!
//! The common offset `(U1 + U3)/2` is always dropped; it only contributes a
//! global phase.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qmath::{ComplexMatrix, HERMITIAN_TOL};

/// Index of `|C>` in the even/odd basis.
pub const IDX_C: usize = 0;
/// Index of `|E>` in the even/odd basis.
pub const IDX_E: usize = 1;
/// Index of `|L>` in the even/odd basis.
pub const IDX_L: usize = 2;

/// Control parameters of the triple-dot qubit, all in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CqParams {
    pub eps_d: f64,
    pub eps_q: f64,
    pub t_a: f64,
    pub t_b: f64,
}

impl CqParams {
    pub fn new(eps_d: f64, eps_q: f64, t_a: f64, t_b: f64) -> Result<Self> {
        let p = Self { eps_d, eps_q, t_a, t_b };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric tuning (`eps_d = 0`, `t_a = t_b`) parametrised by the
    /// logical coupling `t = √2 t_a`.
    pub fn symmetric(eps_q: f64, t_logical: f64) -> Result<Self> {
        let t_a = t_logical * FRAC_1_SQRT_2;
        Self::new(0.0, eps_q, t_a, t_a)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eps_d, self.eps_q, self.t_a, self.t_b];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite CQ parameter in {self:?}")));
        }
        if self.t_a < 0.0 || self.t_b < 0.0 {
            return Err(invalid(format!(
                "tunnel couplings must be nonnegative (t_a = {}, t_b = {})",
                self.t_a, self.t_b
            )));
        }
        Ok(())
    }

    /// `<C|H|E> = (t_a + t_b)/√2`.
    pub fn t_logical(&self) -> f64 {
        (self.t_a + self.t_b) * FRAC_1_SQRT_2
    }

    pub fn with_offsets(&self, delta_eps_d: f64, delta_eps_q: f64) -> Self {
        Self {
            eps_d: self.eps_d + delta_eps_d,
            eps_q: self.eps_q + delta_eps_q,
            ..*self
        }
    }
}

/// Control parameters of the double-dot qubit, in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdParams {
    pub eps_d: f64,
    pub t: f64,
}

impl CdParams {
    pub fn new(eps_d: f64, t: f64) -> Result<Self> {
        let p = Self { eps_d, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eps_d.is_finite() || !self.t.is_finite() {
            return Err(invalid(format!("non-finite CD parameter in {self:?}")));
        }
        if self.t < 0.0 {
            return Err(invalid(format!("tunnel coupling must be nonnegative, got {}", self.t)));
        }
        Ok(())
    }

    pub fn with_offset(&self, delta_eps_d: f64) -> Self {
        Self {
            eps_d: self.eps_d + delta_eps_d,
            ..*self
        }
    }
}

/// Site potentials `U1, U2, U3` of the triple dot, in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SitePotentials {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

impl SitePotentials {
    /// Site potentials reproducing the given detunings with `(U1 + U3)/2 = 0`.
    pub fn from_detunings(eps_d: f64, eps_q: f64) -> Self {
        Self {
            u1: eps_d,
            u2: eps_q,
            u3: -eps_d,
        }
    }
}

/// Dipolar and quadrupolar detunings `((U1 - U3)/2, U2 - (U1 + U3)/2)`.
pub fn detunings(u: &SitePotentials) -> (f64, f64) {
    (0.5 * (u.u1 - u.u3), u.u2 - 0.5 * (u.u1 + u.u3))
}

/// Triple-dot Hamiltonian in the position basis.
pub fn h_cq_position(p: &CqParams) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[p.eps_d, p.t_a, 0.0], [p.t_a, p.eps_q, p.t_b], [0.0, p.t_b, -p.eps_d]])
}

/// Double-dot Hamiltonian `[[eps_d/2, t], [t, -eps_d/2]]`.
pub fn h_cd(p: &CdParams) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.5 * p.eps_d, p.t], [p.t, -0.5 * p.eps_d]])
}

/// Rows are the bras `<C|`, `<E|`, `<L|` expressed in the position basis.
pub fn even_odd_basis() -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[[0.0, 1.0, 0.0], [s, 0.0, s], [s, 0.0, -s]])
}

/// Transforms a position-basis Hamiltonian into the `{C, E, L}` basis.
pub fn to_even_odd(h_pos: &ComplexMatrix) -> Result<ComplexMatrix> {
    if h_pos.dim() != 3 {
        return Err(crate::Error::DimensionMismatch {
            expected: 3,
            found: h_pos.dim(),
        });
    }
    h_pos.ensure_hermitian(HERMITIAN_TOL)?;
    Ok(h_pos.conjugate_by(&even_odd_basis()))
}

/// Triple-dot Hamiltonian directly in the `{C, E, L}` basis.
pub fn h_cq_even_odd(p: &CqParams) -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    let ce = (p.t_a + p.t_b) * s;
    let cl = (p.t_a - p.t_b) * s;
    ComplexMatrix::from_real_rows(&[[p.eps_q, ce, cl], [ce, 0.0, p.eps_d], [cl, p.eps_d, 0.0]])
}

/// Outer-dot swap `p13` in the position basis.
pub fn permutation_13() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
}

/// `‖[H, p13]‖_F`; zero exactly when `t_a = t_b` and `eps_d = 0`.
pub fn symmetry_residual(p: &CqParams) -> f64 {
    h_cq_position(p).commutator(&permutation_13()).frobenius_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::herm_eigenvalues;

    #[test]
    fn detuning_examples() {
        let d = |u1, u2, u3| detunings(&SitePotentials { u1, u2, u3 });
        assert_eq!(d(0.0, 0.0, 0.0), (0.0, 0.0));
        assert_eq!(d(1.0, 0.0, -1.0), (1.0, 0.0));
        assert_eq!(d(0.0, 1.0, 0.0), (0.0, 1.0));
    }

    #[test]
    fn detunings_invert() {
        for &(ed, eq) in &[(0.3, -1.2), (0.0, 5.0), (-7.5, 2.25)] {
            let u = SitePotentials::from_detunings(ed, eq);
            assert_eq!(detunings(&u), (ed, eq));
        }
    }

    #[test]
    fn position_hamiltonian_examples() {
        let zero = h_cq_position(&CqParams::new(0.0, 0.0, 0.0, 0.0).unwrap());
        assert!(zero.approx_eq(&ComplexMatrix::zeros(3), 1e-300));

        let h = h_cq_position(&CqParams::new(0.0, 5.0, 2.5, 2.5).unwrap());
        let expected = ComplexMatrix::from_real_rows(&[[0.0, 2.5, 0.0], [2.5, 5.0, 2.5], [0.0, 2.5, 0.0]]);
        assert!(h.approx_eq(&expected, 1e-300));
        assert!(h.is_hermitian(1e-15));
    }

    #[test]
    fn negative_couplings_rejected() {
        assert!(CqParams::new(0.0, 0.0, -1.0, 1.0).is_err());
        assert!(CqParams::new(0.0, 0.0, 1.0, -1e-9).is_err());
        assert!(CdParams::new(0.0, -0.5).is_err());
        assert!(CqParams::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn cd_hamiltonian_examples() {
        let h = h_cd(&CdParams::new(0.0, 3.0).unwrap());
        assert!(h.approx_eq(&ComplexMatrix::pauli_x().scale_real(3.0), 1e-300));
        let h = h_cd(&CdParams::new(2.0, 0.0).unwrap());
        assert!(h.approx_eq(&ComplexMatrix::from_diagonal(&[1.0, -1.0]), 1e-300));
        let ev = herm_eigenvalues(&h_cd(&CdParams::new(6.0, 4.0).unwrap())).unwrap();
        assert!((ev[1] - ev[0] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn even_odd_closed_forms() {
        let p = CqParams::new(0.3, 0.5, 0.8, 0.6).unwrap();
        let h = to_even_odd(&h_cq_position(&p)).unwrap();
        assert!((h[(IDX_C, IDX_E)].re - 0.989_949_493_661_166_5).abs() < 1e-12);
        assert!((h[(IDX_C, IDX_L)].re - 0.141_421_356_237_309_5).abs() < 1e-12);
        assert!((h[(IDX_E, IDX_L)].re - 0.3).abs() < 1e-12);
        assert!((h[(IDX_C, IDX_C)].re - 0.5).abs() < 1e-12);
        assert!(h[(IDX_E, IDX_E)].norm() < 1e-12);
        assert!(h[(IDX_L, IDX_L)].norm() < 1e-12);
        assert!(h.approx_eq(&h_cq_even_odd(&p), 1e-12));
    }

    #[test]
    fn symmetric_tuning_is_block_diagonal() {
        let p = CqParams::new(0.0, 1.7, 0.9, 0.9).unwrap();
        let h = to_even_odd(&h_cq_position(&p)).unwrap();
        assert!(h[(IDX_C, IDX_L)].norm() < 1e-15);
        assert!(h[(IDX_E, IDX_L)].norm() < 1e-15);
        // (eps_q/2)(1 + sz) + t sx on {C, E}
        let block = h.submatrix(&[IDX_C, IDX_E]);
        let t = p.t_logical();
        let expected = &ComplexMatrix::from_diagonal(&[1.7, 0.0]) + &ComplexMatrix::pauli_x().scale_real(t);
        assert!(block.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn to_even_odd_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert!(to_even_odd(&m).is_err());
        assert!(to_even_odd(&ComplexMatrix::identity(2)).is_err());
    }

    /// Brute-force `‖HP - PH‖_F` with explicit index loops.
    fn brute_commutator_norm(p: &CqParams) -> f64 {
        let h = [[p.eps_d, p.t_a, 0.0], [p.t_a, p.eps_q, p.t_b], [0.0, p.t_b, -p.eps_d]];
        let perm = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]];
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut c = 0.0;
                for k in 0..3 {
                    c += h[i][k] * perm[k][j] - perm[i][k] * h[k][j];
                }
                s += c * c;
            }
        }
        s.sqrt()
    }

    #[test]
    fn symmetry_residual_examples() {
        let sym = CqParams::new(0.0, 3.3, 1.2, 1.2).unwrap();
        assert!(symmetry_residual(&sym) < 1e-12);

        let tilted = CqParams::new(1.0, 0.0, 1.2, 1.2).unwrap();
        assert!(symmetry_residual(&tilted) > 0.1);

        let uneven = CqParams::new(0.0, 0.0, 0.8, 0.6).unwrap();
        let r = symmetry_residual(&uneven);
        assert!(r > 0.0);
        assert!((r - brute_commutator_norm(&uneven)).abs() < 1e-14);
    }
}

// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices of small fixed dimension.
//!
//! Everything in the toolkit lives in 2, 3, 4 or 9 dimensional Hilbert spaces,
//! so the kernel is a plain row-major `Vec<Complex64>` with a Jacobi Hermitian
//! eigensolver. Time evolution goes through the eigendecomposition, which keeps
//! propagators unitary to round-off.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by [`herm_eig`] and [`expm_unitary`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-9;

const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c64(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major complex entries.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from real rows; panics on ragged input.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), dim, "row {i} has the wrong length");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = c64(v, 0.0);
            }
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = c64(v, 0.0);
        }
        m
    }

    /// Outer product `|v><v|` (unnormalised).
    pub fn projector(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        let mut m = Self::zeros(2);
        m[(0, 1)] = c64(0.0, -1.0);
        m[(1, 0)] = c64(0.0, 1.0);
        m
    }

    pub fn pauli_z() -> Self {
        Self::from_diagonal(&[1.0, -1.0])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M[i][j] - conj(M[j][i])|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() < tol
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let residual = self.hermiticity_residual();
        if residual < tol {
            Ok(())
        } else {
            Err(Error::NotHermitian { residual })
        }
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `U M U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// Real part of `Tr(A B)`, computed without forming the product.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in trace product");
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += (self[(i, k)] * other[(k, i)]).re;
            }
        }
        acc
    }

    /// Principal sub-block given by `indices`.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(indices.len());
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && (self - other).frobenius_norm() < tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Mul<&[Complex64]> for &ComplexMatrix {
    type Output = Vec<Complex64>;
    fn mul(self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:>11.4e}{:+.4e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `V f(diag(lambda)) V^dagger` for a complex-valued spectral function.
    pub fn apply_fn(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let phases: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = c64(0.0, 0.0);
                for (k, p) in phases.iter().enumerate() {
                    acc += v[(i, k)] * p * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|l| c64(l, 0.0))
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Closed form for 2x2 and cyclic complex Jacobi rotations otherwise.
/// Eigenvectors inside a degenerate cluster are an arbitrary orthonormal basis.
pub fn herm_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    m.ensure_hermitian(HERMITIAN_TOL)?;
    match m.dim() {
        1 => Ok(EigenDecomposition {
            values: vec![m[(0, 0)].re],
            vectors: ComplexMatrix::identity(1),
        }),
        2 => Ok(eig_2x2(m)),
        _ => jacobi_eig(m),
    }
}

/// Eigenvalues only, ascending.
pub fn herm_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(herm_eig(m)?.values)
}

fn eig_2x2(m: &ComplexMatrix) -> EigenDecomposition {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    let values = vec![mean - r, mean + r];

    if b.norm() == 0.0 {
        let vectors = if a <= d {
            ComplexMatrix::identity(2)
        } else {
            ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
        };
        return EigenDecomposition { values, vectors };
    }

    // Rotation angle of the real problem [[half, |b|], [|b|, -half]], then
    // restore the phase of b on the second component.
    let theta = 0.5 * b.norm().atan2(half);
    let (s, c) = theta.sin_cos();
    let phase = b.conj() / b.norm();
    let mut vectors = ComplexMatrix::zeros(2);
    // lower eigenvector
    vectors[(0, 0)] = c64(-s, 0.0);
    vectors[(1, 0)] = phase * c;
    // upper eigenvector
    vectors[(0, 1)] = c64(c, 0.0);
    vectors[(1, 1)] = phase * s;
    EigenDecomposition { values, vectors }
}

fn jacobi_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = m.dim();
    let mut a = m.clone();
    // Symmetrise so round-off asymmetry does not bias the rotations.
    for i in 0..n {
        a[(i, i)] = c64(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= 1e-17 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= 1e-300 || b <= 1e-18 * scale {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let e = apq.conj() / b; // e^{-i phi}
                                        // G = D R with D = diag(1, e^{-i phi}), R = [[c, s], [-s, c]]
                let g00 = c64(c, 0.0);
                let g01 = c64(s, 0.0);
                let g10 = e * (-s);
                let g11 = e * c;
                // A <- A G
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * g00 + aiq * g10;
                    a[(i, q)] = aip * g01 + aiq * g11;
                }
                // A <- G^dagger A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = g00.conj() * apj + g10.conj() * aqj;
                    a[(q, j)] = g01.conj() * apj + g11.conj() * aqj;
                }
                a[(p, q)] = c64(0.0, 0.0);
                a[(q, p)] = c64(0.0, 0.0);
                a[(p, p)] = c64(a[(p, p)].re, 0.0);
                a[(q, q)] = c64(a[(q, q)].re, 0.0);
                // V <- V G
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * g00 + viq * g10;
                    v[(i, q)] = vip * g01 + viq * g11;
                }
            }
        }
    }
    if !converged && off_norm(&a) > 1e-13 * scale {
        return Err(Error::NonConvergence(format!(
            "Jacobi eigensolver: off-diagonal norm {:.3e} after {JACOBI_MAX_SWEEPS} sweeps",
            off_norm(&a)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = v[(i, k)];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// `U = exp(-i 2 pi H tau)` for `H` in GHz and `tau` in ns.
pub fn expm_unitary(h: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "evolution time must be nonnegative, got {tau}"
        )));
    }
    let eig = herm_eig(h)?;
    Ok(eig.apply_fn(|l| {
        let phase = -2.0 * PI * l * tau;
        c64(phase.cos(), phase.sin())
    }))
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `‖V^dagger V - I‖_F`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    (&(&u.adjoint() * u) - &ComplexMatrix::identity(u.dim())).frobenius_norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn check_decomposition(m: &ComplexMatrix, eig: &EigenDecomposition) {
        assert!(unitarity_defect(&eig.vectors) < 1e-10);
        let rec = eig.reconstruct();
        let scale = m.frobenius_norm().max(1.0);
        assert!((&rec - m).frobenius_norm() < 1e-10 * scale);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn diagonal_spectrum() {
        let m = ComplexMatrix::from_diagonal(&[3.0, 1.0, 2.0]);
        let eig = herm_eig(&m).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);
        check_decomposition(&m, &eig);
    }

    #[test]
    fn pauli_x_spectrum() {
        let eig = herm_eig(&ComplexMatrix::pauli_x()).unwrap();
        assert!(close(eig.values[0], -1.0, 1e-15));
        assert!(close(eig.values[1], 1.0, 1e-15));
        check_decomposition(&ComplexMatrix::pauli_x(), &eig);
    }

    #[test]
    fn pauli_y_and_phased_2x2() {
        let eig = herm_eig(&ComplexMatrix::pauli_y()).unwrap();
        check_decomposition(&ComplexMatrix::pauli_y(), &eig);
        let mut m = ComplexMatrix::from_diagonal(&[0.3, -1.2]);
        m[(0, 1)] = c64(0.4, -0.7);
        m[(1, 0)] = c64(0.4, 0.7);
        let eig = herm_eig(&m).unwrap();
        check_decomposition(&m, &eig);
    }

    #[test]
    fn chain_spectrum() {
        // lambda (lambda^2 - t^2 - delta^2) = 0
        let m = ComplexMatrix::from_real_rows(&[[0.0, 2.0, 0.0], [2.0, 0.0, 0.1], [0.0, 0.1, 0.0]]);
        let eig = herm_eig(&m).unwrap();
        let r = 4.01_f64.sqrt();
        assert!(close(eig.values[0], -r, 1e-12));
        assert!(close(eig.values[1], 0.0, 1e-12));
        assert!(close(eig.values[2], r, 1e-12));
        check_decomposition(&m, &eig);
    }

    #[test]
    fn degenerate_cluster_is_orthonormal() {
        let m = ComplexMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -2.0]]);
        let eig = herm_eig(&m).unwrap();
        check_decomposition(&m, &eig);
        let zero = ComplexMatrix::zeros(4);
        let eig = herm_eig(&zero).unwrap();
        check_decomposition(&zero, &eig);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        match herm_eig(&m) {
            Err(Error::NotHermitian { residual }) => assert!(close(residual, 1.0, 1e-15)),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let u = expm_unitary(&ComplexMatrix::zeros(3), 7.5).unwrap();
        assert!(u.approx_eq(&ComplexMatrix::identity(3), 1e-15));
    }

    #[test]
    fn expm_quarter_period_of_pauli_x() {
        let u = expm_unitary(&ComplexMatrix::pauli_x(), 0.25).unwrap();
        let expected = ComplexMatrix::pauli_x().scale(c64(0.0, -1.0));
        assert!(u.approx_eq(&expected, 1e-14));
    }

    #[test]
    fn expm_full_phase_is_identity() {
        let u = expm_unitary(&ComplexMatrix::from_diagonal(&[1.0, 0.0]), 1.0).unwrap();
        assert!(u.approx_eq(&ComplexMatrix::identity(2), 1e-14));
    }

    #[test]
    fn expm_rejects_negative_time() {
        assert!(expm_unitary(&ComplexMatrix::pauli_z(), -1.0).is_err());
    }

    #[test]
    fn kron_examples() {
        let i4 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert!(i4.approx_eq(&ComplexMatrix::identity(4), 0.0 + 1e-300));
        let zz = kron(&ComplexMatrix::pauli_z(), &ComplexMatrix::pauli_z());
        assert!(zz.approx_eq(&ComplexMatrix::from_diagonal(&[1.0, -1.0, -1.0, 1.0]), 1e-300));
    }

    #[test]
    fn kron_index_layout() {
        let a = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let b = ComplexMatrix::from_real_rows(&[[0.0, 5.0, 0.0], [6.0, 7.0, 0.0], [0.0, 0.0, 1.0]]);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..3 {
                    for q in 0..3 {
                        assert_eq!(k[(i * 3 + p, j * 3 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }
}

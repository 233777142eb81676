//! Two-mode beam model exposing non-Mueller pre-Mueller matrices.
//!
//! A beam restricted to two orthonormal spatial modes `ψ1, ψ2` has pure
//! states in `C² ⊗ C²`, ordered `{x⊗ψ1, x⊗ψ2, y⊗ψ1, y⊗ψ2}`. Its BCP matrix is
//! a 4×4 hermitian coefficient matrix `C_{(j,m),(k,n)}`. A transversely
//! homogeneous system acts on the polarization indices of every mode block
//! `(m, n)` alike. Feeding it the maximally entangled input
//! `E = x⊗ψ1 + y⊗ψ2` returns exactly `H_M`, so a negative eigenvalue of `H_M`
//! is a generalized Jones vector with negative expectation.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::calculus::{a_inverse, a_matrix, MuellerCandidate};
use crate::choi::physicality;
use crate::error::{CertError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficient matrix of a BCP kernel on two orthonormal modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeBcp(pub Matrix4<Complex64>);

/// Generalized Jones vector on `{x⊗ψ1, x⊗ψ2, y⊗ψ1, y⊗ψ2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeJones(pub Vector4<Complex64>);

impl TwoModeJones {
    pub fn from_real(e: [f64; 4]) -> Self {
        Self(Vector4::from(e).map(|x| Complex64::new(x, 0.0)))
    }

    /// `E(±) = x⊗ψ1 ± y⊗ψ2`.
    pub fn e_pm(sign: f64) -> Self {
        Self::from_real([1.0, 0.0, 0.0, sign])
    }

    /// `F(±) = x⊗ψ2 ± y⊗ψ1`.
    pub fn f_pm(sign: f64) -> Self {
        Self::from_real([0.0, 1.0, sign, 0.0])
    }

    /// `E(θ) = cos θ x⊗ψ1 + sin θ y⊗ψ2`.
    pub fn e_theta(theta: f64) -> Self {
        Self::from_real([theta.cos(), 0.0, 0.0, theta.sin()])
    }

    /// `F(θ) = cos θ x⊗ψ2 + sin θ y⊗ψ1`.
    pub fn f_theta(theta: f64) -> Self {
        Self::from_real([0.0, theta.cos(), theta.sin(), 0.0])
    }

    /// Entangled iff the 2×2 coefficient matrix (polarization × mode) has rank 2.
    pub fn is_entangled(&self, tol: f64) -> bool {
        let e = &self.0;
        let det = e[0] * e[3] - e[1] * e[2];
        det.norm() > tol * self.0.norm_squared()
    }
}

impl TwoModeBcp {
    /// Pure state `e e†`.
    pub fn pure(e: &TwoModeJones) -> Self {
        Self(e.0 * e.0.adjoint())
    }

    /// Product of a polarization coherency matrix and a mode correlation
    /// matrix: `C_{(j,m),(k,n)} = P_jk Q_mn`.
    pub fn separable(polarization: &Matrix2<Complex64>, modes: &Matrix2<Complex64>) -> Self {
        Self(Matrix4::from_fn(|r, c| polarization[(r / 2, c / 2)] * modes[(r % 2, c % 2)]))
    }

    /// The 2×2 polarization block for mode pair `(m, n)`.
    pub fn block(&self, m: usize, n: usize) -> Matrix2<Complex64> {
        Matrix2::from_fn(|j, k| self.0[(2 * j + m, 2 * k + n)])
    }

    pub fn set_block(&mut self, m: usize, n: usize, b: &Matrix2<Complex64>) {
        for j in 0..2 {
            for k in 0..2 {
                self.0[(2 * j + m, 2 * k + n)] = b[(j, k)];
            }
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.0 - self.0.adjoint()).norm() <= tol * self.0.norm().max(f64::MIN_POSITIVE)
    }

    /// Positive semidefinite within `tol·‖C‖`.
    pub fn physical(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let (vals, _) = crate::linalg::hermitian_eigen(&self.0);
        let scale = vals[0].abs().max(vals[3].abs());
        vals[3] >= -tol * scale
    }
}

/// `Φ⁽⁰⁾ = E E†` with `E = x⊗ψ1 + y⊗ψ2`, coefficients `(1, 0, 0, 1)`.
pub fn witness_input() -> TwoModeBcp {
    TwoModeBcp::pure(&TwoModeJones(Vector4::new(ONE, ZERO, ZERO, ONE)))
}

/// Coherency-level superoperator of `M`: `vec(Φ') = A⁻¹ M A vec(Φ)`.
pub fn coherency_superoperator(m: &MuellerCandidate) -> Matrix4<Complex64> {
    let mc = m.matrix().map(|x| Complex64::new(x, 0.0));
    a_inverse() * mc * a_matrix()
}

/// Polarization-only action of `M` on a two-mode BCP matrix: every mode
/// block transforms by the coherency map equivalent to `S → M S`.
pub fn extended_action(m: &MuellerCandidate, c: &TwoModeBcp) -> TwoModeBcp {
    let k = coherency_superoperator(m);
    let mut out = TwoModeBcp(Matrix4::zeros());
    for mi in 0..2 {
        for ni in 0..2 {
            let b = c.block(mi, ni);
            let v = k * Vector4::new(b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]);
            out.set_block(mi, ni, &Matrix2::new(v[0], v[1], v[2], v[3]));
        }
    }
    out
}

/// `e† C e`.
pub fn expectation(c: &TwoModeBcp, e: &TwoModeJones) -> Result<f64> {
    let dev = (c.0 - c.0.adjoint()).norm();
    if dev > crate::calculus::DEFAULT_TOL * c.0.norm().max(1.0) {
        return Err(CertError::NonHermitianInput { deviation: dev });
    }
    Ok((e.0.adjoint() * c.0 * e.0)[(0, 0)].re)
}

/// Unit-norm generalized Jones vector with negative expectation against
/// `extended_action(M, witness_input())`, present iff `H_M` has an
/// eigenvalue below `−tol·‖H‖`. Its expectation equals that eigenvalue.
pub fn witness_certificate(m: &MuellerCandidate, tol: f64) -> Option<TwoModeJones> {
    let r = physicality(m, tol);
    if r.is_mueller {
        None
    } else {
        Some(TwoModeJones(r.min_eigenvector))
    }
}

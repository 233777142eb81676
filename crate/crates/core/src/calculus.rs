//! Jones, coherency, Stokes, Mueller and H representations, and the exact
//! linear maps between them.

use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{CertError, Result};

/// Relative tolerance used by every predicate unless the caller overrides it.
pub const DEFAULT_TOL: f64 = 1e-9;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// The τ basis: `τ0 = I`, `τ1 = σ3`, `τ2 = σ1`, `τ3 = σ2`.
///
/// Circular polarization (eigenstates of σ2) sits on the third Stokes axis.
pub fn tau() -> [Matrix2<C64>; 4] {
    [
        Matrix2::new(ONE, ZERO, ZERO, ONE),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
    ]
}

/// The matrix `A` with `S = A Φ̃`, where `Φ̃` is the row-major vectorization
/// of the coherency matrix.
pub fn a_matrix() -> Matrix4<C64> {
    Matrix4::new(
        ONE, ZERO, ZERO, ONE, //
        ONE, ZERO, ZERO, -ONE, //
        ZERO, ONE, ONE, ZERO, //
        ZERO, I, -I, ZERO,
    )
}

/// `A⁻¹ = ½ A†`.
pub fn a_inverse() -> Matrix4<C64> {
    a_matrix().adjoint().scale(0.5)
}

/// Lorentz metric `G = diag(1, −1, −1, −1)`.
pub fn g_metric() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `U_ab = ½ τ_a ⊗ τ_b*`, cached. Row/column index of the 4×4 is
/// `2·j + m` with `j` from the first factor and `m` from the conjugated one.
pub fn u_basis() -> &'static [[Matrix4<C64>; 4]; 4] {
    static BASIS: OnceLock<[[Matrix4<C64>; 4]; 4]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let t = tau();
        std::array::from_fn(|a| std::array::from_fn(|b| kron2(&t[a], &t[b].conjugate()).scale(0.5)))
    })
}

/// Row-major vectorization `(K11, K12, K21, K22)`.
pub fn vectorize(k: &Matrix2<C64>) -> Vector4<C64> {
    Vector4::new(k[(0, 0)], k[(0, 1)], k[(1, 0)], k[(1, 1)])
}

pub fn devectorize(v: &Vector4<C64>) -> Matrix2<C64> {
    Matrix2::new(v[0], v[1], v[2], v[3])
}

fn is_hermitian4(h: &Matrix4<C64>, tol: f64) -> (bool, f64) {
    let dev = (h - h.adjoint()).norm();
    (dev <= tol * h.norm().max(f64::MIN_POSITIVE), dev)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector(pub Vector4<f64>);

impl StokesVector {
    pub fn new(s: [f64; 4]) -> Self {
        Self(Vector4::from(s))
    }

    pub fn intensity(&self) -> f64 {
        self.0[0]
    }

    /// `SᵀGS = S0² − S1² − S2² − S3²`.
    pub fn lorentz_norm(&self) -> f64 {
        let s = &self.0;
        s[0] * s[0] - s[1] * s[1] - s[2] * s[2] - s[3] * s[3]
    }

    /// Member of the closed solid forward light cone (apex excluded).
    pub fn physical(&self, tol: f64) -> bool {
        let s0 = self.0[0];
        s0 > 0.0 && self.lorentz_norm() >= -tol * s0 * s0
    }

    /// On the cone surface: a fully polarized state.
    pub fn pure(&self, tol: f64) -> bool {
        let s0 = self.0[0];
        self.physical(tol) && self.lorentz_norm().abs() <= tol * s0 * s0
    }

    pub fn degree_of_polarization(&self) -> f64 {
        let s = &self.0;
        (s[1] * s[1] + s[2] * s[2] + s[3] * s[3]).sqrt() / s[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencyMatrix(pub Matrix2<C64>);

impl CoherencyMatrix {
    pub fn new(phi: Matrix2<C64>) -> Self {
        Self(phi)
    }

    /// `⟨E E†⟩` for a single deterministic Jones vector.
    pub fn from_jones_vector(e1: C64, e2: C64) -> Self {
        Self(Matrix2::new(e1 * e1.conj(), e1 * e2.conj(), e2 * e1.conj(), e2 * e2.conj()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let dev = (self.0 - self.0.adjoint()).norm();
        dev <= tol * self.0.norm().max(f64::MIN_POSITIVE)
    }

    /// `tr Φ > 0` and `det Φ ≥ −tol·(tr Φ)²`, plus hermiticity.
    pub fn is_physical(&self, tol: f64) -> bool {
        let tr = self.0.trace().re;
        let det = self.0.determinant().re;
        self.is_hermitian(tol) && tr > 0.0 && det >= -tol * tr * tr
    }

    /// Output of a deterministic system: `J Φ J†`.
    pub fn transform(&self, j: &JonesMatrix) -> Self {
        Self(j.0 * self.0 * j.0.adjoint())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix(pub Matrix2<C64>);

impl JonesMatrix {
    pub fn new(j: Matrix2<C64>) -> Self {
        Self(j)
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn from_real(entries: [[f64; 2]; 2]) -> Self {
        Self(Matrix2::from_fn(|r, c| C64::new(entries[r][c], 0.0)))
    }

    pub fn vectorize(&self) -> Vector4<C64> {
        vectorize(&self.0)
    }

    pub fn from_vector(v: &Vector4<C64>) -> Self {
        Self(devectorize(v))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn determinant(&self) -> C64 {
        self.0.determinant()
    }

    /// Rotator turning the Stokes (S1, S2) plane by `angle` about the S3 axis.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        Self::from_real([[c, -s], [s, c]])
    }

    /// Pure boost along S1 with the given rapidity: `diag(e^{χ/2}, e^{−χ/2})`.
    pub fn boost(rapidity: f64) -> Self {
        Self::from_real([[(0.5 * rapidity).exp(), 0.0], [0.0, (-0.5 * rapidity).exp()]])
    }

    /// Rescale to unit determinant (an SL(2,C) element), if nonsingular.
    pub fn to_unit_determinant(&self) -> Option<Self> {
        let det = self.determinant();
        if det.norm() == 0.0 {
            return None;
        }
        Some(Self(self.0.map(|z| z / det.sqrt())))
    }
}

/// A real 4×4 matrix under test, with lazily cached `H_M` and `N = G Mᵀ G M`.
#[derive(Debug, Clone)]
pub struct MuellerCandidate {
    m: Matrix4<f64>,
    h: OnceLock<HermitianChoi>,
    n: OnceLock<Matrix4<f64>>,
}

impl PartialEq for MuellerCandidate {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl From<Matrix4<f64>> for MuellerCandidate {
    fn from(m: Matrix4<f64>) -> Self {
        Self::new(m)
    }
}

impl MuellerCandidate {
    pub fn new(m: Matrix4<f64>) -> Self {
        Self { m, h: OnceLock::new(), n: OnceLock::new() }
    }

    /// Row-major array constructor.
    pub fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        Self::new(Matrix4::from_fn(|r, c| rows[r][c]))
    }

    pub fn diagonal(d: [f64; 4]) -> Self {
        Self::new(Matrix4::from_diagonal(&Vector4::from(d)))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    pub fn h(&self) -> &HermitianChoi {
        self.h.get_or_init(|| h_from_matrix(&self.m))
    }

    pub fn n(&self) -> &Matrix4<f64> {
        self.n.get_or_init(|| {
            let g = g_metric();
            g * self.m.transpose() * g * self.m
        })
    }

    pub fn apply(&self, s: &StokesVector) -> StokesVector {
        StokesVector(self.m * s.0)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        crate::linalg::spectral_norm(&self.m)
    }
}

/// The hermitian 4×4 matrix in one-to-one correspondence with a real 4×4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianChoi(pub Matrix4<C64>);

impl HermitianChoi {
    pub fn new(h: Matrix4<C64>) -> Self {
        Self(h)
    }

    /// `J̃ J̃†` for a single Jones matrix.
    pub fn from_jones(j: &JonesMatrix) -> Self {
        let v = j.vectorize();
        Self(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        is_hermitian4(&self.0, tol).0
    }
}

/// `S_a = tr(τ_a Φ)`. Fails if any trace has a non-negligible imaginary part.
pub fn stokes_from_coherency(phi: &CoherencyMatrix) -> Result<StokesVector> {
    let t = tau();
    let scale = phi.0.norm().max(1.0);
    let mut s = [0.0; 4];
    let mut worst: f64 = 0.0;
    for (a, ta) in t.iter().enumerate() {
        let z = (ta * phi.0).trace();
        worst = worst.max(z.im.abs());
        s[a] = z.re;
    }
    if worst > DEFAULT_TOL * scale {
        return Err(CertError::NonHermitianInput { deviation: worst });
    }
    Ok(StokesVector::new(s))
}

/// `Φ = ½ Σ S_a τ_a`.
pub fn coherency_from_stokes(s: &StokesVector) -> CoherencyMatrix {
    let t = tau();
    let phi = (0..4).fold(Matrix2::zeros(), |acc, a| acc + t[a].scale(0.5 * s.0[a]));
    CoherencyMatrix(phi)
}

/// `M(J) = A (J ⊗ J*) A⁻¹`; valid for singular `J` as well.
pub fn mueller_from_jones(j: &JonesMatrix) -> MuellerCandidate {
    let jj = kron2(&j.0, &j.0.conjugate());
    let m = a_matrix() * jj * a_inverse();
    MuellerCandidate::new(m.map(|z| z.re))
}

fn h_from_matrix(m: &Matrix4<f64>) -> HermitianChoi {
    let u = u_basis();
    let mut h = Matrix4::<C64>::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let mab = m[(a, b)];
            if mab != 0.0 {
                h += u[a][b].scale(mab);
            }
        }
    }
    HermitianChoi(h)
}

/// `H_M = ½ Σ M_ab τ_a ⊗ τ_b*`.
pub fn h_from_m(m: &MuellerCandidate) -> HermitianChoi {
    *m.h()
}

/// `(M_H)_ab = ½ tr(H τ_a ⊗ τ_b*)`, the inverse of [`h_from_m`].
pub fn m_from_h(h: &HermitianChoi) -> Result<MuellerCandidate> {
    let (ok, deviation) = is_hermitian4(&h.0, DEFAULT_TOL);
    if !ok {
        return Err(CertError::NonHermitianInput { deviation });
    }
    let u = u_basis();
    // tr(H U_ab) with U_ab = ½ τ_a ⊗ τ_b* equals (M_H)_ab.
    let m = Matrix4::from_fn(|a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                acc += h.0[(r, c)] * u[a][b][(c, r)];
            }
        }
        acc.re
    });
    Ok(MuellerCandidate::new(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn tau_orthogonality() {
        let t = tau();
        for a in 0..4 {
            for b in 0..4 {
                let tr = (t[a] * t[b]).trace();
                let expected = if a == b { 2.0 } else { 0.0 };
                assert!(close(tr.re, expected, 1e-15) && tr.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tau3_conjugation_signs() {
        let t = tau();
        assert_eq!(t[3].conjugate(), -t[3]);
        for ta in &t[..3] {
            assert_eq!(ta.conjugate(), *ta);
        }
    }

    #[test]
    fn a_inverse_is_half_adjoint() {
        let prod = a_matrix() * a_inverse();
        assert!((prod - Matrix4::identity()).norm() == 0.0);
    }

    #[test]
    fn u_basis_orthonormal() {
        let u = u_basis();
        for a in 0..4 {
            for b in 0..4 {
                assert!((u[a][b] - u[a][b].adjoint()).norm() == 0.0);
                assert!((u[a][b] * u[a][b] - Matrix4::identity() * C64::new(0.25, 0.0)).norm() < 1e-15);
                for c in 0..4 {
                    for d in 0..4 {
                        let tr = (u[a][b] * u[c][d]).trace();
                        let expected = if a == c && b == d { 1.0 } else { 0.0 };
                        assert!(close(tr.re, expected, 1e-15) && tr.im.abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn stokes_of_basic_states() {
        let unpol = CoherencyMatrix(Matrix2::identity().scale(0.5));
        assert_eq!(stokes_from_coherency(&unpol).unwrap(), StokesVector::new([1.0, 0.0, 0.0, 0.0]));

        let x = CoherencyMatrix(Matrix2::new(ONE, ZERO, ZERO, ZERO));
        assert_eq!(stokes_from_coherency(&x).unwrap(), StokesVector::new([1.0, 1.0, 0.0, 0.0]));

        let circ = CoherencyMatrix(Matrix2::new(ONE, -I, I, ONE).scale(0.5));
        let s = stokes_from_coherency(&circ).unwrap();
        assert!((s.0 - Vector4::new(1.0, 0.0, 0.0, 1.0)).norm() < 1e-15);
        assert!(s.pure(DEFAULT_TOL));
    }

    #[test]
    fn non_hermitian_coherency_rejected() {
        let phi = CoherencyMatrix(Matrix2::new(ONE, ONE, ZERO, ONE));
        assert!(matches!(stokes_from_coherency(&phi), Err(CertError::NonHermitianInput { .. })));
    }

    #[test]
    fn coherency_of_basic_stokes() {
        let phi = coherency_from_stokes(&StokesVector::new([1.0, 0.0, 0.0, 0.0]));
        assert_eq!(phi.0, Matrix2::identity().scale(0.5));
        let phi = coherency_from_stokes(&StokesVector::new([1.0, 1.0, 0.0, 0.0]));
        assert_eq!(phi.0, Matrix2::new(ONE, ZERO, ZERO, ZERO));
    }

    #[test]
    fn stokes_predicates() {
        assert!(StokesVector::new([1.0, 0.3, 0.2, 0.1]).physical(DEFAULT_TOL));
        assert!(!StokesVector::new([1.0, 0.3, 0.2, 0.1]).pure(DEFAULT_TOL));
        assert!(StokesVector::new([1.0, 0.6, 0.0, 0.8]).pure(DEFAULT_TOL));
        assert!(!StokesVector::new([1.0, 1.1, 0.0, 0.0]).physical(DEFAULT_TOL));
        assert!(!StokesVector::new([-1.0, 0.0, 0.0, 0.0]).physical(DEFAULT_TOL));
        assert!(!StokesVector::new([0.0, 0.0, 0.0, 0.0]).physical(DEFAULT_TOL));
    }

    #[test]
    fn coherency_predicates() {
        assert!(CoherencyMatrix::from_jones_vector(ONE, I).is_physical(DEFAULT_TOL));
        let bad = CoherencyMatrix(Matrix2::new(ONE, ONE.scale(2.0), ONE.scale(2.0), ONE));
        assert!(bad.is_hermitian(DEFAULT_TOL));
        assert!(!bad.is_physical(DEFAULT_TOL));
    }

    #[test]
    fn mueller_of_identity_and_phase() {
        let m = mueller_from_jones(&JonesMatrix::identity());
        assert!((m.matrix() - Matrix4::identity()).norm() < 1e-15);
        let phase = C64::from_polar(1.0, 0.731);
        let m = mueller_from_jones(&JonesMatrix(Matrix2::<C64>::identity().map(|z| z * phase)));
        assert!((m.matrix() - Matrix4::identity()).norm() < 1e-15);
    }

    #[test]
    fn mueller_of_x_polarizer() {
        let m = mueller_from_jones(&JonesMatrix::from_real([[1.0, 0.0], [0.0, 0.0]]));
        let expected = MuellerCandidate::from_rows([
            [0.5, 0.5, 0.0, 0.0],
            [0.5, 0.5, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ]);
        assert!((m.matrix() - expected.matrix()).norm() < 1e-15);
    }

    #[test]
    fn h_of_identity_is_rank_one() {
        let h = h_from_m(&MuellerCandidate::new(Matrix4::identity()));
        let v = Vector4::new(ONE, ZERO, ZERO, ONE);
        assert!((h.0 - v * v.adjoint()).norm() < 1e-15);
    }

    #[test]
    fn h_of_depolarizer_is_half_identity() {
        let h = h_from_m(&MuellerCandidate::diagonal([1.0, 0.0, 0.0, 0.0]));
        assert!((h.0 - Matrix4::identity().scale(0.5)).norm() < 1e-15);
        let m = m_from_h(&HermitianChoi(Matrix4::<C64>::identity() * C64::new(0.5, 0.0))).unwrap();
        assert!((m.matrix() - MuellerCandidate::diagonal([1.0, 0.0, 0.0, 0.0]).matrix()).norm() < 1e-15);
    }

    #[test]
    fn h_of_diagonal_block_structure() {
        let d = [0.9, 0.4, -0.3, 0.2];
        let h = h_from_m(&MuellerCandidate::diagonal(d)).0;
        let c = |x: f64| C64::new(x, 0.0);
        let expected = Matrix4::new(
            c(d[0] + d[1]), ZERO, ZERO, c(d[2] + d[3]),
            ZERO, c(d[0] - d[1]), c(d[2] - d[3]), ZERO,
            ZERO, c(d[2] - d[3]), c(d[0] - d[1]), ZERO,
            c(d[2] + d[3]), ZERO, ZERO, c(d[0] + d[1]),
        )
        .scale(0.5);
        assert!((h - expected).norm() < 1e-15);
    }

    #[test]
    fn h_matches_explicit_table_entries() {
        let m = Matrix4::from_fn(|r, c| ((r * 4 + c) as f64 * 0.37).sin());
        let h = h_from_m(&MuellerCandidate::new(m)).0;
        let e = |a: usize, b: usize| m[(a, b)];
        let half = |z: C64| z.scale(0.5);
        // a few spot entries from the closed-form table
        let h01 = half(C64::new(e(0, 2) + e(1, 2), e(0, 3) + e(1, 3)));
        let h02 = half(C64::new(e(2, 0) + e(2, 1), -(e(3, 0) + e(3, 1))));
        let h03 = half(C64::new(e(2, 2) + e(3, 3), e(2, 3) - e(3, 2)));
        let h13 = half(C64::new(e(2, 0) - e(2, 1), -(e(3, 0) - e(3, 1))));
        let h12 = half(C64::new(e(2, 2) - e(3, 3), -(e(2, 3) + e(3, 2))));
        let h33 = half(C64::new(e(0, 0) + e(1, 1) - e(0, 1) - e(1, 0), 0.0));
        for (got, want) in [(h[(0, 1)], h01), (h[(0, 2)], h02), (h[(0, 3)], h03), (h[(1, 3)], h13), (h[(1, 2)], h12), (h[(3, 3)], h33)] {
            assert!((got - want).norm() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn m_from_h_rejects_non_hermitian() {
        let mut h = Matrix4::<C64>::identity();
        h[(0, 1)] = ONE;
        assert!(matches!(m_from_h(&HermitianChoi(h)), Err(CertError::NonHermitianInput { .. })));
    }

    #[test]
    fn vectorization_convention() {
        assert_eq!(vectorize(&Matrix2::identity()), Vector4::new(ONE, ZERO, ZERO, ONE));
        assert_eq!(vectorize(&Matrix2::new(ZERO, ONE, ZERO, ZERO)), Vector4::new(ZERO, ONE, ZERO, ZERO));
        let k = Matrix2::new(C64::new(1.0, 2.0), C64::new(3.0, -4.0), C64::new(-5.0, 6.0), C64::new(7.0, 8.0));
        assert_eq!(devectorize(&vectorize(&k)), k);
    }

    #[test]
    fn trace_identity_on_fixed_matrix() {
        let m = MuellerCandidate::from_rows([
            [1.0, 0.2, -0.1, 0.05],
            [0.1, 0.7, 0.3, 0.0],
            [0.0, -0.2, 0.4, 0.1],
            [0.3, 0.0, 0.2, -0.6],
        ]);
        // tr H = 2·M00: only τ0 ⊗ τ0 has nonzero trace
        assert!(close(h_from_m(&m).trace(), 2.0, 1e-14));
    }

    #[test]
    fn rotation_and_boost_are_lorentz() {
        let g = g_metric();
        let r = mueller_from_jones(&JonesMatrix::rotation(0.8));
        let b = mueller_from_jones(&JonesMatrix::boost(0.6));
        for l in [r.matrix(), b.matrix()] {
            assert!((l.transpose() * g * l - g).norm() < 1e-14);
        }
        assert!((r.matrix()[(1, 1)] - 0.8f64.cos()).abs() < 1e-15);
        assert!((r.matrix()[(2, 1)] - 0.8f64.sin()).abs() < 1e-15);
        assert!((b.matrix()[(0, 0)] - 0.6f64.cosh()).abs() < 1e-15);
        assert!((b.matrix()[(0, 1)] - 0.6f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn unit_determinant_rescale() {
        let j = JonesMatrix(Matrix2::new(C64::new(2.0, 1.0), ONE, I, C64::new(0.5, 0.0)));
        let u = j.to_unit_determinant().unwrap();
        assert!((u.determinant() - ONE).norm() < 1e-14);
        assert!(JonesMatrix::from_real([[1.0, 0.0], [0.0, 0.0]]).to_unit_determinant().is_none());
    }
}

//! Physicality of `M` through the spectrum of `H_M`.
//!
//! `M` is a Mueller matrix iff `H_M ⪰ 0`, a Mueller-Jones matrix iff `H_M`
//! is rank one and positive, and every Mueller matrix is realized by the
//! Jones ensemble read off the spectral decomposition of `H_M`.

use nalgebra::Vector4;
use num_complex::Complex64;

use crate::calculus::{mueller_from_jones, JonesMatrix, MuellerCandidate};
use crate::error::{CertError, Result};
use crate::linalg::hermitian_eigen;

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalityReport {
    /// Eigenvalues of `H_M`, descending.
    pub eigenvalues: [f64; 4],
    pub min_eigenvalue: f64,
    /// Eigenvector of the smallest eigenvalue: the most violating Jones
    /// direction when `is_mueller` is false.
    pub min_eigenvector: Vector4<Complex64>,
    pub is_mueller: bool,
    /// Eigenvalues above `tol·‖H‖`.
    pub rank: usize,
    /// Spectral norm `‖H‖ = max |λ|`.
    pub h_norm: f64,
}

/// One ensemble member: `weight · M(jones)` with `‖jones‖_F = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleItem {
    pub weight: f64,
    pub jones: JonesMatrix,
}

/// Convex-sum realization `H_M = Σ w_k J̃_k J̃_k†`.
///
/// When `H_M` has repeated eigenvalues the realization is not unique; this
/// is the minimal one (size = rank) from the eigendecomposition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JonesEnsemble {
    pub items: Vec<EnsembleItem>,
}

impl JonesEnsemble {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `Σ w_k M(J_k)`.
    pub fn mueller(&self) -> MuellerCandidate {
        let m = self
            .items
            .iter()
            .fold(nalgebra::Matrix4::zeros(), |acc, it| acc + mueller_from_jones(&it.jones).matrix() * it.weight);
        MuellerCandidate::new(m)
    }
}

/// Rotate the global phase so the largest-magnitude component is real positive.
fn fix_phase(v: &Vector4<Complex64>) -> Vector4<Complex64> {
    let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
    if pivot.norm() == 0.0 {
        return *v;
    }
    let phase = pivot.conj() / pivot.norm();
    v.map(|z| z * phase)
}

pub fn physicality(m: &MuellerCandidate, tol: f64) -> PhysicalityReport {
    let (eigenvalues, vectors) = hermitian_eigen(m.h().matrix());
    let h_norm = eigenvalues[0].abs().max(eigenvalues[3].abs());
    let threshold = tol * h_norm;
    let min_eigenvalue = eigenvalues[3];
    PhysicalityReport {
        eigenvalues,
        min_eigenvalue,
        min_eigenvector: fix_phase(&vectors.column(3).into_owned()),
        is_mueller: min_eigenvalue >= -threshold,
        rank: eigenvalues.iter().filter(|&&l| l > threshold).count(),
        h_norm,
    }
}

/// Spectral Jones-ensemble realization of a physical Mueller matrix.
pub fn jones_ensemble(m: &MuellerCandidate, tol: f64) -> Result<JonesEnsemble> {
    let (eigenvalues, vectors) = hermitian_eigen(m.h().matrix());
    let h_norm = eigenvalues[0].abs().max(eigenvalues[3].abs());
    if eigenvalues[3] < -tol * h_norm {
        return Err(CertError::NotPhysical { min_eigenvalue: eigenvalues[3] });
    }
    let items = eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > tol * h_norm)
        .map(|(k, &l)| EnsembleItem {
            weight: l,
            jones: JonesMatrix::from_vector(&fix_phase(&vectors.column(k).into_owned())),
        })
        .collect();
    Ok(JonesEnsemble { items })
}

/// `Some(J)` with `M = M(J)` when `H_M` is rank one and positive.
/// The global phase of `J` is fixed so its largest entry is real positive.
pub fn mueller_jones_test(m: &MuellerCandidate, tol: f64) -> Option<JonesMatrix> {
    let report = physicality(m, tol);
    if !report.is_mueller || report.rank != 1 {
        return None;
    }
    let (eigenvalues, vectors) = hermitian_eigen(m.h().matrix());
    let v = fix_phase(&vectors.column(0).into_owned()) * Complex64::new(eigenvalues[0].sqrt(), 0.0);
    Some(JonesMatrix::from_vector(&v))
}

//! Certification of real 4×4 polarization transfer matrices.
//!
//! Given an arbitrary real 4×4 matrix `M` acting on Stokes vectors, this
//! crate answers three questions:
//!
//! * does `M` map the solid Stokes light cone into itself (a *pre-Mueller*
//!   matrix)? See [`conetest`].
//! * is `M` a physical Mueller matrix, i.e. is its associated hermitian
//!   matrix `H_M` positive semidefinite? See [`choi`].
//! * what is its structure: Jones ensemble, canonical family under
//!   Lorentz double cosets, and (when unphysical) a two-mode entanglement
//!   witness exposing the violation? See [`choi`], [`canonical`], [`witness`].
//!
//! Conventions live in [`calculus`]: the τ basis is `τ0 = I, τ1 = σ3,
//! τ2 = σ1, τ3 = σ2`, and 2×2 matrices are vectorized row-major
//! `(K11, K12, K21, K22)`.

pub mod calculus;
pub mod canonical;
pub mod choi;
pub mod conetest;
pub mod error;
pub mod linalg;
pub mod report;
pub mod studies;
pub mod witness;

pub use calculus::{
    coherency_from_stokes, devectorize, h_from_m, m_from_h, mueller_from_jones,
    stokes_from_coherency, vectorize, CoherencyMatrix, HermitianChoi, JonesMatrix,
    MuellerCandidate, StokesVector, DEFAULT_TOL,
};
pub use canonical::{
    classify, h_eigs_diagonal, type1_constraints, type1_factor, type2_constraints, CanonicalClass, Family,
};
pub use choi::{jones_ensemble, mueller_jones_test, physicality, JonesEnsemble, PhysicalityReport};
pub use conetest::{certify_cone, sphere_quadratic_min, ConeVerdict};
pub use error::{CertError, Result};
pub use report::{analyze_matrix, parse_matrix, Report};
pub use studies::{tetra_scan, vanzyl_case};
pub use witness::{expectation, extended_action, witness_certificate, witness_input, TwoModeBcp, TwoModeJones};

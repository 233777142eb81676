use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error("input is not hermitian (deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("H matrix has negative eigenvalue {min_eigenvalue:.6e}: not a physical Mueller matrix")]
    NotPhysical { min_eigenvalue: f64 },

    #[error("spectrum of N is degenerate (smallest eigenvalue gap {gap:.3e})")]
    DegenerateSpectrum { gap: f64 },

    #[error("matrix is not of Type-I: {0}")]
    NotTypeI(String),

    #[error("matrix is singular")]
    Singular,

    #[error("factorization failed verification (residual {residual:.3e})")]
    FactorizationFailed { residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CertError>;

use thiserror::Error;

/// Errors raised by the numerical kernel and the state models built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not Hermitian (max |A - A^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigNoConverge { sweeps: usize, off_norm: f64 },
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("vector is not normalized (|norm^2 - 1| = {0:e})")]
    Norm(f64),
    #[error("operator is not a state (min eigenvalue {min_eig:e})")]
    NotAState { min_eig: f64 },
    #[error("Bloch vector is not a pure state")]
    NotPure,
    #[error("invalid ensemble member: {0}")]
    Member(String),
    #[error("unsupported size: {0}")]
    Size(String),
    #[error("construction requires an even number of qutrits, got {0}")]
    Parity(usize),
}

impl Error {
    /// Stable machine-readable tag, used in JSON reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::NotHermitian(_) => "not_hermitian",
            Error::EigNoConverge { .. } => "eig_no_converge",
            Error::Range(_) => "range",
            Error::Norm(_) => "norm",
            Error::NotAState { .. } => "not_a_state",
            Error::NotPure => "not_pure",
            Error::Member(_) => "member",
            Error::Size(_) => "size",
            Error::Parity(_) => "parity",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimError { expected: usize, found: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("point is not inside the unit ball (norm {norm})")]
    OutOfBall { norm: f64 },

    #[error("denominator {denominator:.3e} is too close to zero")]
    NearSingular { denominator: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("matrix does not preserve the indefinite form (residual {residual:.3e})")]
    FormViolation { residual: f64 },

    #[error("canonical reconstruction failed (residual {residual:.3e})")]
    ReconstructionError { residual: f64 },

    #[error("<xi> is not invariant under U (residual {residual:.3e})")]
    NotReducing { residual: f64 },

    #[error("basis is not orthonormal (residual {residual:.3e})")]
    BadBasis { residual: f64 },

    #[error("invalid data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

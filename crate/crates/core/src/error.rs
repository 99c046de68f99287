use crate::density::Violations;
use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid density matrix: {0}")]
    InvalidState(Violations),

    #[error("eigenvalue {0:e} is too negative to be round-off")]
    NegativeEigenvalue(f64),

    #[error("{name} = {value} is outside {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(&'static str),

    #[error("entropic index must be positive, got {0}")]
    InvalidOrder(f64),

    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("record invariant violated: {name} = {value}")]
    RecordInvariant { name: &'static str, value: f64 },
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence(_) | Error::NegativeEigenvalue(_) | Error::RecordInvariant { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by state construction and the simulator operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("dimension {got} is not valid here (expected {expected})")]
    BadDimension { expected: String, got: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian (max deviation {0})")]
    NotHermitian(f64),
    #[error("trace {0} differs from 1")]
    BadTrace(f64),
    #[error("matrix has negative eigenvalue {0}")]
    NotPositive(f64),
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("repeats must be at least 1")]
    ZeroRepeats,
    #[error("tomography records do not cover axis {0}")]
    MissingAxis(char),
    #[error("projection has probability {0}; the conditional state is undefined")]
    ImpossibleProjection(f64),
    #[error("compiled circuit is not unitary (max deviation {0})")]
    NonUnitary(f64),
    #[error("optical circuit has no elements")]
    EmptyCircuit,
    #[error("unknown circuit preset `{0}`")]
    UnknownPreset(String),
    #[error("n_signals must be at least 1")]
    NoSignals,
    #[error("bias standard error must be positive")]
    ZeroStdError,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite(name));
    }
    if value < lo || value > hi {
        return Err(Error::OutOfRange {
            name,
            value,
            lo,
            hi,
        });
    }
    Ok(())
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(name))
    }
}

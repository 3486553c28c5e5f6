use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("eigensolver did not converge (realization {realization})")]
    NoConvergence { realization: u64 },

    #[error("Kramers degeneracy violated: pairing residual {residual:.3e} exceeds {threshold:.3e}")]
    DegeneracyViolation { residual: f64, threshold: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dim { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{name} = {value} is out of range ({expected})")]
    Range {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("unsupported body combination: {0}")]
    UnsupportedCombination(String),

    #[error("body is not centered: barycenter coordinate {coordinate} is {sigmas:.2} standard errors from 0")]
    Centering { coordinate: usize, sigmas: f64 },

    #[error("no Monte Carlo sample landed in the body")]
    NoHits,

    #[error("mass leak: {fraction:.3e} of the weighted mass sits at the grid boundary")]
    MassLeak { fraction: f64 },

    #[error("scaled supports need half-extent {needed} but the grid only has {available}")]
    Extent { needed: f64, available: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Range { name, value, expected })
    }
}

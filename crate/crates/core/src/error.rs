use crate::numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("x = {x} lies outside the domain ({lo}, {hi})")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("turning point inside ({lo}, {hi}) near x = {near}")]
    TurningPointInside { lo: f64, hi: f64, near: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("a generic relation has no pointwise residual")]
    GenericNotPointwise,
    #[error("special linear relation needs a != 0")]
    NeedsNonzeroA,
    #[error("solution leaves the admissible region immediately at x = {x}")]
    ImmediateExit { x: f64 },
    #[error("momentum vanishes at x = {x} where the Gauss curvature does not")]
    SignBreakdown { x: f64 },
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("curve touches the axis at sample {index} (x = {x})")]
    AxisTouch { index: usize, x: f64 },
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit status for the command line: 2 for numerical
    /// non-convergence, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerics(
                NumericsError::NonConvergence { .. } | NumericsError::EventStall { .. },
            ) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

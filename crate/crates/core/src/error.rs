use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular kernel evaluation: {0}")]
    SingularKernel(String),

    #[error("point outside the domain: {0}")]
    OutsideDomain(String),

    #[error("point is not on the boundary: |rho| = {0:.3e}")]
    NotOnBoundary(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("group closure exceeded {0} elements")]
    GroupOverflow(usize),

    #[error("element order exceeds bound {0}")]
    OrderBoundExceeded(u32),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("series does not converge (ratio {0:.6})")]
    NonConvergent(f64),

    #[error("branch point: {0}")]
    BranchPoint(String),

    #[error("chart singular: {0}")]
    ChartSingular(String),

    #[error("underdetermined fit: {samples} samples for {unknowns} unknowns")]
    Underdetermined { samples: usize, unknowns: usize },

    #[error("all kernel samples are zero")]
    ZeroSamples,

    #[error("empty sample set")]
    EmptySamples,

    #[error("candidate polynomial is zero")]
    ZeroCandidate,

    #[error("not square integrable: {0}")]
    NotSquareIntegrable(String),

    #[error("unknown domain `{0}`")]
    UnknownDomain(String),

    #[error("derivative estimation failed: {0}")]
    Derivative(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("game generation failed: {0}")]
    Generation(String),

    /// Some (cluster, strategy) pairs have no data instance.
    #[error("coverage error: no data for (cluster, strategy) pairs {missing:?}")]
    Coverage {
        missing: Vec<(usize, usize)>,
        /// Cluster assignment that produced the gap, when known.
        clustering: Option<Vec<usize>>,
    },

    #[error("game too large for exhaustive scan: {profiles} profiles exceeds cap {cap}")]
    Size { profiles: usize, cap: usize },

    #[error("solver failed: best candidate has epsilon {best_epsilon:e}")]
    SolverFailure {
        best_epsilon: f64,
        best_candidate: Option<Vec<Vec<f64>>>,
    },
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid cut: member set must be a proper nonempty subset of V")]
    InvalidCut,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("cutting-plane loop exceeded {limit} iterations")]
    IterationLimit { limit: usize },

    #[error("instance too large for exhaustive oracle: n = {n}, limit {max}")]
    TooLarge { n: usize, max: usize },

    /// Raised by the sourced-network builder; callers should use the
    /// six-light branch instead.
    #[error("expensive mass x*(E1) = {mass} is below 1; use the six-light branch")]
    ExpensiveMassBelowOne { mass: f64 },

    #[error("expensive mass x*(E1) = {mass} is at least 1; six-light branch not applicable")]
    ExpensiveMassAtLeastOne { mass: f64 },

    #[error("sink flow violates invariant: {0}")]
    SinkFlowViolation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("not a walk: {0}")]
    InvalidWalk(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn inconsistency(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("failed to parse scenario document: {0}")]
    Parse(String),

    #[error("edge list line {line}: {msg}")]
    EdgeList { line: usize, msg: String },

    #[error("could not build a connected topology within {attempts} attempts")]
    TopologyGeneration { attempts: usize },

    #[error("could not draw {clusters} models with separation {delta} after {attempts} attempts")]
    InfeasibleSeparation {
        clusters: usize,
        delta: f64,
        attempts: usize,
    },

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("run {run} diverged at round {round} (agent {agent})")]
    Divergence {
        run: usize,
        round: usize,
        agent: usize,
    },

    #[error("all {runs} runs diverged")]
    AllRunsDiverged { runs: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

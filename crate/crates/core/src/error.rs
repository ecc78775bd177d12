use thiserror::Error;

/// Errors produced by chain construction and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("player index {player} out of range for {n} players")]
    PlayerIndex { player: usize, n: usize },

    #[error("state space 2^{n} exceeds cap {cap}")]
    StateSpaceCap { n: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid stochastic matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid birth-and-death chain: {0}")]
    InvalidChain(String),

    #[error("empty or zero-mass subset: {0}")]
    EmptySubset(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("absorbing set unreachable from state {0}")]
    NotAbsorbing(usize),

    #[error("rate ratio q_{k}/p_{k} = {ratio} exceeds alpha = {alpha}")]
    RateRatioExceeded { k: usize, ratio: f64, alpha: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("incompatible inputs: {0}")]
    Incompatible(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

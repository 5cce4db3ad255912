use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("degenerate lattice: rank {rank} < 4")]
    DegenerateLattice { rank: usize },

    #[error("lattice is not contained in {0}")]
    NotContained(&'static str),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("not an order: {0}")]
    NotAnOrder(String),

    #[error("coprime solver infeasible for index set {indices:?} (bound {bound}): {detail}")]
    Infeasible {
        indices: Vec<usize>,
        bound: u64,
        detail: String,
    },

    /// A proven inequality or identity failed. Always an implementation bug.
    #[error("theorem assertion failed: {0}")]
    TheoremViolation(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({u}, {v}) has an endpoint outside 0..{vertex_count}")]
    EndpointOutOfRange {
        u: usize,
        v: usize,
        vertex_count: usize,
    },

    /// An enumeration or construction would exceed its configured cap.
    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: &'static str, cap: u64 },

    /// The input is larger than an exhaustive or exact routine supports.
    #[error("{what}: size {actual} exceeds limit {limit}")]
    SizeCap {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("graph is not irreducible")]
    NotIrreducible,

    #[error("alpha = {0} is outside [0, 1]")]
    InvalidAlpha(f64),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("mask has {mask} entries but the graph has {edges} edges")]
    MaskMismatch { mask: usize, edges: usize },

    #[error("power iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    /// A precondition on a numeric argument failed (e.g. alpha >= 1/lambda).
    #[error("{0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by a size or enumeration cap, as opposed to bad input.
    pub fn is_cap_violation(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::SizeCap { .. } | Error::NonConvergence(_)
        )
    }
}

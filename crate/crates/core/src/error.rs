use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("right-hand side is the zero vector")]
    ZeroVector,

    #[error("QR iteration failed to converge at subdiagonal index {index}")]
    EigenNonConvergence { index: usize },

    #[error("matrix is numerically singular (pivot {pivot} at index {index})")]
    Singular { index: usize, pivot: f64 },

    #[error("zero pivot in incomplete factorization at row {row}")]
    ZeroPivot { row: usize },

    #[error("Lanczos breakdown at iteration {iteration}: {detail}")]
    Breakdown { iteration: usize, detail: String },

    #[error("polynomial root equals zero at position {index}")]
    ZeroRoot { index: usize },

    #[error("complex root {index} has no conjugate partner in a real root list")]
    UnpairedRoot { index: usize },

    #[error("basis is rank deficient at vector {index}")]
    RankDeficient { index: usize },

    #[error("solver did not converge: {0}")]
    NotConverged(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix market: {0}")]
    MatrixMarket(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

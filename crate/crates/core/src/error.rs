use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is disconnected; distance matrix undefined")]
    DisconnectedGraph,
    #[error("vertex {0} is isolated; normalized Laplacian undefined")]
    IsolatedVertex(usize),
    #[error("{0} requires an undirected graph")]
    DirectedUnsupported(&'static str),
    #[error("permutation moves index {index} outside 1..={n}")]
    DomainMismatch { index: usize, n: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("cannot parse cycle notation: {0}")]
    Parse(String),
    #[error("point {0} appears more than once in cycle notation")]
    RepeatedPoint(usize),
    #[error("point {point} out of range 1..={n}")]
    OutOfRange { point: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: u64, b: u64 },

    #[error("not an automorphism of the matrix")]
    NotAnAutomorphism,
    #[error("seed {0} conflicts with the transversal already fixed for its orbit")]
    SeedConflict(usize),
    #[error("seed {0} is not in an orbit of maximal length this round")]
    SeedNotInMaximalOrbit(usize),
    #[error("matrix is not double block-circulant under the chosen layout: {0}")]
    NotBlockCirculant(String),
    #[error("similarity residual {residual:e} exceeds {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error("permutation order {0} is not a prime power")]
    OrderNotPrimePower(u64),

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("NotNonnegative: matrix has a negative or non-real entry")]
    NotNonnegative,
    #[error("NotIrreducible: positivity pattern is not strongly connected")]
    NotIrreducible,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

use alloc::string::String;

/// Errors raised while building or querying diagrams, paths and machines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("matrix is empty or ragged: {0}")]
    MalformedMatrix(String),

    #[error("incidence matrix has an identically zero row {0} (1-based)")]
    ZeroRow(usize),

    #[error("incidence matrix has an identically zero column {0} (1-based)")]
    ZeroColumn(usize),

    #[error("dimension mismatch at level {level}: {detail}")]
    DimensionMismatch { level: usize, detail: String },

    #[error("ordering matrix at level {level}, row {row}: {detail}")]
    InvalidOrdering {
        level: usize,
        row: usize,
        detail: String,
    },

    #[error("diagram is not simple: no positive product starting at level {level}")]
    NotSimple { level: usize },

    #[error(
        "minimal path is ambiguous: {0} candidate tail vertices; name the tail vertex explicitly"
    )]
    AmbiguousMinimalPath(usize),

    #[error("tail vertex {vertex} is not a fixed point of the minimal-source map")]
    InvalidTailVertex { vertex: u32 },

    #[error("minimal path is cofinal with a maximal path (tail vertex {vertex} has indegree 1)")]
    DegenerateMinimalPath { vertex: u32 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("carry index {index} out of range 1..={theta}")]
    CarryIndexOutOfRange { index: usize, theta: usize },

    #[error("operation requires a 2x2 diagram with canonical consecutive ordering: {0}")]
    NotTwoByTwo(String),

    #[error("invalid digit string: {0}")]
    InvalidDigits(String),

    #[error("Hypothesis A violated: {0}")]
    HypothesisA(String),

    #[error("invalid probability schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid spectral parameters: {0}")]
    InvalidSpectralParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

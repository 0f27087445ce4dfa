//! Hybrid causal discovery for multivariate time series.
//!
//! The crate combines two restricted discovery primitives, a noise-based
//! causal ordering of the present slice (`restnb`) and constraint-based
//! skeleton pruning (`restcb`), into the two hybrid pipelines NBCB and
//! CBNB (`hybrid`). Both pipelines first infer a lag-aware graph (a window
//! causal graph or an extended summary causal graph) and then collapse it
//! into a summary causal graph that may contain cycles.
//!
//! Supporting modules:
//!
//! - [`graph`]: graph types, deduction maps between abstractions,
//!   undirected-cycle-group detection and a d-separation oracle.
//! - [`stats`]: least squares, residualization, the partial-correlation
//!   conditional-independence test, a pairwise independence measure and a
//!   first-principal-component reduction.
//! - [`datagen`]: synthetic benchmark generators with ground-truth graphs.
//! - [`bench`](mod@bench): F1 scoring of summary graphs and a multi-seed runner.

pub mod bench;
pub mod datagen;
pub mod graph;
pub mod hybrid;
pub mod restcb;
pub mod restnb;
pub mod stats;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("lag {lag} out of range for gamma {gamma}")]
    LagOutOfRange { lag: usize, gamma: usize },
    #[error("edge {0} -> {1} would close an instantaneous cycle")]
    InstantaneousCycle(String, String),
    #[error("instantaneous self edge on `{0}` is not allowed")]
    InstantaneousSelfEdge(String),
    #[error("incomplete order: `{0}` is missing")]
    IncompleteOrder(String),
    #[error("node `{0}` at lag {1} is outside the unrolled range 0..={2}")]
    OutsideUnrolledRange(String, usize, usize),
    #[error("query nodes must not appear in the conditioning set")]
    QueryInConditioningSet,
    #[error("degenerate series `{0}`: zero variance")]
    DegenerateSeries(String),
    #[error("insufficient samples: have {have}, need more than {need}")]
    InsufficientSamples { have: usize, need: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("strictly lagged regressor set contains a lag-0 node")]
    PresentInPast,
    #[error("variable sets differ between graphs")]
    VariableMismatch,
    #[error("csv error at line {line}, column {col}: {msg}")]
    Csv {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("io error on `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph document: {0}")]
    GraphDocument(String),
    #[error("simulation diverged after {0} coefficient resamples")]
    Explosive(usize),
    #[error("unknown {noun} `{id}`")]
    UnknownId { id: String, noun: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

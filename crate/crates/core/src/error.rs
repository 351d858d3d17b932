use thiserror::Error;

/// Errors produced by graph construction, analysis and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node label is empty")]
    EmptyLabel,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("record {index} has a missing endpoint; clean records before building a graph")]
    AnonymousRecord { index: usize },
    #[error("invalid graph document: {0}")]
    InvalidGraph(String),
    #[error("{op} requires at least {required} nodes, graph has {n}")]
    Degenerate {
        op: &'static str,
        n: usize,
        required: usize,
    },
    #[error("graph is empty")]
    EmptyGraph,
    #[error("graph has no edges")]
    EmptyEdgeSet,
    #[error("no ordered node pair is connected by a directed path")]
    NoPaths,
    #[error("eigenvector iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("community assignment does not cover node `{0}`")]
    MissingAssignment(String),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("requested {k} targets from a graph with {n} nodes")]
    TooManyTargets { k: usize, n: usize },
    #[error("requested {steps} removal steps from a graph with {n} nodes")]
    TooManySteps { steps: usize, n: usize },
    #[error("random strategy requires a seed")]
    MissingSeed,
    #[error("trace lengths differ: {left} vs {right} steps")]
    LengthMismatch { left: usize, right: usize },
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("degree sequence is not digraphical")]
    NonGraphical,
    #[error("generator gave up after {attempts} resampling attempts")]
    ResamplingExhausted { attempts: usize },
    #[error("malformed country mapping: {0}")]
    MalformedMapping(String),
    #[error("missing column `{0}` in CSV header")]
    MissingColumn(String),
    #[error("unknown {kind} `{value}`")]
    UnknownName { kind: &'static str, value: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

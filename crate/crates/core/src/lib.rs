//! Robustness analysis for directed overlay-network topologies.
//!
//! The crate ingests a router-contact edge list into an immutable
//! [`DirectedGraph`], computes whole-graph metrics and per-node
//! centralities, detects communities, and simulates node-removal attacks
//! that record a [`MetricsSnapshot`] after every step.
//!
//! Per-source sweeps (path lengths, betweenness, closeness, triangles) and
//! independent attack runs use rayon when the default `parallel` feature is
//! enabled. Results are bit-identical with the feature off.

pub mod centrality;
pub mod community;
pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod par;
pub mod percolation;
pub mod report;
pub mod synth;

pub use centrality::{centrality_scores, CentralityScores, Measure};
pub use community::{filter_communities, louvain, modularity, CommunityPartition};
pub use error::{Error, Result};
pub use graph::{
    build_graph, clean_records, CleaningPolicy, CleaningReport, DirectedGraph, EdgeRecord,
    NodeLabel,
};
pub use metrics::{DegreeMode, MetricSet, MetricsSnapshot};
pub use par::Execution;
pub use percolation::{run_attack, AttackKind, AttackStrategy, PercolationTrace};
pub use synth::{generate, GeneratorModel, GeneratorSpec};

//! Sequential node-removal attacks with a metrics snapshot after each step.
//!
//! Three strategies are supported:
//!
//! * **adaptive**: recompute the chosen centrality after every removal and
//!   take the current maximum;
//! * **static**: rank once on the initial graph and remove in that order;
//! * **random**: uniform removal without replacement from a seeded stream,
//!   the random-failure baseline.
//!
//! Ties always go to the lexicographically smallest label.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::centrality::{self, Measure};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeLabel};
use crate::io::ser_opt_sig9;
use crate::metrics::{self, MetricSet, MetricsSnapshot};
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    #[default]
    Adaptive,
    Static,
    Random,
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::Adaptive => "adaptive",
            AttackKind::Static => "static",
            AttackKind::Random => "random",
        })
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" | "adaptive-degree" | "automated" => Ok(AttackKind::Adaptive),
            "static" | "static-degree" | "manual" => Ok(AttackKind::Static),
            "random" | "failure" => Ok(AttackKind::Random),
            _ => Err(Error::UnknownName {
                kind: "attack strategy",
                value: s.to_owned(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AttackStrategy {
    pub kind: AttackKind,
    pub measure: Measure,
    /// Required by the random kind; ignored by the others.
    pub seed: Option<u64>,
}

impl AttackStrategy {
    pub fn adaptive(measure: Measure) -> Self {
        AttackStrategy {
            kind: AttackKind::Adaptive,
            measure,
            seed: None,
        }
    }

    pub fn fixed_ranking(measure: Measure) -> Self {
        AttackStrategy {
            kind: AttackKind::Static,
            measure,
            seed: None,
        }
    }

    pub fn random(seed: u64) -> Self {
        AttackStrategy {
            kind: AttackKind::Random,
            measure: Measure::TotalDegree,
            seed: Some(seed),
        }
    }
}

/// One row of a trace. Step 0 is the untouched graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationStep {
    pub step: usize,
    pub removed: Option<NodeLabel>,
    /// Total degree of the removed node at the moment it was removed.
    pub removed_degree: usize,
    #[serde(flatten)]
    pub snapshot: MetricsSnapshot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationTrace {
    pub strategy: AttackStrategy,
    pub steps: Vec<PercolationStep>,
}

impl PercolationTrace {
    pub fn removed(&self) -> Vec<&NodeLabel> {
        self.steps.iter().filter_map(|s| s.removed.as_ref()).collect()
    }
}

/// Top-`k` ranking computed once on the initial graph.
pub fn static_target_list(graph: &DirectedGraph, measure: Measure, k: usize) -> Result<Vec<NodeLabel>> {
    let n = graph.node_count();
    if k > n {
        return Err(Error::TooManyTargets { k, n });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let scores = centrality::centrality_scores(graph, measure)?;
    Ok(scores.top_k(k)?.into_iter().map(|(label, _)| label).collect())
}

pub fn run_attack(
    graph: &DirectedGraph,
    strategy: &AttackStrategy,
    steps: usize,
    metrics: &MetricSet,
) -> Result<PercolationTrace> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if steps >= n {
        return Err(Error::TooManySteps { steps, n });
    }
    let mut rng = match strategy.kind {
        AttackKind::Random => Some(ChaCha8Rng::seed_from_u64(
            strategy.seed.ok_or(Error::MissingSeed)?,
        )),
        _ => None,
    };
    let fixed = match strategy.kind {
        AttackKind::Static => static_target_list(graph, strategy.measure, steps)?,
        _ => Vec::new(),
    };

    let mut trace = PercolationTrace {
        strategy: *strategy,
        steps: Vec::with_capacity(steps + 1),
    };
    trace.steps.push(PercolationStep {
        step: 0,
        removed: None,
        removed_degree: 0,
        snapshot: metrics::snapshot(graph, metrics),
    });

    let mut current = graph.clone();
    for step in 1..=steps {
        let target = match strategy.kind {
            AttackKind::Adaptive => {
                let scores = centrality::raw_scores(&current, strategy.measure, Execution::default())?;
                let best = centrality::argmax(&scores).expect("graph is non-empty");
                current.label(best).clone()
            }
            AttackKind::Static => fixed[step - 1].clone(),
            AttackKind::Random => {
                let rng = rng.as_mut().expect("random strategy has a generator");
                current.label(rng.gen_range(0..current.node_count())).clone()
            }
        };
        let (next, removed_in, removed_out) = current.remove_node(target.as_str())?;
        current = next;
        trace.steps.push(PercolationStep {
            step,
            removed: Some(target),
            removed_degree: removed_in + removed_out,
            snapshot: metrics::snapshot(&current, metrics),
        });
    }
    Ok(trace)
}

/// Runs independent attacks on the same graph, in input order.
pub fn run_attacks(
    graph: &DirectedGraph,
    strategies: &[AttackStrategy],
    steps: usize,
    metrics: &MetricSet,
    exec: Execution,
) -> Vec<Result<PercolationTrace>> {
    par::map_items(strategies, exec, |s| run_attack(graph, s, steps, metrics))
}

/// Density after each removal from `(n, m)`, given the removed nodes' total
/// degrees at removal time: `(m - sum d) / ((n - t) (n - t - 1))`.
/// Entry 0 is the initial density.
pub fn closed_form_densities(n: usize, m: usize, removed_degrees: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(removed_degrees.len() + 1);
    let mut edges = m;
    for t in 0..=removed_degrees.len() {
        if t > 0 {
            edges -= removed_degrees[t - 1];
        }
        let nodes = (n - t) as f64;
        out.push(edges as f64 / (nodes * (nodes - 1.0)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDelta {
    pub step: usize,
    #[serde(serialize_with = "ser_opt_sig9")]
    pub density: Option<f64>,
    #[serde(serialize_with = "ser_opt_sig9")]
    pub apl: Option<f64>,
}

/// Per-step differences `a - b`, present where both traces have the value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceComparison {
    pub steps: Vec<StepDelta>,
    pub max_abs_density_delta: f64,
    pub max_abs_apl_delta: f64,
}

pub fn compare_traces(a: &PercolationTrace, b: &PercolationTrace) -> Result<TraceComparison> {
    if a.steps.len() != b.steps.len() {
        return Err(Error::LengthMismatch {
            left: a.steps.len(),
            right: b.steps.len(),
        });
    }
    let diff = |x: Option<f64>, y: Option<f64>| x.zip(y).map(|(x, y)| x - y);
    let steps: Vec<StepDelta> = a
        .steps
        .iter()
        .zip(&b.steps)
        .map(|(x, y)| StepDelta {
            step: x.step,
            density: diff(x.snapshot.density, y.snapshot.density),
            apl: diff(x.snapshot.apl, y.snapshot.apl),
        })
        .collect();
    let max_abs = |f: fn(&StepDelta) -> Option<f64>| {
        steps.iter().filter_map(f).map(f64::abs).fold(0.0, f64::max)
    };
    Ok(TraceComparison {
        max_abs_density_delta: max_abs(|d| d.density),
        max_abs_apl_delta: max_abs(|d| d.apl),
        steps,
    })
}

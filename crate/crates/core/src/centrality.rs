//! Per-node centrality scores and deterministic ranking.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeLabel};
use crate::metrics::{Bfs, DegreeMode};
use crate::par::{self, Execution};

/// Successive eigenvector iterates closer than this (max norm) have converged.
pub const EIGENVECTOR_TOLERANCE: f64 = 1e-12;
pub const EIGENVECTOR_MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    InDegree,
    OutDegree,
    #[default]
    TotalDegree,
    Betweenness,
    Closeness,
    Eigenvector,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::InDegree,
        Measure::OutDegree,
        Measure::TotalDegree,
        Measure::Betweenness,
        Measure::Closeness,
        Measure::Eigenvector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::InDegree => "in-degree",
            Measure::OutDegree => "out-degree",
            Measure::TotalDegree => "total-degree",
            Measure::Betweenness => "betweenness",
            Measure::Closeness => "closeness",
            Measure::Eigenvector => "eigenvector",
        }
    }

    pub fn degree_mode(self) -> Option<DegreeMode> {
        match self {
            Measure::InDegree => Some(DegreeMode::In),
            Measure::OutDegree => Some(DegreeMode::Out),
            Measure::TotalDegree => Some(DegreeMode::Total),
            _ => None,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .or(match s {
                "in" => Some(Measure::InDegree),
                "out" => Some(Measure::OutDegree),
                "total" | "degree" | "all-degree" => Some(Measure::TotalDegree),
                _ => None,
            })
            .ok_or_else(|| Error::UnknownName {
                kind: "centrality measure",
                value: s.to_owned(),
            })
    }
}

/// Scores for one measure, aligned with the source graph's node order.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    pub measure: Measure,
    labels: Vec<NodeLabel>,
    values: Vec<f64>,
}

impl CentralityScores {
    pub fn new(measure: Measure, labels: Vec<NodeLabel>, values: Vec<f64>) -> Self {
        assert_eq!(labels.len(), values.len());
        CentralityScores {
            measure,
            labels,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l.as_str() == label)
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeLabel, f64)> {
        self.labels.iter().zip(self.values.iter().copied())
    }

    /// Highest `k` scores, descending; ties go to the lexicographically
    /// smaller label.
    pub fn top_k(&self, k: usize) -> Result<Vec<(NodeLabel, f64)>> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        let order = ranking(&self.labels, &self.values);
        Ok(order
            .into_iter()
            .take(k)
            .map(|i| (self.labels[i].clone(), self.values[i]))
            .collect())
    }
}

/// Indices sorted by descending value then ascending label.
pub(crate) fn ranking(labels: &[NodeLabel], values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .total_cmp(&values[a])
            .then_with(|| labels[a].cmp(&labels[b]))
    });
    order
}

/// Index of the top-ranked value. Graph node order is label order, so the
/// first maximum is also the lexicographically smallest.
pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if best.is_none_or(|b| v.total_cmp(&values[b]).is_gt()) {
            best = Some(i);
        }
    }
    best
}

pub fn centrality_scores(graph: &DirectedGraph, measure: Measure) -> Result<CentralityScores> {
    centrality_scores_with(graph, measure, Execution::default())
}

pub fn centrality_scores_with(
    graph: &DirectedGraph,
    measure: Measure,
    exec: Execution,
) -> Result<CentralityScores> {
    let values = raw_scores(graph, measure, exec)?;
    Ok(CentralityScores::new(measure, graph.labels().to_vec(), values))
}

/// Scores in node-index order without copying labels.
pub(crate) fn raw_scores(graph: &DirectedGraph, measure: Measure, exec: Execution) -> Result<Vec<f64>> {
    if graph.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(match measure.degree_mode() {
        Some(mode) => (0..graph.node_count())
            .map(|v| mode.degree(graph, v) as f64)
            .collect(),
        None => match measure {
            Measure::Betweenness => betweenness(graph, exec),
            Measure::Closeness => harmonic_closeness(graph, exec),
            Measure::Eigenvector => eigenvector(graph)?,
            _ => unreachable!("degree measures handled above"),
        },
    })
}

/// Directed betweenness via Brandes' accumulation. Endpoints are excluded
/// and scores are not normalized.
pub fn betweenness(graph: &DirectedGraph, exec: Execution) -> Vec<f64> {
    let n = graph.node_count();
    let parts = par::map_chunks(n, exec, |sources| {
        let mut acc = vec![0.0f64; n];
        let mut sigma = vec![0.0f64; n];
        let mut delta = vec![0.0f64; n];
        let mut bfs = Bfs::new(n);
        for s in sources {
            bfs.run(graph, s);
            for &v in &bfs.order {
                sigma[v as usize] = 0.0;
                delta[v as usize] = 0.0;
            }
            sigma[s] = 1.0;
            for &v in &bfs.order[1..] {
                let v = v as usize;
                let dv = bfs.dist[v];
                sigma[v] = graph
                    .in_neighbors(v)
                    .iter()
                    .filter(|&&u| bfs.dist[u as usize] != Bfs::UNSEEN && bfs.dist[u as usize] + 1 == dv)
                    .map(|&u| sigma[u as usize])
                    .sum();
            }
            for &w in bfs.order[1..].iter().rev() {
                let w = w as usize;
                let dw = bfs.dist[w];
                let share = (1.0 + delta[w]) / sigma[w];
                for &u in graph.in_neighbors(w) {
                    let u = u as usize;
                    if bfs.dist[u] != Bfs::UNSEEN && bfs.dist[u] + 1 == dw {
                        delta[u] += sigma[u] * share;
                    }
                }
                acc[w] += delta[w];
            }
        }
        acc
    });
    let mut total = vec![0.0f64; n];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Harmonic out-closeness: `sum_{v != u} 1/d(u, v)` over reachable `v`,
/// divided by `n - 1`.
pub fn harmonic_closeness(graph: &DirectedGraph, exec: Execution) -> Vec<f64> {
    let n = graph.node_count();
    if n < 2 {
        return vec![0.0; n];
    }
    let parts = par::map_chunks(n, exec, |sources| {
        let mut bfs = Bfs::new(n);
        sources
            .map(|s| {
                bfs.run(graph, s);
                let sum: f64 = bfs.order[1..]
                    .iter()
                    .map(|&v| 1.0 / bfs.dist[v as usize] as f64)
                    .sum();
                sum / (n - 1) as f64
            })
            .collect::<Vec<f64>>()
    });
    parts.into_iter().flatten().collect()
}

/// Dominant eigenvector of the in-edge aggregation, max-normalized to 1.
///
/// Iterates `x <- x + A^T x` (same eigenvectors as `A^T`, but aperiodic, so
/// bipartite structures such as stars still converge).
pub fn eigenvector(graph: &DirectedGraph) -> Result<Vec<f64>> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if graph.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let mut x = vec![1.0f64; n];
    let mut next = vec![0.0f64; n];
    for _ in 0..EIGENVECTOR_MAX_ITERATIONS {
        for v in 0..n {
            next[v] = x[v]
                + graph
                    .in_neighbors(v)
                    .iter()
                    .map(|&u| x[u as usize])
                    .sum::<f64>();
        }
        let max = next.iter().copied().fold(0.0, f64::max);
        for value in &mut next {
            *value /= max;
        }
        let diff = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut next);
        if diff < EIGENVECTOR_TOLERANCE {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iterations: EIGENVECTOR_MAX_ITERATIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> DirectedGraph {
        DirectedGraph::from_edges([], [("a", "b"), ("b", "c")]).unwrap()
    }

    fn complete(n: usize) -> DirectedGraph {
        let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let edges: Vec<(&str, &str)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| (labels[i].as_str(), labels[j].as_str()))
            .collect();
        DirectedGraph::from_edges([], edges).unwrap()
    }

    #[test]
    fn betweenness_on_path() {
        let s = centrality_scores(&path3(), Measure::Betweenness).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn betweenness_splits_equal_paths() {
        // a -> {b, c} -> d: two shortest a..d paths
        let g = DirectedGraph::from_edges([], [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
            .unwrap();
        let s = centrality_scores(&g, Measure::Betweenness).unwrap();
        assert_eq!(s.values(), &[0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn closeness_on_path() {
        let s = centrality_scores(&path3(), Measure::Closeness).unwrap();
        assert_eq!(s.get("a"), Some(0.75));
        assert_eq!(s.get("b"), Some(0.5));
        assert_eq!(s.get("c"), Some(0.0));
    }

    #[test]
    fn eigenvector_symmetric() {
        let s = centrality_scores(&complete(4), Measure::Eigenvector).unwrap();
        assert!(s.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn eigenvector_star_converges() {
        let edges: Vec<(&str, &str)> = ["a", "b", "c", "d"]
            .iter()
            .flat_map(|&l| [("hub", l), (l, "hub")])
            .collect();
        let g = DirectedGraph::from_edges([], edges).unwrap();
        let s = centrality_scores(&g, Measure::Eigenvector).unwrap();
        assert_eq!(s.get("hub"), Some(1.0));
        // leaf/hub ratio is 1/sqrt(4) for a 4-leaf star
        assert!((s.get("a").unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn eigenvector_errors() {
        let g = DirectedGraph::from_edges(["a", "b"], []).unwrap();
        assert!(matches!(eigenvector(&g), Err(Error::EmptyEdgeSet)));
        assert!(matches!(
            centrality_scores(&DirectedGraph::empty(), Measure::InDegree),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn degree_scores() {
        let g = DirectedGraph::from_edges([], [("a", "b"), ("c", "b"), ("b", "a")]).unwrap();
        let inn = centrality_scores(&g, Measure::InDegree).unwrap();
        let out = centrality_scores(&g, Measure::OutDegree).unwrap();
        let tot = centrality_scores(&g, Measure::TotalDegree).unwrap();
        assert_eq!(inn.values(), &[1.0, 2.0, 0.0]);
        assert_eq!(out.values(), &[1.0, 1.0, 1.0]);
        assert_eq!(tot.values(), &[2.0, 3.0, 1.0]);
    }

    #[test]
    fn top_k_tie_break_and_truncation() {
        let labels = ["C", "B", "A"].map(|l| NodeLabel::new(l).unwrap()).to_vec();
        let s = CentralityScores::new(Measure::TotalDegree, labels, vec![1.0, 5.0, 5.0]);
        let top = s.top_k(2).unwrap();
        assert_eq!(top[0].0.as_str(), "A");
        assert_eq!(top[1].0.as_str(), "B");
        assert_eq!(s.top_k(10).unwrap().len(), 3);
        assert!(matches!(s.top_k(0), Err(Error::ZeroK)));
    }

    #[test]
    fn measure_names_round_trip() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        assert!("pagerank".parse::<Measure>().is_err());
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), Some(1));
        assert_eq!(argmax(&[]), None);
    }
}

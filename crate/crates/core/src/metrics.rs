//! Whole-graph structural metrics.

use std::collections::VecDeque;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::io::ser_opt_sig9;
use crate::par::{self, Execution};

/// Fraction of possible directed edges present: `m / (n (n - 1))`.
pub fn density(graph: &DirectedGraph) -> Result<f64> {
    let n = graph.node_count();
    if n < 2 {
        return Err(Error::Degenerate {
            op: "density",
            n,
            required: 2,
        });
    }
    Ok(graph.edge_count() as f64 / (n as f64 * (n - 1) as f64))
}

/// Exact totals behind the average path length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PathLengthStats {
    /// Sum of hop counts over reachable ordered pairs.
    pub distance_sum: u64,
    /// Ordered pairs `(u, v)`, `u != v`, with a directed path from `u` to `v`.
    pub reachable_pairs: u64,
}

impl PathLengthStats {
    pub fn mean(&self) -> Option<f64> {
        (self.reachable_pairs > 0).then(|| self.distance_sum as f64 / self.reachable_pairs as f64)
    }
}

/// BFS from every node. Unreachable pairs are excluded.
pub fn path_length_stats(graph: &DirectedGraph, exec: Execution) -> PathLengthStats {
    let n = graph.node_count();
    let parts = par::map_chunks(n, exec, |sources| {
        let mut bfs = Bfs::new(n);
        let mut acc = PathLengthStats::default();
        for s in sources {
            bfs.run(graph, s);
            for &v in &bfs.order[1..] {
                acc.distance_sum += bfs.dist[v as usize] as u64;
            }
            acc.reachable_pairs += bfs.order.len() as u64 - 1;
        }
        acc
    });
    parts.into_iter().fold(PathLengthStats::default(), |a, b| PathLengthStats {
        distance_sum: a.distance_sum + b.distance_sum,
        reachable_pairs: a.reachable_pairs + b.reachable_pairs,
    })
}

pub fn average_path_length(graph: &DirectedGraph) -> Result<f64> {
    average_path_length_with(graph, Execution::default())
}

pub fn average_path_length_with(graph: &DirectedGraph, exec: Execution) -> Result<f64> {
    path_length_stats(graph, exec).mean().ok_or(Error::NoPaths)
}

/// Reusable breadth-first search state.
pub(crate) struct Bfs {
    pub dist: Vec<u32>,
    /// Visit order; `order[0]` is the source.
    pub order: Vec<u32>,
    queue: VecDeque<u32>,
}

impl Bfs {
    pub const UNSEEN: u32 = u32::MAX;

    pub fn new(n: usize) -> Self {
        Bfs {
            dist: vec![Self::UNSEEN; n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    pub fn run(&mut self, graph: &DirectedGraph, source: usize) {
        for &v in &self.order {
            self.dist[v as usize] = Self::UNSEEN;
        }
        self.order.clear();
        self.dist[source] = 0;
        self.order.push(source as u32);
        self.queue.push_back(source as u32);
        while let Some(u) = self.queue.pop_front() {
            let next = self.dist[u as usize] + 1;
            for &v in graph.out_neighbors(u as usize) {
                if self.dist[v as usize] == Self::UNSEEN {
                    self.dist[v as usize] = next;
                    self.order.push(v);
                    self.queue.push_back(v);
                }
            }
        }
    }
}

/// Triangle and connected-triple counts of the undirected skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TriangleCounts {
    pub triangles: u64,
    /// Length-2 paths, i.e. `sum_v C(deg(v), 2)` on the skeleton.
    pub connected_triples: u64,
}

impl TriangleCounts {
    pub fn transitivity(&self) -> f64 {
        if self.connected_triples == 0 {
            0.0
        } else {
            3.0 * self.triangles as f64 / self.connected_triples as f64
        }
    }
}

pub fn triangle_counts(graph: &DirectedGraph, exec: Execution) -> TriangleCounts {
    let skeleton = graph.skeleton();
    let parts = par::map_chunks(skeleton.len(), exec, |nodes| {
        let mut acc = TriangleCounts::default();
        for u in nodes {
            let nu = &skeleton[u];
            let k = nu.len() as u64;
            acc.connected_triples += k * k.saturating_sub(1) / 2;
            // count each triangle once, at its smallest vertex
            for &v in nu.iter().filter(|&&v| v as usize > u) {
                acc.triangles += count_common_above(nu, &skeleton[v as usize], v);
            }
        }
        acc
    });
    parts.into_iter().fold(TriangleCounts::default(), |a, b| TriangleCounts {
        triangles: a.triangles + b.triangles,
        connected_triples: a.connected_triples + b.connected_triples,
    })
}

fn count_common_above(a: &[u32], b: &[u32], floor: u32) -> u64 {
    let a = &a[a.partition_point(|&x| x <= floor)..];
    let b = &b[b.partition_point(|&x| x <= floor)..];
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Global clustering coefficient of the undirected skeleton.
pub fn transitivity(graph: &DirectedGraph) -> Result<f64> {
    transitivity_with(graph, Execution::default())
}

pub fn transitivity_with(graph: &DirectedGraph, exec: Execution) -> Result<f64> {
    let n = graph.node_count();
    if n < 3 {
        return Err(Error::Degenerate {
            op: "transitivity",
            n,
            required: 3,
        });
    }
    Ok(triangle_counts(graph, exec).transitivity())
}

/// Which incident edges a degree counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeMode {
    In,
    Out,
    #[default]
    Total,
}

impl DegreeMode {
    pub fn degree(self, graph: &DirectedGraph, node: usize) -> usize {
        match self {
            DegreeMode::In => graph.in_degree(node),
            DegreeMode::Out => graph.out_degree(node),
            DegreeMode::Total => graph.total_degree(node),
        }
    }
}

impl FromStr for DegreeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in" => Ok(DegreeMode::In),
            "out" => Ok(DegreeMode::Out),
            "total" | "all" => Ok(DegreeMode::Total),
            _ => Err(Error::UnknownName {
                kind: "degree mode",
                value: s.to_owned(),
            }),
        }
    }
}

/// Freeman degree centralization, normalized by the star-graph maximum:
/// `2 (n-1)^2` for total degree, `(n-1)^2` for in or out degree.
pub fn degree_centralization(graph: &DirectedGraph, mode: DegreeMode) -> Result<f64> {
    let n = graph.node_count();
    if n < 3 {
        return Err(Error::Degenerate {
            op: "degree centralization",
            n,
            required: 3,
        });
    }
    let degrees: Vec<u64> = (0..n).map(|v| mode.degree(graph, v) as u64).collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let spread: u64 = degrees.iter().map(|&d| max - d).sum();
    let base = ((n - 1) as f64).powi(2);
    let norm = match mode {
        DegreeMode::Total => 2.0 * base,
        DegreeMode::In | DegreeMode::Out => base,
    };
    Ok(spread as f64 / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub largest_wcc: usize,
    pub largest_scc: usize,
    pub wcc_count: usize,
    pub scc_count: usize,
}

pub fn component_summary(graph: &DirectedGraph) -> Result<ComponentSummary> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::Degenerate {
            op: "component summary",
            n,
            required: 1,
        });
    }
    let wcc = weak_components(graph);
    let scc = strong_components(graph);
    let summarize = |labels: &[usize]| {
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; count];
        for &c in labels {
            sizes[c] += 1;
        }
        (sizes.iter().copied().max().unwrap_or(0), count)
    };
    let (largest_wcc, wcc_count) = summarize(&wcc);
    let (largest_scc, scc_count) = summarize(&scc);
    Ok(ComponentSummary {
        largest_wcc,
        largest_scc,
        wcc_count,
        scc_count,
    })
}

/// Weakly connected component id per node, ids dense from 0.
pub fn weak_components(graph: &DirectedGraph) -> Vec<usize> {
    let n = graph.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (u, v) in graph.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    densify((0..n).map(|v| find(&mut parent, v)).collect())
}

/// Strongly connected component id per node (iterative Tarjan).
pub fn strong_components(graph: &DirectedGraph) -> Vec<usize> {
    const NONE: usize = usize::MAX;
    let n = graph.node_count();
    let mut index = vec![NONE; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![NONE; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    // (node, position in its out-neighbor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != NONE {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos == 0 && index[v] == NONE {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let nbrs = graph.out_neighbors(v);
            if *pos < nbrs.len() {
                let w = nbrs[*pos] as usize;
                *pos += 1;
                if index[w] == NONE {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    densify(comp)
}

/// Renumbers ids in first-appearance order.
fn densify(raw: Vec<usize>) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    raw.into_iter()
        .map(|c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Selection of metrics recorded in a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSet {
    pub density: bool,
    pub apl: bool,
    pub transitivity: bool,
    pub centralization: bool,
    pub components: bool,
}

impl MetricSet {
    pub const ALL: MetricSet = MetricSet {
        density: true,
        apl: true,
        transitivity: true,
        centralization: true,
        components: true,
    };

    pub const NONE: MetricSet = MetricSet {
        density: false,
        apl: false,
        transitivity: false,
        centralization: false,
        components: false,
    };
}

impl Default for MetricSet {
    fn default() -> Self {
        MetricSet {
            density: true,
            apl: true,
            ..MetricSet::NONE
        }
    }
}

impl FromStr for MetricSet {
    type Err = Error;

    /// Parses a comma list such as `density,apl` (or `all`).
    fn from_str(s: &str) -> Result<Self> {
        let mut set = MetricSet::NONE;
        for name in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match name {
                "density" => set.density = true,
                "apl" => set.apl = true,
                "transitivity" => set.transitivity = true,
                "centralization" => set.centralization = true,
                "components" => set.components = true,
                "all" => set = MetricSet::ALL,
                other => {
                    return Err(Error::UnknownName {
                        kind: "metric",
                        value: other.to_owned(),
                    })
                }
            }
        }
        Ok(set)
    }
}

/// Whole-graph metrics at one point in time. Metrics that were not
/// requested, or are undefined on this graph, are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    pub n: usize,
    pub m: usize,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_sig9"
    )]
    pub density: Option<f64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_sig9"
    )]
    pub apl: Option<f64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_sig9"
    )]
    pub transitivity: Option<f64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_sig9"
    )]
    pub centralization_total: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub largest_wcc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub largest_scc: Option<usize>,
}

pub fn snapshot(graph: &DirectedGraph, metrics: &MetricSet) -> MetricsSnapshot {
    snapshot_with(graph, metrics, Execution::default())
}

pub fn snapshot_with(graph: &DirectedGraph, metrics: &MetricSet, exec: Execution) -> MetricsSnapshot {
    let components = metrics
        .components
        .then(|| component_summary(graph).ok())
        .flatten();
    MetricsSnapshot {
        n: graph.node_count(),
        m: graph.edge_count(),
        density: metrics.density.then(|| density(graph).ok()).flatten(),
        apl: metrics
            .apl
            .then(|| path_length_stats(graph, exec).mean())
            .flatten(),
        transitivity: metrics
            .transitivity
            .then(|| transitivity_with(graph, exec).ok())
            .flatten(),
        centralization_total: metrics
            .centralization
            .then(|| degree_centralization(graph, DegreeMode::Total).ok())
            .flatten(),
        largest_wcc: components.map(|c| c.largest_wcc),
        largest_scc: components.map(|c| c.largest_scc),
    }
}

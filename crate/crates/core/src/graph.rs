//! Directed graph snapshots, edge-record cleaning and node removal.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque node identifier, usually an IP address string. Redacted forms such
/// as `23.137.254.xxx` are fine: labels are never parsed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NodeLabel(String);

impl NodeLabel {
    /// Trims surrounding whitespace; rejects labels that end up empty.
    pub fn new(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(Error::EmptyLabel);
        }
        Ok(NodeLabel(trimmed.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for NodeLabel {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        if value.trim().len() == value.len() && !value.is_empty() {
            Ok(NodeLabel(value))
        } else {
            NodeLabel::new(&value)
        }
    }
}

impl From<NodeLabel> for String {
    fn from(label: NodeLabel) -> String {
        label.0
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NodeLabel {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// One raw ingestion row.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeRecord {
    pub src: Option<String>,
    pub dst: Option<String>,
    pub tunnel_id: Option<String>,
}

impl EdgeRecord {
    pub fn new(src: &str, dst: &str) -> Self {
        EdgeRecord {
            src: Some(src.to_owned()),
            dst: Some(dst.to_owned()),
            tunnel_id: None,
        }
    }

    pub fn with_tunnel(mut self, tunnel: &str) -> Self {
        self.tunnel_id = Some(tunnel.to_owned());
        self
    }

    /// A record is anonymous when either endpoint is missing or blank.
    pub fn is_anonymous(&self) -> bool {
        let blank = |s: &Option<String>| s.as_deref().is_none_or(|v| v.trim().is_empty());
        blank(&self.src) || blank(&self.dst)
    }

    fn tunnel(&self) -> Option<&str> {
        self.tunnel_id
            .as_deref()
            .map(str::trim)
            .filter(|t| !t.is_empty())
    }
}

/// How rows with a missing endpoint are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CleaningPolicy {
    /// Drop only the anonymous rows.
    RowOnly,
    /// Also drop every row sharing a tunnel id with an anonymous row.
    #[default]
    TunnelCascade,
}

/// Audit of what ingestion dropped.
///
/// `rows_read` always equals the final edge count plus every dropped
/// category: duplicates and self-loops are counted against rows that
/// survived cleaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CleaningReport {
    pub rows_read: usize,
    pub rows_dropped_missing: usize,
    pub rows_dropped_cascade: usize,
    pub duplicate_edges_collapsed: usize,
    pub self_loops_dropped: usize,
}

impl CleaningReport {
    /// Rows that survived cleaning (before duplicate/loop collapsing).
    pub fn rows_kept(&self) -> usize {
        self.rows_read - self.rows_dropped_missing - self.rows_dropped_cascade
    }

    /// Folds the build-time counts into this report.
    pub fn absorb(&mut self, build: BuildReport) {
        self.duplicate_edges_collapsed += build.duplicate_edges_collapsed;
        self.self_loops_dropped += build.self_loops_dropped;
    }
}

/// Counts recorded while turning clean records into a simple graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildReport {
    pub duplicate_edges_collapsed: usize,
    pub self_loops_dropped: usize,
}

pub fn clean_records(
    records: &[EdgeRecord],
    policy: CleaningPolicy,
) -> (Vec<EdgeRecord>, CleaningReport) {
    let mut report = CleaningReport {
        rows_read: records.len(),
        ..CleaningReport::default()
    };
    let tainted: HashSet<&str> = match policy {
        CleaningPolicy::RowOnly => HashSet::new(),
        CleaningPolicy::TunnelCascade => records
            .iter()
            .filter(|r| r.is_anonymous())
            .filter_map(EdgeRecord::tunnel)
            .collect(),
    };

    let mut kept = Vec::with_capacity(records.len());
    for record in records {
        if record.is_anonymous() {
            report.rows_dropped_missing += 1;
        } else if record.tunnel().is_some_and(|t| tainted.contains(t)) {
            report.rows_dropped_cascade += 1;
        } else {
            kept.push(record.clone());
        }
    }
    (kept, report)
}

/// Builds a simple loop-free graph from clean records.
///
/// Duplicate ordered pairs collapse to one edge and `(u, u)` rows are
/// dropped; both are tallied in the returned [`BuildReport`].
pub fn build_graph(records: &[EdgeRecord]) -> Result<(DirectedGraph, BuildReport)> {
    let mut builder = GraphBuilder::default();
    for (index, record) in records.iter().enumerate() {
        let (Some(src), Some(dst)) = (record.src.as_deref(), record.dst.as_deref()) else {
            return Err(Error::AnonymousRecord { index });
        };
        let (src, dst) = match (NodeLabel::new(src), NodeLabel::new(dst)) {
            (Ok(s), Ok(d)) => (s, d),
            _ => return Err(Error::AnonymousRecord { index }),
        };
        builder.add_edge(src, dst);
    }
    let report = builder.report;
    Ok((builder.build(), report))
}

/// Accumulates labeled nodes and edges, collapsing duplicates and loops.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: BTreeSet<NodeLabel>,
    edges: BTreeSet<(NodeLabel, NodeLabel)>,
    report: BuildReport,
}

impl GraphBuilder {
    pub fn add_node(&mut self, label: NodeLabel) {
        self.nodes.insert(label);
    }

    pub fn add_edge(&mut self, src: NodeLabel, dst: NodeLabel) {
        self.nodes.insert(src.clone());
        self.nodes.insert(dst.clone());
        if src == dst {
            self.report.self_loops_dropped += 1;
        } else if !self.edges.insert((src, dst)) {
            self.report.duplicate_edges_collapsed += 1;
        }
    }

    pub fn report(&self) -> BuildReport {
        self.report
    }

    pub fn build(self) -> DirectedGraph {
        let labels: Vec<NodeLabel> = self.nodes.into_iter().collect();
        let mut out_adj = vec![Vec::new(); labels.len()];
        let mut in_adj = vec![Vec::new(); labels.len()];
        let index = |l: &NodeLabel| labels.binary_search(l).expect("endpoint registered") as u32;
        // BTreeSet order keeps every adjacency list sorted.
        for (src, dst) in &self.edges {
            let (u, v) = (index(src), index(dst));
            out_adj[u as usize].push(v);
            in_adj[v as usize].push(u);
        }
        for list in &mut in_adj {
            list.sort_unstable();
        }
        DirectedGraph {
            edge_count: self.edges.len(),
            labels,
            out_adj,
            in_adj,
        }
    }
}

/// Immutable simple, loop-free directed graph.
///
/// Nodes are stored in ascending label order, so node index order and
/// lexicographic label order coincide. Adjacency lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    labels: Vec<NodeLabel>,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    edge_count: usize,
}

impl DirectedGraph {
    pub fn empty() -> Self {
        DirectedGraph {
            labels: Vec::new(),
            out_adj: Vec::new(),
            in_adj: Vec::new(),
            edge_count: 0,
        }
    }

    /// Builds from label pairs, rejecting loops and duplicate edges.
    pub fn from_edges<'a, N, E>(nodes: N, edges: E) -> Result<Self>
    where
        N: IntoIterator<Item = &'a str>,
        E: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut builder = GraphBuilder::default();
        for node in nodes {
            builder.add_node(NodeLabel::new(node)?);
        }
        for (src, dst) in edges {
            builder.add_edge(NodeLabel::new(src)?, NodeLabel::new(dst)?);
        }
        let report = builder.report();
        if report.self_loops_dropped > 0 {
            return Err(Error::InvalidGraph("self-loop edge".into()));
        }
        if report.duplicate_edges_collapsed > 0 {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        Ok(builder.build())
    }

    /// Builds from sorted, unique labels and index pairs.
    pub(crate) fn from_indexed(labels: Vec<NodeLabel>, edges: &[(usize, usize)]) -> Result<Self> {
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        let n = labels.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph("self-loop edge".into()));
            }
            out_adj[u].push(v as u32);
            in_adj[v].push(u as u32);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph("duplicate edge".into()));
            }
        }
        Ok(DirectedGraph {
            labels,
            out_adj,
            in_adj,
            edge_count: edges.len(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &NodeLabel {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels
            .binary_search_by(|probe| probe.as_str().cmp(label))
            .ok()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index_of(label).is_some()
    }

    pub fn out_neighbors(&self, node: usize) -> &[u32] {
        &self.out_adj[node]
    }

    pub fn in_neighbors(&self, node: usize) -> &[u32] {
        &self.in_adj[node]
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_adj[node].len()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_adj[node].len()
    }

    pub fn total_degree(&self, node: usize) -> usize {
        self.in_degree(node) + self.out_degree(node)
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.out_adj[src].binary_search(&(dst as u32)).is_ok()
    }

    /// Edges as index pairs, sorted by `(src, dst)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v as usize)))
    }

    /// Sorted neighbor lists of the undirected skeleton: edge directions
    /// ignored, reciprocal arcs merged.
    pub fn skeleton(&self) -> Vec<Vec<u32>> {
        self.out_adj
            .iter()
            .zip(&self.in_adj)
            .map(|(outs, ins)| merge_sorted(outs, ins))
            .collect()
    }

    /// Returns a new snapshot without `label` and every edge touching it,
    /// together with the node's in- and out-degree at removal time.
    pub fn remove_node(&self, label: &str) -> Result<(DirectedGraph, usize, usize)> {
        let gone = self
            .index_of(label)
            .ok_or_else(|| Error::UnknownNode(label.to_owned()))?;
        let removed_in = self.in_degree(gone);
        let removed_out = self.out_degree(gone);
        let shift = |v: u32| if v as usize > gone { v - 1 } else { v };
        let strip = |lists: &[Vec<u32>]| -> Vec<Vec<u32>> {
            lists
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != gone)
                .map(|(_, list)| {
                    list.iter()
                        .filter(|&&v| v as usize != gone)
                        .map(|&v| shift(v))
                        .collect()
                })
                .collect()
        };
        let mut labels = self.labels.clone();
        labels.remove(gone);
        let graph = DirectedGraph {
            labels,
            out_adj: strip(&self.out_adj),
            in_adj: strip(&self.in_adj),
            edge_count: self.edge_count - removed_in - removed_out,
        };
        Ok((graph, removed_in, removed_out))
    }

    /// Returns a new snapshot with an extra isolated node. A label that is
    /// already present leaves the graph unchanged.
    pub fn with_isolated_node(&self, label: NodeLabel) -> DirectedGraph {
        let pos = match self.labels.binary_search(&label) {
            Ok(_) => return self.clone(),
            Err(pos) => pos,
        };
        let shift = |v: &u32| if *v as usize >= pos { v + 1 } else { *v };
        let grow = |lists: &[Vec<u32>]| -> Vec<Vec<u32>> {
            let mut out: Vec<Vec<u32>> = lists
                .iter()
                .map(|list| list.iter().map(shift).collect())
                .collect();
            out.insert(pos, Vec::new());
            out
        };
        let mut labels = self.labels.clone();
        labels.insert(pos, label);
        DirectedGraph {
            labels,
            out_adj: grow(&self.out_adj),
            in_adj: grow(&self.in_adj),
            edge_count: self.edge_count,
        }
    }
}

fn merge_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rec(src: &str, dst: &str, tunnel: &str) -> EdgeRecord {
        EdgeRecord {
            src: (!src.is_empty()).then(|| src.to_owned()),
            dst: (!dst.is_empty()).then(|| dst.to_owned()),
            tunnel_id: Some(tunnel.to_owned()),
        }
    }

    #[test]
    fn label_trims_and_rejects_blank() {
        assert_eq!(NodeLabel::new("  1.2.3.4 ").unwrap().as_str(), "1.2.3.4");
        assert!(matches!(NodeLabel::new("   "), Err(Error::EmptyLabel)));
        assert!(NodeLabel::try_from(String::new()).is_err());
    }

    #[test]
    fn complete_records_pass_untouched() {
        let records = vec![rec("A", "B", "t"), rec("B", "C", "t"), rec("C", "A", "u")];
        let (kept, report) = clean_records(&records, CleaningPolicy::TunnelCascade);
        assert_eq!(kept, records);
        assert_eq!(report.rows_read, 3);
        assert_eq!(report.rows_kept(), 3);
        assert_eq!(report.rows_dropped_missing + report.rows_dropped_cascade, 0);
    }

    #[test]
    fn tunnel_cascade_drops_tunnel_mates() {
        let records = vec![rec("A", "B", "t1"), rec("A", "", "t1"), rec("C", "D", "t2")];
        let (kept, report) = clean_records(&records, CleaningPolicy::TunnelCascade);
        assert_eq!(kept, vec![rec("C", "D", "t2")]);
        assert_eq!(report.rows_dropped_missing, 1);
        assert_eq!(report.rows_dropped_cascade, 1);

        let (kept, report) = clean_records(&records, CleaningPolicy::RowOnly);
        assert_eq!(kept.len(), 2);
        assert_eq!(report.rows_dropped_cascade, 0);
    }

    #[test]
    fn blank_endpoint_counts_as_missing() {
        let r = EdgeRecord {
            src: Some("  ".into()),
            dst: Some("B".into()),
            tunnel_id: None,
        };
        assert!(r.is_anonymous());
        let (kept, report) = clean_records(&[r], CleaningPolicy::TunnelCascade);
        assert!(kept.is_empty());
        assert_eq!(report.rows_dropped_missing, 1);
    }

    #[test]
    fn empty_input_yields_zero_report() {
        let (kept, report) = clean_records(&[], CleaningPolicy::TunnelCascade);
        assert!(kept.is_empty());
        assert_eq!(report, CleaningReport::default());
    }

    #[test]
    fn row_only_matches_scan_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let records: Vec<EdgeRecord> = (0..200)
            .map(|i| {
                let missing = rng.gen_bool(0.1);
                let side = rng.gen_bool(0.5);
                let a = format!("10.0.0.{}", rng.gen_range(0..30));
                let b = format!("10.0.1.{}", rng.gen_range(0..30));
                EdgeRecord {
                    src: (!(missing && side)).then_some(a),
                    dst: (!(missing && !side)).then_some(b),
                    tunnel_id: Some(format!("t{}", i % 17)),
                }
            })
            .collect();
        let mut oracle = 0;
        for r in &records {
            if r.src.is_some() && r.dst.is_some() {
                oracle += 1;
            }
        }
        let (kept, report) = clean_records(&records, CleaningPolicy::RowOnly);
        assert_eq!(kept.len(), oracle);
        assert_eq!(report.rows_kept(), oracle);
        assert_eq!(report.rows_dropped_missing, 200 - oracle);
    }

    #[test]
    fn build_collapses_duplicates_and_loops() {
        let records = vec![
            EdgeRecord::new("A", "B"),
            EdgeRecord::new("A", "B"),
            EdgeRecord::new("B", "A"),
            EdgeRecord::new("C", "C"),
        ];
        let (g, report) = build_graph(&records).unwrap();
        assert_eq!(g.labels().iter().map(|l| l.as_str()).collect::<Vec<_>>(), ["A", "B", "C"]);
        assert_eq!(g.edges().collect::<Vec<_>>(), [(0, 1), (1, 0)]);
        assert_eq!(report.duplicate_edges_collapsed, 1);
        assert_eq!(report.self_loops_dropped, 1);

        let mut full = CleaningReport {
            rows_read: 4,
            ..Default::default()
        };
        full.absorb(report);
        assert_eq!(
            full.rows_read,
            g.edge_count() + full.duplicate_edges_collapsed + full.self_loops_dropped
        );
    }

    #[test]
    fn build_empty_and_anonymous() {
        let (g, _) = build_graph(&[]).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (0, 0));
        let bad = EdgeRecord {
            src: Some("A".into()),
            dst: None,
            tunnel_id: None,
        };
        assert!(matches!(
            build_graph(&[bad]),
            Err(Error::AnonymousRecord { index: 0 })
        ));
    }

    #[test]
    fn build_matches_set_insertion_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let records: Vec<EdgeRecord> = (0..500)
            .map(|_| {
                let a = format!("n{}", rng.gen_range(0..60));
                let b = format!("n{}", rng.gen_range(0..60));
                EdgeRecord::new(&a, &b)
            })
            .collect();
        let mut nodes = HashSet::new();
        let mut edges = HashSet::new();
        for r in &records {
            let (a, b) = (r.src.clone().unwrap(), r.dst.clone().unwrap());
            nodes.insert(a.clone());
            nodes.insert(b.clone());
            if a != b {
                edges.insert((a, b));
            }
        }
        let (g, _) = build_graph(&records).unwrap();
        assert_eq!(g.node_count(), nodes.len());
        assert_eq!(g.edge_count(), edges.len());
        assert!(g.edge_count() <= records.len());
        assert!(g.node_count() <= 2 * records.len());
    }

    #[test]
    fn remove_isolated_node() {
        let g = DirectedGraph::from_edges(
            ["E"],
            [("A", "B"), ("B", "C"), ("C", "D"), ("D", "A")],
        )
        .unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (5, 4));
        let (h, i, o) = g.remove_node("E").unwrap();
        assert_eq!((h.node_count(), h.edge_count(), i, o), (4, 4, 0, 0));
        assert_eq!(g.node_count(), 5, "original untouched");
    }

    #[test]
    fn remove_star_hub() {
        let leaves = ["a", "b", "c", "d", "e", "f"];
        let edges: Vec<(&str, &str)> = leaves
            .iter()
            .flat_map(|&l| [("hub", l), (l, "hub")])
            .collect();
        let g = DirectedGraph::from_edges([], edges).unwrap();
        let (h, i, o) = g.remove_node("hub").unwrap();
        assert_eq!((h.node_count(), h.edge_count()), (6, 0));
        assert_eq!((i, o), (6, 6));
    }

    #[test]
    fn remove_unknown_node() {
        let g = DirectedGraph::from_edges([], [("A", "B")]).unwrap();
        assert!(matches!(g.remove_node("Z"), Err(Error::UnknownNode(l)) if l == "Z"));
    }

    #[test]
    fn readd_restores_count_not_edges() {
        let g = DirectedGraph::from_edges([], [("A", "B"), ("B", "C"), ("C", "A")]).unwrap();
        let (h, _, _) = g.remove_node("B").unwrap();
        let back = h.with_isolated_node(NodeLabel::new("B").unwrap());
        assert_eq!(back.node_count(), g.node_count());
        assert_eq!(back.edge_count(), 1);
        let b = back.index_of("B").unwrap();
        assert_eq!(back.total_degree(b), 0);
        let (a, c) = (back.index_of("A").unwrap(), back.index_of("C").unwrap());
        assert!(back.has_edge(c, a));
    }

    #[test]
    fn from_edges_rejects_loops_and_duplicates() {
        assert!(DirectedGraph::from_edges([], [("A", "A")]).is_err());
        assert!(DirectedGraph::from_edges([], [("A", "B"), ("A", "B")]).is_err());
    }

    #[test]
    fn skeleton_merges_reciprocal_arcs() {
        let g = DirectedGraph::from_edges([], [("A", "B"), ("B", "A"), ("C", "A")]).unwrap();
        assert_eq!(g.skeleton(), vec![vec![1, 2], vec![0], vec![0]]);
    }
}

//! Louvain community detection and modularity on the undirected skeleton.
//!
//! Directed input is symmetrized first: directions are ignored and a
//! reciprocal pair of arcs becomes a single edge of weight 1.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeLabel};
use crate::io::ser_sig9;

/// Minimum modularity gain for a node move; smaller gains are treated as
/// ties so that rounding noise cannot cause endless cycling.
const MIN_GAIN: f64 = 1e-12;

/// Newman modularity of an index-aligned assignment (resolution 1).
pub fn modularity(graph: &DirectedGraph, assignment: &[usize]) -> Result<f64> {
    modularity_with_resolution(graph, assignment, 1.0)
}

/// `Q = sum_c (e_c - resolution * a_c^2)`, where `e_c` is the fraction of
/// skeleton edges inside `c` and `a_c` the fraction of edge endpoints in `c`.
/// An edgeless graph has modularity 0.
pub fn modularity_with_resolution(
    graph: &DirectedGraph,
    assignment: &[usize],
    resolution: f64,
) -> Result<f64> {
    if assignment.len() < graph.node_count() {
        return Err(Error::MissingAssignment(
            graph.label(assignment.len()).to_string(),
        ));
    }
    let skeleton = graph.skeleton();
    let edges: usize = skeleton.iter().map(Vec::len).sum::<usize>() / 2;
    if edges == 0 {
        return Ok(0.0);
    }
    let mut inside: BTreeMap<usize, f64> = BTreeMap::new();
    let mut endpoints: BTreeMap<usize, f64> = BTreeMap::new();
    for (u, nbrs) in skeleton.iter().enumerate() {
        let c = assignment[u];
        *endpoints.entry(c).or_default() += nbrs.len() as f64;
        let internal = nbrs
            .iter()
            .filter(|&&v| (v as usize) > u && assignment[v as usize] == c)
            .count();
        *inside.entry(c).or_default() += internal as f64;
    }
    let m = edges as f64;
    Ok(endpoints
        .iter()
        .map(|(c, &deg)| {
            let e = inside.get(c).copied().unwrap_or(0.0) / m;
            let a = deg / (2.0 * m);
            e - resolution * a * a
        })
        .sum())
}

/// Modularity of a label-keyed assignment.
pub fn modularity_of_labels(
    graph: &DirectedGraph,
    assignment: &HashMap<NodeLabel, usize>,
) -> Result<f64> {
    let aligned = graph
        .labels()
        .iter()
        .map(|l| {
            assignment
                .get(l)
                .copied()
                .ok_or_else(|| Error::MissingAssignment(l.to_string()))
        })
        .collect::<Result<Vec<usize>>>()?;
    modularity(graph, &aligned)
}

/// A node partition with its modularity.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityPartition {
    labels: Vec<NodeLabel>,
    /// Community id per node, dense in `0..community_count`, numbered in
    /// order of first appearance along the label order.
    pub assignment: Vec<usize>,
    pub community_count: usize,
    /// Classic (resolution 1) modularity of `assignment`.
    pub modularity: f64,
    pub seed: u64,
    pub resolution: f64,
    /// Objective value after each Louvain level, starting from singletons.
    pub level_modularity: Vec<f64>,
}

impl CommunityPartition {
    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn community_of(&self, label: &str) -> Option<usize> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
            .map(|i| self.assignment[i])
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.community_count];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }
}

/// One community in the filtered listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Community {
    pub id: usize,
    pub size: usize,
    pub members: Vec<NodeLabel>,
}

/// Communities with strictly more than `min_size` members, largest first
/// (ties by id), members in label order.
pub fn filter_communities(partition: &CommunityPartition, min_size: usize) -> Vec<Community> {
    let mut members: Vec<Vec<NodeLabel>> = vec![Vec::new(); partition.community_count];
    for (label, &c) in partition.labels.iter().zip(&partition.assignment) {
        members[c].push(label.clone());
    }
    let mut out: Vec<Community> = members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| m.len() > min_size)
        .map(|(id, mut members)| {
            members.sort();
            Community {
                id,
                size: members.len(),
                members,
            }
        })
        .collect();
    out.sort_by(|a, b| b.size.cmp(&a.size).then(a.id.cmp(&b.id)));
    out
}

/// JSON document emitted by the `communities` command.
#[derive(Debug, Clone, Serialize)]
pub struct CommunityReport {
    pub seed: u64,
    pub resolution: f64,
    pub community_count: usize,
    #[serde(serialize_with = "ser_sig9")]
    pub modularity: f64,
    pub communities: Vec<Community>,
}

impl CommunityReport {
    pub fn new(partition: &CommunityPartition, min_size: usize) -> Self {
        CommunityReport {
            seed: partition.seed,
            resolution: partition.resolution,
            community_count: partition.community_count,
            modularity: partition.modularity,
            communities: filter_communities(partition, min_size),
        }
    }
}

/// Weighted undirected graph used inside Louvain levels.
#[derive(Debug, Clone)]
struct LevelGraph {
    /// Neighbor weights, excluding self-loops, sorted by neighbor.
    adj: Vec<Vec<(u32, f64)>>,
    /// Internal weight carried by each (super)node, each edge counted once.
    self_loop: Vec<f64>,
    /// Weighted degree: `sum adj + 2 * self_loop`.
    degree: Vec<f64>,
    /// Total edge weight `m`.
    total: f64,
}

impl LevelGraph {
    fn from_skeleton(skeleton: &[Vec<u32>]) -> Self {
        let adj: Vec<Vec<(u32, f64)>> = skeleton
            .iter()
            .map(|nbrs| nbrs.iter().map(|&v| (v, 1.0)).collect())
            .collect();
        let degree = skeleton.iter().map(|n| n.len() as f64).collect();
        let total = skeleton.iter().map(Vec::len).sum::<usize>() as f64 / 2.0;
        LevelGraph {
            self_loop: vec![0.0; adj.len()],
            adj,
            degree,
            total,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Modularity of the singleton partition of this level's nodes, which is
    /// the modularity of the partition these supernodes represent.
    fn singleton_modularity(&self, resolution: f64) -> f64 {
        let m2 = 2.0 * self.total;
        (0..self.len())
            .map(|c| {
                let a = self.degree[c] / m2;
                self.self_loop[c] / self.total - resolution * a * a
            })
            .sum()
    }

    /// Local-move phase. Returns the (dense) community of each node and
    /// whether any node moved.
    fn local_moves(&self, resolution: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut weight_to = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let scale = resolution / (2.0 * self.total);
        let mut any_move = false;

        loop {
            let mut moved = false;
            for &i in &order {
                let home = comm[i];
                let k = self.degree[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j as usize];
                    if weight_to[c] == 0.0 {
                        touched.push(c);
                    }
                    weight_to[c] += w;
                }
                tot[home] -= k;
                let mut best = home;
                let mut best_gain = weight_to[home] - tot[home] * k * scale;
                for &c in &touched {
                    let gain = weight_to[c] - tot[c] * k * scale;
                    if gain > best_gain + MIN_GAIN {
                        best = c;
                        best_gain = gain;
                    }
                }
                tot[best] += k;
                comm[i] = best;
                if best != home {
                    moved = true;
                }
                for c in touched.drain(..) {
                    weight_to[c] = 0.0;
                }
            }
            if !moved {
                break;
            }
            any_move = true;
        }
        (densify(&comm), any_move)
    }

    fn aggregate(&self, comm: &[usize], count: usize) -> LevelGraph {
        let mut self_loop = vec![0.0f64; count];
        let mut degree = vec![0.0f64; count];
        let mut links: Vec<(u32, u32, f64)> = Vec::new();
        for i in 0..self.len() {
            let ci = comm[i];
            self_loop[ci] += self.self_loop[i];
            degree[ci] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                let cj = comm[j as usize];
                if ci == cj {
                    // each internal edge is seen from both ends
                    if (j as usize) > i {
                        self_loop[ci] += w;
                    }
                } else {
                    links.push((ci as u32, cj as u32, w));
                }
            }
        }
        links.sort_by_key(|&(a, b, _)| (a, b));
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); count];
        for (a, b, w) in links {
            let list = &mut adj[a as usize];
            match list.last_mut() {
                Some((last, acc)) if *last == b => *acc += w,
                _ => list.push((b, w)),
            }
        }
        LevelGraph {
            adj,
            self_loop,
            degree,
            total: self.total,
        }
    }
}

fn densify(comm: &[usize]) -> Vec<usize> {
    let mut map = vec![usize::MAX; comm.len()];
    let mut next = 0;
    comm.iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect()
}

/// Two-phase Louvain (local moves, then aggregation) until a level makes no
/// move. Node visit order is shuffled per level from `seed`.
pub fn louvain(graph: &DirectedGraph, seed: u64, resolution: f64) -> Result<CommunityPartition> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InfeasibleSpec(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let skeleton = graph.skeleton();
    let mut level = LevelGraph::from_skeleton(&skeleton);
    if level.total == 0.0 {
        return Err(Error::EmptyEdgeSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..graph.node_count()).collect();
    let mut history = vec![level.singleton_modularity(resolution)];

    loop {
        let (comm, moved) = level.local_moves(resolution, &mut rng);
        if !moved {
            break;
        }
        let count = comm.iter().copied().max().map_or(0, |c| c + 1);
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        level = level.aggregate(&comm, count);
        history.push(level.singleton_modularity(resolution));
        if count == 1 {
            break;
        }
    }

    let assignment = densify(&membership);
    let community_count = assignment.iter().copied().max().map_or(0, |c| c + 1);
    let modularity = modularity(graph, &assignment)?;
    Ok(CommunityPartition {
        labels: graph.labels().to_vec(),
        assignment,
        community_count,
        modularity,
        seed,
        resolution,
        level_modularity: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bidirected(pairs: &[(&'static str, &'static str)]) -> DirectedGraph {
        let edges: Vec<(&str, &str)> = pairs.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        DirectedGraph::from_edges([], edges).unwrap()
    }

    fn two_triangles() -> DirectedGraph {
        bidirected(&[("a", "b"), ("b", "c"), ("a", "c"), ("x", "y"), ("y", "z"), ("x", "z")])
    }

    #[test]
    fn modularity_examples() {
        let g = two_triangles();
        let split = vec![0, 0, 0, 1, 1, 1];
        assert!((modularity(&g, &split).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(modularity(&g, &[7; 6]).unwrap(), 0.0);
        assert!(matches!(
            modularity(&g, &[0, 0]),
            Err(Error::MissingAssignment(l)) if l == "c"
        ));
    }

    #[test]
    fn modularity_by_label_requires_cover() {
        let g = two_triangles();
        let mut map: HashMap<NodeLabel, usize> = g
            .labels()
            .iter()
            .map(|l| (l.clone(), usize::from(l.as_str() >= "x")))
            .collect();
        assert!((modularity_of_labels(&g, &map).unwrap() - 0.5).abs() < 1e-15);
        map.remove(&NodeLabel::new("y").unwrap());
        assert!(matches!(modularity_of_labels(&g, &map), Err(Error::MissingAssignment(_))));
    }

    #[test]
    fn louvain_two_triangles() {
        let p = louvain(&two_triangles(), 1, 1.0).unwrap();
        assert_eq!(p.community_count, 2);
        assert!((p.modularity - 0.5).abs() < 1e-12);
        assert_eq!(p.community_of("a"), p.community_of("c"));
        assert_ne!(p.community_of("a"), p.community_of("x"));
    }

    #[test]
    fn louvain_single_triangle() {
        let p = louvain(&bidirected(&[("a", "b"), ("b", "c"), ("a", "c")]), 9, 1.0).unwrap();
        assert_eq!(p.community_count, 1);
        assert!(p.modularity.abs() < 1e-12);
    }

    #[test]
    fn louvain_errors() {
        let g = DirectedGraph::from_edges(["a", "b"], []).unwrap();
        assert!(matches!(louvain(&g, 0, 1.0), Err(Error::EmptyEdgeSet)));
        assert!(louvain(&two_triangles(), 0, 0.0).is_err());
    }

    #[test]
    fn filter_by_size() {
        let labels: Vec<NodeLabel> = (0..19).map(|i| NodeLabel::new(&format!("n{i:02}")).unwrap()).collect();
        let mut assignment = vec![0; 10];
        assignment.extend([1; 6]);
        assignment.extend([2; 3]);
        let p = CommunityPartition {
            labels,
            assignment,
            community_count: 3,
            modularity: 0.0,
            seed: 0,
            resolution: 1.0,
            level_modularity: vec![],
        };
        let big = filter_communities(&p, 5);
        assert_eq!(big.iter().map(|c| c.size).collect::<Vec<_>>(), [10, 6]);
        assert_eq!(filter_communities(&p, 0).len(), 3);
        assert_eq!(filter_communities(&p, 6).len(), 1);
    }
}

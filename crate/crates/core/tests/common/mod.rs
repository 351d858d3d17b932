//! Brute-force oracles. None of these reuse the library's algorithms: they
//! only read the graph through `node_count` and `edges`.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, HashSet};

use netresil::graph::GraphBuilder;
use netresil::{DirectedGraph, NodeLabel};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn adjacency_matrix(g: &DirectedGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
    }
    a
}

/// Independent random digraph: every ordered pair kept with probability `p`.
pub fn bernoulli_digraph(n: usize, p: f64, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::default();
    let label = |i: usize| NodeLabel::new(&format!("n{i:03}")).unwrap();
    for i in 0..n {
        b.add_node(label(i));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p) {
                b.add_edge(label(i), label(j));
            }
        }
    }
    b.build()
}

/// All-pairs hop distances.
pub fn floyd_warshall(g: &DirectedGraph) -> Vec<Vec<Option<u64>>> {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    let mut d: Vec<Vec<Option<u64>>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Some(0) } else if a[i][j] { Some(1) } else { None }).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|cur| x + y < cur) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

/// `(sum of finite distances, number of reachable ordered pairs)`.
pub fn apl_oracle(g: &DirectedGraph) -> (u64, u64) {
    let d = floyd_warshall(g);
    let mut sum = 0;
    let mut pairs = 0;
    for (i, row) in d.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                if let Some(x) = x {
                    sum += x;
                    pairs += 1;
                }
            }
        }
    }
    (sum, pairs)
}

fn undirected(g: &DirectedGraph) -> Vec<Vec<bool>> {
    let mut a = adjacency_matrix(g);
    let n = a.len();
    for i in 0..n {
        for j in 0..n {
            if a[i][j] {
                a[j][i] = true;
            }
        }
    }
    a
}

/// `(triangles, connected triples)` by enumerating every node triple.
pub fn triangle_oracle(g: &DirectedGraph) -> (u64, u64) {
    let a = undirected(g);
    let n = a.len();
    let (mut triangles, mut triples) = (0, 0);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let links = [a[i][j], a[j][k], a[i][k]].iter().filter(|&&x| x).count();
                match links {
                    3 => {
                        triangles += 1;
                        triples += 3;
                    }
                    2 => triples += 1,
                    _ => {}
                }
            }
        }
    }
    (triangles, triples)
}

/// Betweenness by listing every shortest path, in exact rationals.
pub fn betweenness_oracle(g: &DirectedGraph) -> Vec<Ratio<i128>> {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    let d = floyd_warshall(g);
    let mut score = vec![Ratio::from_integer(0); n];
    for s in 0..n {
        for t in 0..n {
            if s == t || d[s][t].is_none() {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last == t {
                    paths.push(path);
                    continue;
                }
                for next in 0..n {
                    if a[last][next] && d[s][next] == Some(path.len() as u64) && d[next][t].is_some() {
                        let mut p = path.clone();
                        p.push(next);
                        stack.push(p);
                    }
                }
            }
            let total = paths.iter().filter(|p| p.len() as u64 == d[s][t].unwrap() + 1).count() as i128;
            for p in paths.iter().filter(|p| p.len() as u64 == d[s][t].unwrap() + 1) {
                for &v in &p[1..p.len() - 1] {
                    score[v] += Ratio::new(1, total);
                }
            }
        }
    }
    score
}

/// Newman modularity as a double sum over node pairs of the skeleton.
pub fn modularity_oracle(g: &DirectedGraph, assignment: &[usize]) -> f64 {
    let a = undirected(g);
    let n = a.len();
    let k: Vec<f64> = a.iter().map(|row| row.iter().filter(|&&x| x).count() as f64).collect();
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if assignment[i] == assignment[j] {
                q += f64::from(u8::from(a[i][j])) - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Weak and strong components by DFS reachability.
pub fn component_oracle(g: &DirectedGraph) -> (usize, usize, usize, usize) {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    let reach = |adj: &dyn Fn(usize, usize) -> bool, s: usize| {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if adj(u, v) && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    };
    let fwd: Vec<Vec<bool>> = (0..n).map(|s| reach(&|u, v| a[u][v], s)).collect();
    let weak: Vec<Vec<bool>> = (0..n).map(|s| reach(&|u, v| a[u][v] || a[v][u], s)).collect();
    let classes = |same: &dyn Fn(usize, usize) -> bool| {
        let mut sizes = Vec::new();
        let mut done = vec![false; n];
        for s in 0..n {
            if done[s] {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&v| same(s, v)).collect();
            for &v in &members {
                done[v] = true;
            }
            sizes.push(members.len());
        }
        sizes
    };
    let wcc = classes(&|s, v| weak[s][v]);
    let scc = classes(&|s, v| fwd[s][v] && fwd[v][s]);
    (
        wcc.iter().copied().max().unwrap_or(0),
        scc.iter().copied().max().unwrap_or(0),
        wcc.len(),
        scc.len(),
    )
}

/// Full sort of `(label, score)` pairs: score descending, label ascending.
pub fn full_sort(g: &DirectedGraph, score: impl Fn(usize) -> f64) -> Vec<(String, f64)> {
    let mut rows: Vec<(String, f64)> = (0..g.node_count())
        .map(|v| (g.label(v).to_string(), score(v)))
        .collect();
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    rows
}

/// Total degree from the raw edge list.
pub fn total_degrees(edges: &HashSet<(String, String)>) -> BTreeMap<String, usize> {
    let mut deg = BTreeMap::new();
    for (u, v) in edges {
        *deg.entry(u.clone()).or_insert(0) += 1;
        *deg.entry(v.clone()).or_insert(0) += 1;
    }
    deg
}

/// Replays an attack by recomputing degrees from scratch every step.
/// `adaptive = false` ranks once on the initial graph.
pub fn brute_force_attack(g: &DirectedGraph, steps: usize, adaptive: bool) -> Vec<String> {
    let mut nodes: Vec<String> = g.labels().iter().map(|l| l.to_string()).collect();
    let mut edges: HashSet<(String, String)> = g
        .edges()
        .map(|(u, v)| (g.label(u).to_string(), g.label(v).to_string()))
        .collect();
    let rank = |nodes: &[String], edges: &HashSet<(String, String)>| {
        let deg = total_degrees(edges);
        let mut order: Vec<(String, usize)> = nodes
            .iter()
            .map(|n| (n.clone(), deg.get(n).copied().unwrap_or(0)))
            .collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        order.into_iter().map(|(n, _)| n).collect::<Vec<_>>()
    };
    let initial = rank(&nodes, &edges);
    let mut removed = Vec::new();
    for step in 0..steps {
        let target = if adaptive {
            rank(&nodes, &edges)[0].clone()
        } else {
            initial[step].clone()
        };
        nodes.retain(|n| *n != target);
        edges.retain(|(u, v)| *u != target && *v != target);
        removed.push(target);
    }
    removed
}

/// The 7-node graph on which static and adaptive removal part ways:
/// `a` is the hub, `b` ranks second only through its arcs to `a`.
pub fn crafted_divergence_graph() -> DirectedGraph {
    DirectedGraph::from_edges(
        [],
        [
            ("a", "b"), ("b", "a"),
            ("a", "c"), ("c", "a"),
            ("a", "d"), ("d", "a"),
            ("b", "e"), ("e", "b"),
            ("f", "g"), ("g", "f"),
            ("f", "e"),
        ],
    )
    .unwrap()
}

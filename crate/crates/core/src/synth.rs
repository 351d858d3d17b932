//! Deterministic synthetic digraph generators.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Structural choices (which nodes/arcs) draw from
//! stream 0 and edge orientation coin flips from stream 1, so the two
//! purposes never share a sequence. Only integer sampling is used for
//! structure decisions.
//!
//! Generated nodes are labeled `v0`, `v1`, ... zero-padded to a common width
//! so label order and index order agree.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeLabel};

const STRUCTURE_STREAM: u64 = 0;
const DIRECTION_STREAM: u64 = 1;
const CONFIGURATION_PAIRING_ATTEMPTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "model")]
pub enum GeneratorModel {
    /// `edges` arcs chosen uniformly among all ordered pairs.
    UniformRandom { edges: usize },
    /// Growth model: each arriving node links to earlier nodes chosen with
    /// probability proportional to `total degree + 1`; orientation by coin.
    PreferentialAttachment { edges: usize },
    /// Node `v0` linked both ways to every other node.
    BidirectedStar,
    /// Realizes the given out/in degree sequences exactly.
    DirectedConfiguration {
        out_degrees: Vec<usize>,
        in_degrees: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub model: GeneratorModel,
    pub nodes: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn uniform(nodes: usize, edges: usize, seed: u64) -> Self {
        GeneratorSpec {
            model: GeneratorModel::UniformRandom { edges },
            nodes,
            seed,
        }
    }

    pub fn preferential(nodes: usize, edges: usize, seed: u64) -> Self {
        GeneratorSpec {
            model: GeneratorModel::PreferentialAttachment { edges },
            nodes,
            seed,
        }
    }

    pub fn star(nodes: usize) -> Self {
        GeneratorSpec {
            model: GeneratorModel::BidirectedStar,
            nodes,
            seed: 0,
        }
    }

    pub fn configuration(out_degrees: Vec<usize>, in_degrees: Vec<usize>, seed: u64) -> Self {
        GeneratorSpec {
            nodes: out_degrees.len(),
            model: GeneratorModel::DirectedConfiguration {
                out_degrees,
                in_degrees,
            },
            seed,
        }
    }
}

/// Labels `v0..v{n-1}`, zero-padded so that they sort numerically.
pub fn node_labels(n: usize) -> Vec<NodeLabel> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n)
        .map(|i| NodeLabel::new(&format!("v{i:0width$}")).expect("non-empty"))
        .collect()
}

fn streams(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut structure = ChaCha8Rng::seed_from_u64(seed);
    structure.set_stream(STRUCTURE_STREAM);
    let mut direction = ChaCha8Rng::seed_from_u64(seed);
    direction.set_stream(DIRECTION_STREAM);
    (structure, direction)
}

fn max_arcs(n: usize) -> usize {
    n * n.saturating_sub(1)
}

pub fn generate(spec: &GeneratorSpec) -> Result<DirectedGraph> {
    let n = spec.nodes;
    let edges = match &spec.model {
        GeneratorModel::UniformRandom { edges } => uniform_random(n, *edges, spec.seed)?,
        GeneratorModel::PreferentialAttachment { edges } => {
            preferential_attachment(n, *edges, spec.seed)?
        }
        GeneratorModel::BidirectedStar => {
            if n == 0 {
                return Err(Error::InfeasibleSpec("star needs at least one node".into()));
            }
            (1..n).flat_map(|leaf| [(0, leaf), (leaf, 0)]).collect()
        }
        GeneratorModel::DirectedConfiguration {
            out_degrees,
            in_degrees,
        } => {
            if out_degrees.len() != n || in_degrees.len() != n {
                return Err(Error::InfeasibleSpec(format!(
                    "degree sequences must have {n} entries"
                )));
            }
            directed_configuration(out_degrees, in_degrees, spec.seed)?
        }
    };
    DirectedGraph::from_indexed(node_labels(n), &edges)
}

fn uniform_random(n: usize, m: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let total = max_arcs(n);
    if m > total {
        return Err(Error::InfeasibleSpec(format!(
            "{m} edges exceed the {total} possible arcs on {n} nodes"
        )));
    }
    let (mut rng, _) = streams(seed);
    let dense = 2 * m > total;
    let wanted = if dense { total - m } else { m };
    let budget = 100 * wanted + 1000;
    let mut chosen: HashSet<(usize, usize)> = HashSet::with_capacity(wanted);
    let mut picked = Vec::with_capacity(wanted);
    let mut attempts = 0;
    while picked.len() < wanted {
        attempts += 1;
        if attempts > budget {
            return Err(Error::ResamplingExhausted { attempts: budget });
        }
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && chosen.insert((u, v)) {
            picked.push((u, v));
        }
    }
    if !dense {
        return Ok(picked);
    }
    Ok((0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v && !chosen.contains(&(u, v)))
        .collect())
}

/// Fenwick tree over integer weights, for proportional sampling.
struct WeightTree {
    tree: Vec<u64>,
    total: u64,
}

impl WeightTree {
    fn new(n: usize) -> Self {
        WeightTree {
            tree: vec![0; n + 1],
            total: 0,
        }
    }

    fn add(&mut self, index: usize, delta: u64) {
        self.total += delta;
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest index whose cumulative weight exceeds `target`.
    fn find(&self, mut target: u64) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        self.find(rng.gen_range(0..self.total))
    }
}

fn preferential_attachment(n: usize, m: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let total = max_arcs(n);
    if m > total {
        return Err(Error::InfeasibleSpec(format!(
            "{m} edges exceed the {total} possible arcs on {n} nodes"
        )));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let (mut rng, mut coin) = streams(seed);
    let mut weights = WeightTree::new(n);
    let mut arcs: HashSet<(usize, usize)> = HashSet::with_capacity(m);
    let mut out = Vec::with_capacity(m);
    weights.add(0, 1);

    for t in 1..n {
        // spread the budget evenly over arrivals, carrying any shortfall
        let target = (m as u128 * t as u128 / (n - 1) as u128) as usize;
        let quota = (target - out.len()).min(2 * t);
        let mut added = 0;
        let mut attempts = 0;
        let budget = 32 * quota + 64;
        while added < quota && attempts < budget {
            attempts += 1;
            let u = weights.sample(&mut rng);
            let forward = coin.gen_bool(0.5);
            let (first, second) = if forward { ((t, u), (u, t)) } else { ((u, t), (t, u)) };
            let arc = if !arcs.contains(&first) {
                first
            } else if !arcs.contains(&second) {
                second
            } else {
                continue;
            };
            arcs.insert(arc);
            out.push(arc);
            weights.add(u, 1);
            added += 1;
        }
        if added < quota {
            // near-saturated arrival: fill uniformly from the free slots
            let mut free: Vec<(usize, usize)> = (0..t)
                .flat_map(|u| [(t, u), (u, t)])
                .filter(|a| !arcs.contains(a))
                .collect();
            free.shuffle(&mut rng);
            for arc in free.into_iter().take(quota - added) {
                let u = if arc.0 == t { arc.1 } else { arc.0 };
                arcs.insert(arc);
                out.push(arc);
                weights.add(u, 1);
                added += 1;
            }
        }
        weights.add(t, 1 + added as u64);
    }
    debug_assert_eq!(out.len(), m);
    Ok(out)
}

/// Fulkerson–Chen–Anstee test for a digraphical (loop-free, simple)
/// out/in degree sequence pair.
pub fn is_digraphical(out_degrees: &[usize], in_degrees: &[usize]) -> bool {
    let n = out_degrees.len();
    if in_degrees.len() != n {
        return false;
    }
    if out_degrees.iter().sum::<usize>() != in_degrees.iter().sum::<usize>() {
        return false;
    }
    if out_degrees.iter().chain(in_degrees).any(|&d| d + 1 > n.max(1)) {
        return false;
    }
    let mut pairs: Vec<(usize, usize)> = out_degrees.iter().copied().zip(in_degrees.iter().copied()).collect();
    pairs.sort_by(|a, b| b.cmp(a));
    let mut lhs = 0;
    for k in 1..=n {
        lhs += pairs[k - 1].0;
        let head: usize = pairs[..k].iter().map(|p| p.1.min(k - 1)).sum();
        let tail: usize = pairs[k..].iter().map(|p| p.1.min(k)).sum();
        if lhs > head + tail {
            return false;
        }
    }
    true
}

fn directed_configuration(
    out_degrees: &[usize],
    in_degrees: &[usize],
    seed: u64,
) -> Result<Vec<(usize, usize)>> {
    if !is_digraphical(out_degrees, in_degrees) {
        return Err(Error::NonGraphical);
    }
    let (mut rng, _) = streams(seed);
    let mut out_stubs: Vec<usize> = Vec::new();
    let mut in_stubs: Vec<usize> = Vec::new();
    for (v, (&o, &i)) in out_degrees.iter().zip(in_degrees).enumerate() {
        out_stubs.extend(std::iter::repeat_n(v, o));
        in_stubs.extend(std::iter::repeat_n(v, i));
    }

    'attempt: for _ in 0..CONFIGURATION_PAIRING_ATTEMPTS {
        in_stubs.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(out_stubs.len());
        for (&u, &v) in out_stubs.iter().zip(&in_stubs) {
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        return Ok(out_stubs.iter().copied().zip(in_stubs.iter().copied()).collect());
    }

    // Pairing keeps colliding: build one realization deterministically and
    // randomize it with degree-preserving arc swaps.
    let mut arcs = kleitman_wang(out_degrees, in_degrees)?;
    let mut present: HashSet<(usize, usize)> = arcs.iter().copied().collect();
    if arcs.len() >= 2 {
        for _ in 0..10 * arcs.len() {
            let i = rng.gen_range(0..arcs.len());
            let j = rng.gen_range(0..arcs.len());
            let ((a, b), (c, d)) = (arcs[i], arcs[j]);
            let (x, y) = ((a, d), (c, b));
            if a == d || c == b || present.contains(&x) || present.contains(&y) {
                continue;
            }
            present.remove(&arcs[i]);
            present.remove(&arcs[j]);
            present.insert(x);
            present.insert(y);
            arcs[i] = x;
            arcs[j] = y;
        }
    }
    Ok(arcs)
}

/// Kleitman–Wang construction: repeatedly take the node with the largest
/// remaining out-degree and point it at the nodes with the largest
/// remaining in-degree (ties by larger remaining out-degree, then index).
fn kleitman_wang(out_degrees: &[usize], in_degrees: &[usize]) -> Result<Vec<(usize, usize)>> {
    let n = out_degrees.len();
    let mut out_left = out_degrees.to_vec();
    let mut in_left = in_degrees.to_vec();
    let mut arcs = Vec::with_capacity(out_left.iter().sum());
    while let Some(v) = (0..n)
        .filter(|&v| out_left[v] > 0)
        .max_by(|&a, &b| out_left[a].cmp(&out_left[b]).then(b.cmp(&a)))
    {
        let mut candidates: Vec<usize> = (0..n).filter(|&u| u != v && in_left[u] > 0).collect();
        candidates.sort_by(|&a, &b| {
            in_left[b]
                .cmp(&in_left[a])
                .then(out_left[b].cmp(&out_left[a]))
                .then(a.cmp(&b))
        });
        let k = out_left[v];
        if candidates.len() < k {
            return Err(Error::NonGraphical);
        }
        for &u in &candidates[..k] {
            arcs.push((v, u));
            in_left[u] -= 1;
        }
        out_left[v] = 0;
    }
    if in_left.iter().any(|&d| d > 0) {
        return Err(Error::NonGraphical);
    }
    Ok(arcs)
}

//! Finite simple graphs: k-cores, degeneracy, sampling from a graphon and the
//! embedding of a graph as a step graphon.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GraphonError, Result};
use crate::graphon::{Kernel, StepGraphon};

/// Largest node count accepted by [`brute_force_graph_degeneracy`].
pub const GRAPH_BRUTE_FORCE_LIMIT: usize = 16;

/// Simple undirected graph on nodes `0..n`. Edges are stored once, as
/// `(u, v)` with `u < v`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl FiniteGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphonError::BadEdge(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(GraphonError::BadEdge(format!("self-loop at node {u}")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphonError::BadEdge(format!(
                "edge ({}, {}) listed twice",
                w[0].0, w[0].1
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Ok(Self {
            n,
            edges: normalized,
            adjacency,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|v| (v - 1, v))).expect("path is simple")
    }

    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star is simple")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }
}

/// Nodes of the `k`-core: repeatedly drop nodes with fewer than `k`
/// neighbours among the survivors.
pub fn k_core(g: &FiniteGraph, k: usize) -> Vec<usize> {
    let n = g.node_count();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut queue: Vec<usize> = (0..n).filter(|&v| degree[v] < k).collect();
    for &v in &queue {
        alive[v] = false;
    }
    while let Some(v) = queue.pop() {
        for &u in g.neighbors(v) {
            if alive[u] {
                degree[u] -= 1;
                if degree[u] < k {
                    alive[u] = false;
                    queue.push(u);
                }
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphCoreResult {
    pub shells: Vec<usize>,
    pub degeneracy: usize,
}

impl GraphCoreResult {
    pub fn k_core_members(&self, k: usize) -> Vec<usize> {
        (0..self.shells.len()).filter(|&v| self.shells[v] >= k).collect()
    }
}

/// Shell indices by bucket-ordered min-degree peeling (Batagelj–Zaversnik).
pub fn graph_decompose(g: &FiniteGraph) -> GraphCoreResult {
    let n = g.node_count();
    if n == 0 {
        return GraphCoreResult {
            shells: Vec::new(),
            degeneracy: 0,
        };
    }
    let max_degree = g.max_degree();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();

    // bin[d] = start of the run of nodes with current degree d in `order`
    let mut bin = vec![0usize; max_degree + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for count in bin.iter_mut() {
        let c = *count;
        *count = start;
        start += c;
    }
    let mut order = vec![0usize; n];
    let mut position = vec![0usize; n];
    {
        let mut next = bin.clone();
        for v in 0..n {
            position[v] = next[degree[v]];
            order[position[v]] = v;
            next[degree[v]] += 1;
        }
    }

    for i in 0..n {
        let v = order[i];
        for &u in g.neighbors(v) {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = position[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    position[u] = pw;
                    position[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }

    let degeneracy = degree.iter().copied().max().unwrap_or(0);
    GraphCoreResult {
        shells: degree,
        degeneracy,
    }
}

/// Max over nonempty node subsets of the minimum induced degree.
pub fn brute_force_graph_degeneracy(g: &FiniteGraph) -> Result<usize> {
    let n = g.node_count();
    if n > GRAPH_BRUTE_FORCE_LIMIT {
        return Err(GraphonError::TooManyBlocks {
            blocks: n,
            limit: GRAPH_BRUTE_FORCE_LIMIT,
        });
    }
    let masks: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut best = 0;
    for subset in 1u32..(1u32 << n) {
        let min_degree = (0..n)
            .filter(|v| subset >> v & 1 == 1)
            .map(|v| (masks[v] & subset).count_ones() as usize)
            .min()
            .unwrap_or(0);
        best = best.max(min_degree);
    }
    Ok(best)
}

/// The degeneracy/edge-count sandwich
/// `C(δ+1, 2) ≤ |E| ≤ C(δ+1, 2) + (n - δ - 1) δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KwprReport {
    pub nodes: usize,
    pub degeneracy: usize,
    pub lower: u64,
    pub edges: u64,
    pub upper: u64,
    pub holds: bool,
}

impl fmt::Display for KwprReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ≤ {} ≤ {} {}",
            self.lower,
            self.edges,
            self.upper,
            if self.holds { "OK" } else { "VIOLATED" }
        )
    }
}

pub fn check_kwpr(g: &FiniteGraph) -> KwprReport {
    let n = g.node_count() as u64;
    let d = graph_decompose(g).degeneracy as u64;
    let lower = d * (d + 1) / 2;
    let upper = lower + n.saturating_sub(d + 1) * d;
    let edges = g.edge_count() as u64;
    KwprReport {
        nodes: g.node_count(),
        degeneracy: d as usize,
        lower,
        edges,
        upper,
        holds: lower <= edges && edges <= upper,
    }
}

/// W-random graph on `n` nodes. Uses ChaCha8 seeded from `seed`; the
/// stream is consumed as `x_1..x_n` first, then one uniform per pair
/// `(i, j)`, `i < j`, in lexicographic order. A pair becomes an edge when
/// its uniform is below `w(x_i, x_j)`.
pub fn sample_graph(w: &impl Kernel, n: usize, seed: u64) -> FiniteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.gen();
            if u < w.value(xs[i], xs[j]) {
                edges.push((i, j));
            }
        }
    }
    FiniteGraph::new(n, edges).expect("sampled pairs are simple")
}

/// The adjacency matrix as a step graphon on `n` equal blocks, with zero
/// diagonal blocks.
pub fn graph_to_graphon(g: &FiniteGraph) -> Result<StepGraphon> {
    let n = g.node_count();
    if n == 0 {
        return Err(GraphonError::BadParameter("graph has no nodes".into()));
    }
    let mut values = vec![vec![0.0; n]; n];
    for &(u, v) in g.edges() {
        values[u][v] = 1.0;
        values[v][u] = 1.0;
    }
    StepGraphon::uniform(values)
}

pub fn parse_edge_list(text: &str) -> Result<FiniteGraph> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| GraphonError::Parse("edge list is empty".into()))?;
    let pair = |line: &str, what: &str| -> Result<(usize, usize)> {
        let mut it = line.split_whitespace();
        let mut next = || -> Result<usize> {
            it.next()
                .ok_or_else(|| GraphonError::Parse(format!("{what} '{line}' needs two integers")))?
                .parse()
                .map_err(|_| GraphonError::Parse(format!("{what} '{line}' needs two integers")))
        };
        let a = next()?;
        let b = next()?;
        Ok((a, b))
    };
    let (n, m) = pair(header, "header")?;
    let edges = lines.map(|l| pair(l, "edge")).collect::<Result<Vec<_>>>()?;
    if edges.len() != m {
        return Err(GraphonError::Parse(format!(
            "header announces {m} edges but {} were listed",
            edges.len()
        )));
    }
    FiniteGraph::new(n, edges)
}

pub fn to_edge_list(g: &FiniteGraph) -> String {
    let mut out = format!("{} {}\n", g.node_count(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

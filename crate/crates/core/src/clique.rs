//! Maximum-weight clique solvers over an abstract vertex-weighted graph.
//!
//! [`max_weight_clique_exact`] is a branch and bound over bitset candidate
//! sets. Each node orders its candidates by a greedy partition into
//! independent sets; a clique uses at most one vertex per set, so the sum of
//! per-set maximum weights bounds what the subtree can still add. The plain
//! sum of candidate weights is kept as a second bound and the smaller of the
//! two prunes.
//!
//! [`max_weight_clique_greedy`] repeatedly takes the candidate maximizing
//! `w(v) * (1 + weight of its neighbors among the candidates)` and shrinks
//! the candidates to its neighborhood. It runs in time quadratic in the
//! vertex count.

use std::fmt::Write as _;

use crate::error::{check_index, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitMatrix {
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self {
            words,
            bits: vec![0; words * n],
        }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }
}

fn first_bit(set: &[u64]) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn clear_bit(set: &mut [u64], i: usize) {
    set[i / 64] &= !(1 << (i % 64));
}

fn for_each_bit(set: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &word) in set.iter().enumerate() {
        let mut w = word;
        while w != 0 {
            f(wi * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

/// Undirected graph with strictly positive vertex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    weight: Vec<f64>,
    adj: BitMatrix,
    edges: usize,
}

impl WeightedGraph {
    /// Edgeless graph with the given vertex weights.
    pub fn new(weight: Vec<f64>) -> Result<Self> {
        if let Some((i, w)) = weight.iter().enumerate().find(|(_, w)| !w.is_finite() || **w <= 0.0) {
            return Err(Error::Domain(format!("vertex {i} has non-positive weight {w}")));
        }
        let n = weight.len();
        Ok(Self {
            weight,
            adj: BitMatrix::new(n),
            edges: 0,
        })
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        check_index("vertex", i, self.n())?;
        check_index("vertex", j, self.n())?;
        if i == j {
            return Err(Error::ContractViolation(format!("self-loop on vertex {i}")));
        }
        if !self.adj.get(i, j) {
            self.adj.set(i, j);
            self.adj.set(j, i);
            self.edges += 1;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.weight.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weight[v]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adj.get(i, j)
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for_each_bit(self.adj.row(v), |u| out.push(u));
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.neighbors(i)
                .into_iter()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// DIMACS-style text: `p edge n m`, one `e i j` per edge and one
    /// `w i weight` per vertex, all 1-based. `comments` become `c` lines.
    pub fn to_dimacs(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "c {c}");
        }
        let _ = writeln!(out, "p edge {} {}", self.n(), self.edges);
        for (i, w) in self.weight.iter().enumerate() {
            let _ = writeln!(out, "w {} {}", i + 1, w);
        }
        for (i, j) in self.edges() {
            let _ = writeln!(out, "e {} {}", i + 1, j + 1);
        }
        out
    }

    /// Parses the format written by [`WeightedGraph::to_dimacs`]. Vertex
    /// weight lines may start with `w` or `n`; unweighted vertices get 1.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut graph: Option<WeightedGraph> = None;
        let mut weights: Vec<(usize, usize, f64)> = Vec::new();
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line_no = ln + 1;
            let parse_err = |msg: &str| Error::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            let mut tok = line.split_whitespace();
            match tok.next() {
                None | Some("c") => continue,
                Some("p") => {
                    if graph.is_some() {
                        return Err(parse_err("duplicate problem line"));
                    }
                    let kind = tok.next().ok_or_else(|| parse_err("missing problem kind"))?;
                    if kind != "edge" && kind != "col" {
                        return Err(parse_err("expected `p edge <n> <m>`"));
                    }
                    let n: usize = tok
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_err("bad vertex count"))?;
                    graph = Some(WeightedGraph::new(vec![1.0; n])?);
                }
                Some(kind @ ("e" | "w" | "n")) => {
                    let a: usize = tok
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_err("bad vertex index"))?;
                    if kind == "e" {
                        let b: usize = tok
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| parse_err("bad vertex index"))?;
                        edges.push((line_no, a, b));
                    } else {
                        let w: f64 = tok
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| parse_err("bad weight"))?;
                        weights.push((line_no, a, w));
                    }
                }
                Some(other) => return Err(parse_err(&format!("unknown line kind `{other}`"))),
            }
        }
        let mut graph = graph.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `p edge` line".into(),
        })?;
        let n = graph.n();
        for (line, v, w) in weights {
            if v == 0 || v > n {
                return Err(Error::Parse {
                    line,
                    msg: format!("vertex {v} out of range 1..={n}"),
                });
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Parse {
                    line,
                    msg: format!("non-positive weight {w}"),
                });
            }
            graph.weight[v - 1] = w;
        }
        for (line, a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n || a == b {
                return Err(Error::Parse {
                    line,
                    msg: format!("invalid edge {a} {b}"),
                });
            }
            graph.add_edge(a - 1, b - 1)?;
        }
        Ok(graph)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliqueResult {
    /// Sorted vertex ids.
    pub members: Vec<usize>,
    pub total_weight: f64,
}

impl CliqueResult {
    pub fn empty() -> Self {
        Self {
            members: Vec::new(),
            total_weight: 0.0,
        }
    }

    pub(crate) fn from_members(g: &WeightedGraph, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        let total_weight = members.iter().map(|&v| g.weight(v)).fold(0.0, |acc, w| acc + w);
        Self { members, total_weight }
    }
}

pub fn is_clique(g: &WeightedGraph, s: &[usize]) -> Result<bool> {
    for &v in s {
        check_index("vertex", v, g.n())?;
    }
    for (i, &a) in s.iter().enumerate() {
        for &b in &s[i + 1..] {
            if a == b || !g.is_adjacent(a, b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff no vertex outside `s` is adjacent to every member of `s`.
pub fn is_maximal_clique(g: &WeightedGraph, s: &[usize]) -> Result<bool> {
    if !is_clique(g, s)? {
        return Ok(false);
    }
    Ok(!(0..g.n()).any(|v| !s.contains(&v) && s.iter().all(|&m| g.is_adjacent(v, m))))
}

pub fn max_weight_clique_greedy(g: &WeightedGraph) -> CliqueResult {
    let n = g.n();
    let mut cand: Vec<usize> = (0..n).collect();
    let mut nbr_weight: Vec<f64> = (0..n)
        .map(|v| {
            let mut s = 0.0;
            for_each_bit(g.adj.row(v), |u| s += g.weight(u));
            s
        })
        .collect();
    let mut members = Vec::new();
    while !cand.is_empty() {
        let mut best = cand[0];
        let mut best_score = f64::NEG_INFINITY;
        for &v in &cand {
            let score = g.weight(v) * (1.0 + nbr_weight[v]);
            if score > best_score {
                best = v;
                best_score = score;
            }
        }
        members.push(best);
        let (kept, removed): (Vec<usize>, Vec<usize>) = cand.iter().partition(|&&v| g.is_adjacent(best, v));
        for &x in &kept {
            for &r in &removed {
                if g.is_adjacent(x, r) {
                    nbr_weight[x] -= g.weight(r);
                }
            }
        }
        cand = kept;
    }
    CliqueResult::from_members(g, members)
}

/// Search statistics from the exact solver.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
}

pub fn max_weight_clique_exact(g: &WeightedGraph) -> CliqueResult {
    max_weight_clique_exact_with_stats(g).0
}

// Bounds are inflated by this factor before comparison so rounding in the
// bound can never prune a strictly heavier clique.
const BOUND_SLACK: f64 = 1.0 + 1e-12;

pub fn max_weight_clique_exact_with_stats(g: &WeightedGraph) -> (CliqueResult, SearchStats) {
    let n = g.n();
    if n == 0 {
        return (CliqueResult::empty(), SearchStats::default());
    }
    // Relabel so that bit order is weight-descending (ties: higher degree,
    // then lower id). Coloring then puts the heaviest vertex first in every
    // class.
    let mut perm: Vec<usize> = (0..n).collect();
    let degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    perm.sort_by(|&a, &b| {
        g.weight(b)
            .total_cmp(&g.weight(a))
            .then(degree[b].cmp(&degree[a]))
            .then(a.cmp(&b))
    });
    let mut local = BitMatrix::new(n);
    let mut inv = vec![0; n];
    for (pos, &v) in perm.iter().enumerate() {
        inv[v] = pos;
    }
    for (pos, &v) in perm.iter().enumerate() {
        for_each_bit(g.adj.row(v), |u| local.set(pos, inv[u]));
    }
    let weight: Vec<f64> = perm.iter().map(|&v| g.weight(v)).collect();

    let greedy = max_weight_clique_greedy(g);
    let mut search = Search {
        adj: &local,
        weight: &weight,
        best_weight: greedy.total_weight,
        best: greedy.members.iter().map(|&v| inv[v]).collect(),
        current: Vec::new(),
        stats: SearchStats::default(),
        scratch: Vec::new(),
    };
    let mut all = vec![0u64; local.words];
    for v in 0..n {
        all[v / 64] |= 1 << (v % 64);
    }
    search.expand(0.0, &mut all, 0);
    let members = search.best.iter().map(|&p| perm[p]).collect();
    let stats = search.stats;
    (CliqueResult::from_members(g, members), stats)
}

struct Search<'a> {
    adj: &'a BitMatrix,
    weight: &'a [f64],
    best_weight: f64,
    best: Vec<usize>,
    current: Vec<usize>,
    stats: SearchStats,
    // Per-depth buffers: (ordered candidates, bounds, child candidate set).
    scratch: Vec<(Vec<usize>, Vec<f64>, Vec<u64>)>,
}

impl Search<'_> {
    /// Greedy partition of `cand` into independent sets. Fills `order` with
    /// the vertices class by class and `bound[i]` with an upper bound on the
    /// weight of any clique inside `order[..=i]`.
    fn color_sort(&self, cand: &[u64], order: &mut Vec<usize>, bound: &mut Vec<f64>) {
        order.clear();
        bound.clear();
        let mut uncolored = cand.to_vec();
        let mut q = vec![0u64; cand.len()];
        let mut color_total = 0.0;
        let mut prefix_sum = 0.0;
        while let Some(first) = first_bit(&uncolored) {
            q.copy_from_slice(&uncolored);
            // Bit order is weight-descending, so the first vertex of every
            // class is its heaviest.
            color_total += self.weight[first];
            let mut next = Some(first);
            while let Some(v) = next {
                clear_bit(&mut uncolored, v);
                clear_bit(&mut q, v);
                for (qw, aw) in q.iter_mut().zip(self.adj.row(v)) {
                    *qw &= !aw;
                }
                prefix_sum += self.weight[v];
                order.push(v);
                bound.push(color_total.min(prefix_sum));
                next = first_bit(&q);
            }
        }
    }

    fn expand(&mut self, cw: f64, cand: &mut [u64], depth: usize) {
        self.stats.nodes += 1;
        if self.scratch.len() <= depth {
            self.scratch.push((Vec::new(), Vec::new(), vec![0; cand.len()]));
        }
        let (mut order, mut bound, mut child) = std::mem::take(&mut self.scratch[depth]);
        self.color_sort(cand, &mut order, &mut bound);
        for i in (0..order.len()).rev() {
            if (cw + bound[i]) * BOUND_SLACK <= self.best_weight {
                break;
            }
            let v = order[i];
            let w = cw + self.weight[v];
            let mut any = false;
            for ((c, a), out) in cand.iter().zip(self.adj.row(v)).zip(child.iter_mut()) {
                *out = c & a;
                any |= *out != 0;
            }
            self.current.push(v);
            if any {
                self.expand(w, &mut child, depth + 1);
            } else if w > self.best_weight {
                self.best_weight = w;
                self.best.clone_from(&self.current);
            }
            self.current.pop();
            clear_bit(cand, v);
        }
        self.scratch[depth] = (order, bound, child);
    }
}

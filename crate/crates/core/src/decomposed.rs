//! Exact maximum-weight clique search specialised to CRAN-IDNC graphs.
//!
//! Across RRBs two vertices are adjacent unless they target the same user
//! from different RRHs. A clique is therefore one clique per RRB subgraph,
//! chosen so that no user is served by two RRHs. Dropping that coupling lets
//! every RRB be solved on its own, which gives an upper bound. When the
//! relaxed optimum serves some user from several RRHs, the search branches
//! on the RRH that user may use.
//!
//! Per-RRB subproblems are small and repeat across branches, so they are
//! memoised on the set of users still allowed on that RRH.

use std::collections::HashMap;

use crate::clique::{max_weight_clique_exact, max_weight_clique_greedy, CliqueResult, WeightedGraph};
use crate::graph::CranGraph;

// Same role as the slack in the generic solver: rounding in a bound must
// never prune a strictly heavier clique.
const BOUND_SLACK: f64 = 1.0 + 1e-12;

type UserSet = Vec<u64>;

fn has(set: &[u64], u: usize) -> bool {
    set[u / 64] >> (u % 64) & 1 == 1
}

fn remove(set: &mut [u64], u: usize) {
    set[u / 64] &= !(1 << (u % 64));
}

#[derive(Debug, Clone)]
struct RrbChoice {
    weight: f64,
    members: Vec<usize>,
}

struct Relaxed {
    bound: f64,
    choices: Vec<RrbChoice>,
}

struct Search<'a> {
    g: &'a CranGraph,
    /// Vertex ids of each RRB, indexed `b * Z + z`.
    rrbs: Vec<Vec<usize>>,
    num_rrbs_per_rrh: usize,
    memo: HashMap<(usize, UserSet), RrbChoice>,
    best_weight: f64,
    best: Vec<usize>,
    nodes: u64,
}

/// Exact maximum-weight clique of `g`, or `None` when the cross-RRB edges of
/// `g` do not have the structure this search relies on.
pub fn max_weight_clique_decomposed(g: &CranGraph) -> Option<CliqueResult> {
    max_weight_clique_decomposed_with_nodes(g).map(|(c, _)| c)
}

/// As [`max_weight_clique_decomposed`], also returning the number of
/// branch-and-bound nodes visited.
pub fn max_weight_clique_decomposed_with_nodes(g: &CranGraph) -> Option<(CliqueResult, u64)> {
    if !has_cran_structure(g) {
        return None;
    }
    let dims = g.dims();
    let z_count = dims.num_rrbs_per_rrh;
    let mut rrbs = vec![Vec::new(); dims.total_rrbs()];
    for v in g.vertices() {
        rrbs[v.b * z_count + v.z].push(v.id);
    }
    let greedy = max_weight_clique_greedy(g.weighted());
    let mut search = Search {
        g,
        rrbs,
        num_rrbs_per_rrh: z_count,
        memo: HashMap::new(),
        best_weight: greedy.total_weight,
        best: greedy.members,
        nodes: 0,
    };
    let words = dims.num_users.div_ceil(64).max(1);
    let mut everyone = vec![0u64; words];
    for u in 0..dims.num_users {
        everyone[u / 64] |= 1 << (u % 64);
    }
    let allowed = vec![everyone; dims.num_rrhs];
    let root = search.relax(&allowed);
    search.branch(&allowed, root);
    let nodes = search.nodes;
    Some((CliqueResult::from_members(g.weighted(), search.best), nodes))
}

/// Checks that vertices in different RRBs are adjacent exactly when they
/// target different users or share the RRH.
fn has_cran_structure(g: &CranGraph) -> bool {
    let vs = g.vertices();
    vs.iter().enumerate().all(|(i, v)| {
        vs[i + 1..]
            .iter()
            .filter(|w| w.rrb() != v.rrb())
            .all(|w| g.is_adjacent(v.id, w.id) == (v.u != w.u || v.b == w.b))
    })
}

impl Search<'_> {
    fn rrb_best(&mut self, rrb: usize, allowed: &UserSet) -> RrbChoice {
        let key = (rrb, allowed.clone());
        if let Some(c) = self.memo.get(&key) {
            return c.clone();
        }
        let ids: Vec<usize> = self.rrbs[rrb]
            .iter()
            .copied()
            .filter(|&id| has(allowed, self.g.vertex(id).u))
            .collect();
        let choice = best_in_subgraph(self.g, &ids);
        self.memo.insert(key, choice.clone());
        choice
    }

    fn relax(&mut self, allowed: &[UserSet]) -> Relaxed {
        let choices: Vec<RrbChoice> = (0..self.rrbs.len())
            .map(|rrb| self.rrb_best(rrb, &allowed[rrb / self.num_rrbs_per_rrh]))
            .collect();
        let bound = choices.iter().map(|c| c.weight).fold(0.0, |acc, w| acc + w);
        Relaxed { bound, choices }
    }

    /// Lowest user served by more than one RRH in `r`, with those RRHs.
    fn conflict(&self, r: &Relaxed) -> Option<(usize, Vec<usize>)> {
        let mut rrhs_of: Vec<Vec<usize>> = vec![Vec::new(); self.g.dims().num_users];
        for (rrb, c) in r.choices.iter().enumerate() {
            let b = rrb / self.num_rrbs_per_rrh;
            for &id in &c.members {
                let u = self.g.vertex(id).u;
                if !rrhs_of[u].contains(&b) {
                    rrhs_of[u].push(b);
                }
            }
        }
        rrhs_of
            .into_iter()
            .enumerate()
            .find(|(_, bs)| bs.len() > 1)
            .map(|(u, mut bs)| {
                bs.sort_unstable();
                (u, bs)
            })
    }

    fn branch(&mut self, allowed: &[UserSet], r: Relaxed) {
        self.nodes += 1;
        if r.bound * BOUND_SLACK <= self.best_weight {
            return;
        }
        let Some((u, rrhs)) = self.conflict(&r) else {
            let members: Vec<usize> = r.choices.iter().flat_map(|c| c.members.iter().copied()).collect();
            let weight: f64 = members
                .iter()
                .map(|&v| self.g.weighted().weight(v))
                .fold(0.0, |acc, w| acc + w);
            if weight > self.best_weight {
                self.best_weight = weight;
                self.best = members;
            }
            return;
        };
        // Either `u` ends up on one of the conflicting RRHs (and nowhere
        // else), or on none of them.
        let mut children: Vec<(Vec<UserSet>, Relaxed)> = Vec::with_capacity(rrhs.len() + 1);
        for &keep in &rrhs {
            let mut a = allowed.to_vec();
            for (b, set) in a.iter_mut().enumerate() {
                if b != keep {
                    remove(set, u);
                }
            }
            let rx = self.relax(&a);
            children.push((a, rx));
        }
        let mut a = allowed.to_vec();
        for &b in &rrhs {
            remove(&mut a[b], u);
        }
        let rx = self.relax(&a);
        children.push((a, rx));
        // Stable sort keeps the RRH order among equal bounds.
        children.sort_by(|x, y| y.1.bound.total_cmp(&x.1.bound));
        for (a, rx) in children {
            self.branch(&a, rx);
        }
    }
}

/// Maximum-weight clique among `ids`, which all lie in one RRB. The
/// subgraph usually falls apart into one component per rate, and each
/// component is solved separately.
fn best_in_subgraph(g: &CranGraph, ids: &[usize]) -> RrbChoice {
    let n = ids.len();
    let mut component = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        component[start] = count;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if component[j] == usize::MAX && g.is_adjacent(ids[i], ids[j]) {
                    component[j] = count;
                    stack.push(j);
                }
            }
        }
        count += 1;
    }
    let mut best = RrbChoice {
        weight: 0.0,
        members: Vec::new(),
    };
    for c in 0..count {
        let local: Vec<usize> = (0..n).filter(|&i| component[i] == c).map(|i| ids[i]).collect();
        let result = if local.len() == 1 {
            CliqueResult::from_members(g.weighted(), local.clone())
        } else {
            let mut sub = WeightedGraph::new(local.iter().map(|&v| g.weighted().weight(v)).collect())
                .expect("weights come from a valid graph");
            for (i, &a) in local.iter().enumerate() {
                for (j, &b) in local.iter().enumerate().skip(i + 1) {
                    if g.is_adjacent(a, b) {
                        sub.add_edge(i, j).expect("indices in range");
                    }
                }
            }
            let r = max_weight_clique_exact(&sub);
            CliqueResult {
                members: r.members.iter().map(|&i| local[i]).collect(),
                total_weight: r.total_weight,
            }
        };
        if result.total_weight > best.weight {
            best = RrbChoice {
                weight: result.total_weight,
                members: result.members,
            };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{CapacityMatrix, NetworkDims};
    use crate::fixtures;
    use crate::graph::{build_graph, build_graph_with, GraphKind};
    use crate::sideinfo::SideInformation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(rng: &mut ChaCha8Rng) -> (CapacityMatrix, SideInformation, NetworkDims) {
        let dims = NetworkDims::new(
            rng.random_range(1..=3),
            rng.random_range(1..=2),
            rng.random_range(1..=5),
            rng.random_range(1..=4),
        )
        .unwrap();
        let caps = (0..dims.num_rrhs)
            .map(|_| {
                (0..dims.num_rrbs_per_rrh)
                    .map(|_| {
                        (0..dims.num_users)
                            .map(|_| rng.random_range(0..=6) as f64 / 2.0)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let cm = CapacityMatrix::from_nested(dims, caps).unwrap();
        let mut has = Vec::new();
        let mut wants = Vec::new();
        for _ in 0..dims.num_users {
            let mut h = Vec::new();
            let mut w = Vec::new();
            for f in 0..dims.num_files {
                match rng.random_range(0..3) {
                    0 => h.push(f),
                    1 => w.push(f),
                    _ => {}
                }
            }
            has.push(h);
            wants.push(w);
        }
        let has: Vec<&[usize]> = has.iter().map(Vec::as_slice).collect();
        let wants: Vec<&[usize]> = wants.iter().map(Vec::as_slice).collect();
        let si = SideInformation::from_lists(dims.num_files, &has, &wants).unwrap();
        (cm, si, dims)
    }

    #[test]
    fn golden_figures() {
        let i = fixtures::fig4();
        let g = build_graph(&i.capacities, &i.side_info, i.dims).unwrap();
        assert_eq!(max_weight_clique_decomposed(&g).unwrap().total_weight, 7.0);
        let i = fixtures::fig3();
        let g = build_graph(&i.capacities, &i.side_info, i.dims).unwrap();
        assert_eq!(max_weight_clique_decomposed(&g).unwrap().total_weight, 3.0);
    }

    #[test]
    fn empty_graph() {
        let dims = NetworkDims::new(2, 2, 2, 2).unwrap();
        let cm = CapacityMatrix::uniform(dims, 1.0).unwrap();
        let si = SideInformation::from_lists(2, &[&[], &[]], &[&[], &[]]).unwrap();
        let g = build_graph(&cm, &si, dims).unwrap();
        let c = max_weight_clique_decomposed(&g).unwrap();
        assert!(c.members.is_empty());
        assert_eq!(c.total_weight, 0.0);
    }

    #[test]
    fn matches_generic_solver_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let (cm, si, dims) = random_instance(&mut rng);
            for kind in [GraphKind::RateAware, GraphKind::RateFree, GraphKind::Uncoded] {
                let g = build_graph_with(kind, &cm, &si, dims).unwrap();
                let d = max_weight_clique_decomposed(&g).unwrap();
                let e = max_weight_clique_exact(g.weighted());
                assert_eq!(d.total_weight, e.total_weight, "{kind:?}");
                assert!(crate::clique::is_clique(g.weighted(), &d.members).unwrap());
            }
        }
    }

    #[test]
    fn rejects_graphs_without_the_structure() {
        let dims = NetworkDims::new(2, 1, 2, 1).unwrap();
        let cm = CapacityMatrix::uniform(dims, 1.0).unwrap();
        let si = SideInformation::from_lists(1, &[&[], &[]], &[&[0], &[0]]).unwrap();
        let g = build_graph(&cm, &si, dims).unwrap();
        assert!(max_weight_clique_decomposed(&g).is_some());
        let mut broken = g.clone();
        let (a, b) = (0..g.len())
            .flat_map(|i| (0..g.len()).map(move |j| (i, j)))
            .find(|&(i, j)| g.vertex(i).rrb() != g.vertex(j).rrb() && !g.is_adjacent(i, j))
            .unwrap();
        broken.add_edge_for_tests(a, b);
        assert!(max_weight_clique_decomposed(&broken).is_none());
    }
}

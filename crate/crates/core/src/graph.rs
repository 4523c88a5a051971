//! The CRAN-IDNC conflict graph.
//!
//! One vertex per (RRH, RRB, user, wanted file, rate) association. Vertices
//! of the same RRB are joined when they can share one XOR combination at one
//! rate; vertices of different RRBs are joined when serving both keeps every
//! user on a single RRH. A vertex weighs its rate, so a maximum-weight
//! clique is a throughput-optimal schedule.

use crate::channel::{CapacityMatrix, NetworkDims};
use crate::clique::WeightedGraph;
use crate::error::{Error, Result};
use crate::sideinfo::SideInformation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub id: usize,
    pub b: usize,
    pub z: usize,
    pub u: usize,
    pub f: usize,
    pub r: f64,
}

impl Vertex {
    pub fn rrb(&self) -> (usize, usize) {
        (self.b, self.z)
    }
}

/// Which variant of the graph to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    /// Full graph: candidate rates per vertex, LC1 and LC2 inside an RRB,
    /// weight = rate.
    RateAware,
    /// One vertex per (b, z, u, f) with `r` set to the user's own capacity.
    /// Inside an RRB only LC1 applies; every weight is 1.
    RateFree,
    /// One vertex per (b, z, u, f) at the user's own capacity and no edges
    /// inside an RRB, so at most one user per RRB. Weight = rate.
    Uncoded,
}

#[derive(Debug, Clone)]
pub struct CranGraph {
    dims: NetworkDims,
    kind: GraphKind,
    vertices: Vec<Vertex>,
    graph: WeightedGraph,
}

impl CranGraph {
    pub fn dims(&self) -> NetworkDims {
        self.dims
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> &Vertex {
        &self.vertices[id]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn weighted(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.graph.is_adjacent(a, b)
    }

    #[cfg(test)]
    pub(crate) fn add_edge_for_tests(&mut self, a: usize, b: usize) {
        self.graph.add_edge(a, b).unwrap();
    }

    /// Id of the vertex with exactly these coordinates, if generated.
    pub fn find(&self, b: usize, z: usize, u: usize, f: usize, r: f64) -> Option<usize> {
        self.vertices
            .iter()
            .find(|v| v.b == b && v.z == z && v.u == u && v.f == f && v.r == r)
            .map(|v| v.id)
    }

    /// Debug export: the DIMACS-like edge list with one comment line per
    /// vertex (`c v <id> <b> <z> <u> <f> <r>`, ids 1-based, coordinates
    /// 0-based).
    pub fn to_dimacs(&self) -> String {
        let mut comments = vec![format!(
            "cran-idnc graph kind={:?} rrhs={} rrbs={} users={} files={}",
            self.kind, self.dims.num_rrhs, self.dims.num_rrbs_per_rrh, self.dims.num_users, self.dims.num_files
        )];
        comments.extend(
            self.vertices
                .iter()
                .map(|v| format!("v {} {} {} {} {} {}", v.id + 1, v.b, v.z, v.u, v.f, v.r)),
        );
        self.graph.to_dimacs(&comments)
    }
}

/// Rates at which user `u` may be targeted on RRB `(b, z)`: the distinct
/// positive capacities of all users on that RRB that do not exceed `u`'s own.
/// Sorted ascending.
pub fn candidate_rates(b: usize, z: usize, u: usize, cm: &CapacityMatrix) -> Result<Vec<f64>> {
    let own = cm.try_rate(b, z, u)?;
    let mut rates: Vec<f64> = cm
        .column(b, z)
        .iter()
        .copied()
        .filter(|&r| r > 0.0 && r <= own)
        .collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    Ok(rates)
}

fn lc1(v: &Vertex, v2: &Vertex, si: &SideInformation) -> bool {
    v.f == v2.f || (si.user_has(v2.u, v.f) && si.user_has(v.u, v2.f))
}

/// Adjacency inside one RRB: LC1 (shared file, or each user holds the
/// other's file) and LC2 (equal rates).
pub fn lc_adjacent(v: &Vertex, v2: &Vertex, si: &SideInformation) -> Result<bool> {
    if v.rrb() != v2.rrb() {
        return Err(Error::ContractViolation(format!(
            "local conditions apply within one RRB; got vertices {} and {} on different RRBs",
            v.id, v2.id
        )));
    }
    if v.id == v2.id {
        return Err(Error::ContractViolation(format!("vertex {} paired with itself", v.id)));
    }
    Ok(lc1(v, v2, si) && v.r == v2.r)
}

/// Adjacency across RRBs: GC1 ∨ GC2 ∨ GC3.
pub fn gc_adjacent(v: &Vertex, v2: &Vertex, si: &SideInformation) -> Result<bool> {
    if v.rrb() == v2.rrb() {
        return Err(Error::ContractViolation(format!(
            "general conditions apply across RRBs; vertices {} and {} share RRB {:?}",
            v.id,
            v2.id,
            v.rrb()
        )));
    }
    let gc1 = v.u == v2.u && v.b == v2.b;
    let gc2 = v.b == v2.b && lc1(v, v2, si);
    // RRBs already differ here.
    let gc3 = v.u != v2.u;
    Ok(gc1 || gc2 || gc3)
}

pub fn build_graph(cm: &CapacityMatrix, si: &SideInformation, dims: NetworkDims) -> Result<CranGraph> {
    build_graph_with(GraphKind::RateAware, cm, si, dims)
}

pub fn build_graph_with(
    kind: GraphKind,
    cm: &CapacityMatrix,
    si: &SideInformation,
    dims: NetworkDims,
) -> Result<CranGraph> {
    dims.validate()?;
    if cm.dims() != dims {
        return Err(Error::MissingData("capacity matrix does not match dimensions".into()));
    }
    if si.num_users() != dims.num_users || si.num_files() != dims.num_files {
        return Err(Error::MissingData(format!(
            "side information covers {} users / {} files, expected {} / {}",
            si.num_users(),
            si.num_files(),
            dims.num_users,
            dims.num_files
        )));
    }

    let mut vertices = Vec::new();
    for b in 0..dims.num_rrhs {
        for z in 0..dims.num_rrbs_per_rrh {
            for u in 0..dims.num_users {
                let rates = match kind {
                    GraphKind::RateAware => candidate_rates(b, z, u, cm)?,
                    GraphKind::RateFree | GraphKind::Uncoded => {
                        let own = cm.rate(b, z, u);
                        if own > 0.0 {
                            vec![own]
                        } else {
                            Vec::new()
                        }
                    }
                };
                for &f in si.wants(u) {
                    for &r in &rates {
                        vertices.push(Vertex {
                            id: vertices.len(),
                            b,
                            z,
                            u,
                            f,
                            r,
                        });
                    }
                }
            }
        }
    }

    let weights = vertices
        .iter()
        .map(|v| match kind {
            GraphKind::RateFree => 1.0,
            _ => v.r,
        })
        .collect();
    let mut graph = WeightedGraph::new(weights)?;
    for (i, v) in vertices.iter().enumerate() {
        for v2 in &vertices[i + 1..] {
            let adjacent = if v.rrb() == v2.rrb() {
                match kind {
                    GraphKind::RateAware => lc_adjacent(v, v2, si)?,
                    GraphKind::RateFree => lc1(v, v2, si),
                    GraphKind::Uncoded => false,
                }
            } else {
                gc_adjacent(v, v2, si)?
            };
            if adjacent {
                graph.add_edge(v.id, v2.id)?;
            }
        }
    }
    Ok(CranGraph {
        dims,
        kind,
        vertices,
        graph,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::is_clique;
    use crate::fixtures;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vtx(id: usize, b: usize, z: usize, u: usize, f: usize, r: f64) -> Vertex {
        Vertex { id, b, z, u, f, r }
    }

    #[test]
    fn candidate_rates_single_user() {
        let dims = NetworkDims::new(1, 1, 1, 1).unwrap();
        let cm = CapacityMatrix::uniform(dims, 2.5).unwrap();
        assert_eq!(candidate_rates(0, 0, 0, &cm).unwrap(), vec![2.5]);
        let zero = CapacityMatrix::uniform(dims, 0.0).unwrap();
        assert!(candidate_rates(0, 0, 0, &zero).unwrap().is_empty());
        assert!(candidate_rates(1, 0, 0, &cm).is_err());
    }

    #[test]
    fn candidate_rates_unit_instance() {
        let inst = fixtures::fig3();
        for b in 0..2 {
            for u in 0..3 {
                assert_eq!(candidate_rates(b, 0, u, &inst.capacities).unwrap(), vec![1.0]);
            }
        }
    }

    #[test]
    fn candidate_rates_filters_column() {
        let inst = fixtures::fig4();
        // RRB (0,0) capacities are 1, 3, 2 for users 0, 1, 2.
        assert_eq!(candidate_rates(0, 0, 0, &inst.capacities).unwrap(), vec![1.0]);
        assert_eq!(candidate_rates(0, 0, 1, &inst.capacities).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(candidate_rates(0, 0, 2, &inst.capacities).unwrap(), vec![1.0, 2.0]);
        assert_eq!(candidate_rates(1, 0, 1, &inst.capacities).unwrap(), vec![1.0]);
    }

    #[test]
    fn lc_cases() {
        let si = fixtures::fig3().side_info;
        // Users 0 and 1 hold each other's wanted file.
        assert!(lc_adjacent(&vtx(0, 0, 0, 0, 0, 1.0), &vtx(1, 0, 0, 1, 1, 1.0), &si).unwrap());
        assert!(!lc_adjacent(&vtx(0, 0, 0, 0, 0, 1.0), &vtx(1, 0, 0, 1, 1, 2.0), &si).unwrap());
        assert!(!lc_adjacent(&vtx(0, 0, 0, 0, 0, 1.0), &vtx(1, 0, 0, 2, 2, 1.0), &si).unwrap());
        // Same file, same rate.
        let si2 = SideInformation::from_lists(2, &[&[], &[]], &[&[0], &[0]]).unwrap();
        assert!(lc_adjacent(&vtx(0, 0, 0, 0, 0, 1.0), &vtx(1, 0, 0, 1, 0, 1.0), &si2).unwrap());
        assert!(lc_adjacent(&vtx(0, 0, 0, 0, 0, 1.0), &vtx(1, 0, 1, 1, 0, 1.0), &si2).is_err());
        assert!(lc_adjacent(&vtx(0, 0, 0, 0, 0, 1.0), &vtx(0, 0, 0, 0, 0, 1.0), &si2).is_err());
    }

    #[test]
    fn gc_cases() {
        let si = SideInformation::from_lists(3, &[&[], &[], &[]], &[&[0], &[1], &[2]]).unwrap();
        // GC1: same user, same RRH, two RRBs.
        assert!(gc_adjacent(&vtx(0, 0, 0, 0, 0, 1.0), &vtx(1, 0, 1, 0, 0, 1.0), &si).unwrap());
        // Same user on two RRHs: never.
        assert!(!gc_adjacent(&vtx(0, 0, 0, 0, 0, 1.0), &vtx(1, 1, 0, 0, 0, 1.0), &si).unwrap());
        // GC3: different users, different RRBs.
        assert!(gc_adjacent(&vtx(0, 0, 0, 0, 0, 1.0), &vtx(1, 1, 0, 2, 2, 2.0), &si).unwrap());
        assert!(gc_adjacent(&vtx(0, 0, 0, 0, 0, 1.0), &vtx(1, 0, 0, 2, 2, 2.0), &si).is_err());
    }

    #[test]
    fn empty_wants_gives_empty_graph() {
        let dims = NetworkDims::new(2, 2, 3, 2).unwrap();
        let cm = CapacityMatrix::uniform(dims, 1.0).unwrap();
        let si = SideInformation::new(2, vec![Default::default(); 3], vec![Default::default(); 3]).unwrap();
        let g = build_graph(&cm, &si, dims).unwrap();
        assert!(g.is_empty());
        assert_eq!(g.weighted().edge_count(), 0);
    }

    #[test]
    fn fig4_listed_vertices_exist() {
        let inst = fixtures::fig4();
        let g = build_graph(&inst.capacities, &inst.side_info, inst.dims).unwrap();
        for label in fixtures::FIG4_CLIQUES.iter().flat_map(|c| c.iter()) {
            let (b, z, u, f, r) = fixtures::decode_label(label);
            assert!(g.find(b, z, u, f, r).is_some(), "missing vertex {label}");
        }
        for v in g.vertices() {
            assert_eq!(g.weighted().weight(v.id), v.r);
            assert!(inst.side_info.user_wants(v.u, v.f));
            assert!(v.r > 0.0 && v.r <= inst.capacities.rate(v.b, v.z, v.u));
        }
        let clique: Vec<usize> = ["11223", "21112", "21332"]
            .iter()
            .map(|l| {
                let (b, z, u, f, r) = fixtures::decode_label(l);
                g.find(b, z, u, f, r).unwrap()
            })
            .collect();
        assert!(is_clique(g.weighted(), &clique).unwrap());
    }

    #[test]
    fn vertex_order_is_lexicographic() {
        let inst = fixtures::fig4();
        let g = build_graph(&inst.capacities, &inst.side_info, inst.dims).unwrap();
        for w in g.vertices().windows(2) {
            let key = |v: &Vertex| (v.b, v.z, v.u, v.f);
            assert!(key(&w[0]) < key(&w[1]) || (key(&w[0]) == key(&w[1]) && w[0].r < w[1].r));
        }
    }

    #[test]
    fn dump_parses_back() {
        let inst = fixtures::fig4();
        let g = build_graph(&inst.capacities, &inst.side_info, inst.dims).unwrap();
        let text = g.to_dimacs();
        assert!(text.contains(&format!("p edge {} {}", g.len(), g.weighted().edge_count())));
        assert_eq!(&WeightedGraph::from_dimacs(&text).unwrap(), g.weighted());
    }

    fn random_instance(rng: &mut ChaCha8Rng) -> (CapacityMatrix, SideInformation, NetworkDims) {
        let dims = NetworkDims::new(
            rng.random_range(1..=3),
            rng.random_range(1..=2),
            rng.random_range(1..=4),
            rng.random_range(1..=4),
        )
        .unwrap();
        let caps = (0..dims.num_rrhs)
            .map(|_| {
                (0..dims.num_rrbs_per_rrh)
                    .map(|_| (0..dims.num_users).map(|_| rng.random_range(0..=4) as f64).collect())
                    .collect()
            })
            .collect();
        let mut has = vec![Vec::new(); dims.num_users];
        let mut wants = vec![Vec::new(); dims.num_users];
        for u in 0..dims.num_users {
            for f in 0..dims.num_files {
                match rng.random_range(0..3) {
                    0 => has[u].push(f),
                    1 => wants[u].push(f),
                    _ => {}
                }
            }
        }
        let has: Vec<&[usize]> = has.iter().map(Vec::as_slice).collect();
        let wants: Vec<&[usize]> = wants.iter().map(Vec::as_slice).collect();
        (
            CapacityMatrix::from_nested(dims, caps).unwrap(),
            SideInformation::from_lists(dims.num_files, &has, &wants).unwrap(),
            dims,
        )
    }

    #[test]
    fn random_graphs_match_pairwise_predicates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (cm, si, dims) = random_instance(&mut rng);
            let g = build_graph(&cm, &si, dims).unwrap();
            for v in g.vertices() {
                let rates = candidate_rates(v.b, v.z, v.u, &cm).unwrap();
                assert!(rates.contains(&v.r) && si.user_wants(v.u, v.f));
            }
            for (i, v) in g.vertices().iter().enumerate() {
                for w in &g.vertices()[i + 1..] {
                    let expected = if v.rrb() == w.rrb() {
                        lc_adjacent(v, w, &si).unwrap()
                    } else {
                        gc_adjacent(v, w, &si).unwrap()
                    };
                    assert_eq!(g.is_adjacent(v.id, w.id), expected);
                    // One RRH per user, enforced by the edges themselves.
                    if v.u == w.u && v.b != w.b {
                        assert!(!g.is_adjacent(v.id, w.id));
                    }
                    // Within an RRB, a user decodes at most one file.
                    if v.u == w.u && v.rrb() == w.rrb() {
                        assert!(!g.is_adjacent(v.id, w.id));
                    }
                }
            }
        }
    }
}

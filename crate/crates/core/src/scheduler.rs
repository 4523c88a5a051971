//! Schedules, their feasibility check, throughput accounting, the
//! clique-based proposed scheme and an exhaustive reference solver for tiny
//! instances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::channel::CapacityMatrix;
use crate::clique::{is_clique, max_weight_clique_exact, max_weight_clique_greedy, CliqueResult};
use crate::decomposed::max_weight_clique_decomposed;
use crate::error::{Error, Result};
use crate::graph::{build_graph, CranGraph};
use crate::instance::Instance;
use crate::sideinfo::{decoded_file, is_instantly_decodable, EncodedFile, FileSet, SideInformation};

/// What one RRB transmits.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub kappa: EncodedFile,
    /// Transmission rate in bits/s/Hz.
    pub rate: f64,
    pub targeted: BTreeSet<usize>,
}

/// Per-RRB transmissions keyed by `(b, z)`. Idle RRBs are absent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schedule {
    pub entries: BTreeMap<(usize, usize), ScheduleEntry>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, b: usize, z: usize, entry: ScheduleEntry) -> Option<ScheduleEntry> {
        self.entries.insert((b, z), entry)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Number of (user, RRB) deliveries.
    pub fn deliveries(&self) -> usize {
        self.entries.values().map(|e| e.targeted.len()).sum()
    }

    /// Line format: `b z rate f,f,... u,u,...`, 0-based indices, one line
    /// per entry in `(b, z)` order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ((b, z), e) in &self.entries {
            let users: Vec<String> = e.targeted.iter().map(|u| u.to_string()).collect();
            let _ = writeln!(out, "{b} {z} {} {} {}", e.rate, e.kappa, users.join(","));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut s = Schedule::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok.len() != 5 {
                return Err(err(format!("expected 5 fields, found {}", tok.len())));
            }
            let b = tok[0].parse().map_err(|_| err(format!("bad rrh `{}`", tok[0])))?;
            let z = tok[1].parse().map_err(|_| err(format!("bad rrb `{}`", tok[1])))?;
            let rate = tok[2].parse().map_err(|_| err(format!("bad rate `{}`", tok[2])))?;
            let list = |t: &str| -> Result<BTreeSet<usize>> {
                t.split(',')
                    .map(|x| x.parse().map_err(|_| err(format!("bad index `{x}`"))))
                    .collect()
            };
            let kappa = EncodedFile::new(list(tok[3])?).map_err(|e| err(e.to_string()))?;
            let targeted = list(tok[4])?;
            if s.insert(b, z, ScheduleEntry { kappa, rate, targeted }).is_some() {
                return Err(err(format!("duplicate entry for rrb ({b}, {z})")));
            }
        }
        Ok(s)
    }
}

/// Objective value: Σ over entries of |targeted| × rate. Terms are summed in
/// ascending order so that equal multisets of terms give bit-identical sums.
pub fn sum_rate(s: &Schedule) -> f64 {
    let mut terms: Vec<f64> = s.entries.values().map(|e| e.targeted.len() as f64 * e.rate).collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().fold(0.0, |acc, t| acc + t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    /// Σ |targeted| × rate, bits/s/Hz.
    pub sum_rate: f64,
    /// Bits delivered in the frame: N per (user, RRB) delivery.
    pub delivered_bits: f64,
    /// Spectral efficiency delivered to each user.
    pub per_user: Vec<f64>,
}

impl ThroughputReport {
    pub fn new(s: &Schedule, num_users: usize, file_size_bits: f64) -> Self {
        let mut per_user = vec![0.0; num_users];
        for e in s.entries.values() {
            for &u in &e.targeted {
                if let Some(slot) = per_user.get_mut(u) {
                    *slot += e.rate;
                }
            }
        }
        Self {
            sum_rate: sum_rate(s),
            delivered_bits: s.deliveries() as f64 * file_size_bits,
            per_user,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RrbOutOfRange {
        b: usize,
        z: usize,
    },
    UserOutOfRange {
        b: usize,
        z: usize,
        u: usize,
    },
    FileOutOfRange {
        b: usize,
        z: usize,
        f: usize,
    },
    NoTargetedUsers {
        b: usize,
        z: usize,
    },
    NonPositiveRate {
        b: usize,
        z: usize,
        rate: f64,
    },
    /// A user served from more than one RRH.
    MultipleRrhs {
        u: usize,
        rrhs: Vec<usize>,
    },
    RateAboveCapacity {
        b: usize,
        z: usize,
        u: usize,
        rate: f64,
        capacity: f64,
    },
    NotDecodable {
        b: usize,
        z: usize,
        u: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RrbOutOfRange { b, z } => write!(f, "rrb ({b}, {z}) out of range"),
            Self::UserOutOfRange { b, z, u } => write!(f, "rrb ({b}, {z}) targets unknown user {u}"),
            Self::FileOutOfRange { b, z, f: file } => write!(f, "rrb ({b}, {z}) encodes unknown file {file}"),
            Self::NoTargetedUsers { b, z } => write!(f, "rrb ({b}, {z}) targets nobody"),
            Self::NonPositiveRate { b, z, rate } => write!(f, "rrb ({b}, {z}) has rate {rate}"),
            Self::MultipleRrhs { u, rrhs } => write!(f, "user {u} served by rrhs {rrhs:?}"),
            Self::RateAboveCapacity {
                b,
                z,
                u,
                rate,
                capacity,
            } => {
                write!(f, "rrb ({b}, {z}) rate {rate} exceeds user {u} capacity {capacity}")
            }
            Self::NotDecodable { b, z, u } => write!(f, "rrb ({b}, {z}) combination not decodable by user {u}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationOptions {
    pub check_decodability: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            check_decodability: true,
        }
    }
}

/// Full feasibility check. An empty result means the schedule is feasible.
pub fn validate_schedule(s: &Schedule, cm: &CapacityMatrix, si: &SideInformation) -> Vec<Violation> {
    validate_schedule_with(s, cm, si, ValidationOptions::default())
}

pub fn validate_schedule_with(
    s: &Schedule,
    cm: &CapacityMatrix,
    si: &SideInformation,
    opts: ValidationOptions,
) -> Vec<Violation> {
    let dims = cm.dims();
    let mut out = Vec::new();
    let mut rrhs_of: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (&(b, z), e) in &s.entries {
        if b >= dims.num_rrhs || z >= dims.num_rrbs_per_rrh {
            out.push(Violation::RrbOutOfRange { b, z });
            continue;
        }
        if !e.rate.is_finite() || e.rate <= 0.0 {
            out.push(Violation::NonPositiveRate { b, z, rate: e.rate });
        }
        if e.targeted.is_empty() {
            out.push(Violation::NoTargetedUsers { b, z });
        }
        let mut files_ok = true;
        for &f in e.kappa.files() {
            if f >= dims.num_files {
                out.push(Violation::FileOutOfRange { b, z, f });
                files_ok = false;
            }
        }
        for &u in &e.targeted {
            if u >= dims.num_users || u >= si.num_users() {
                out.push(Violation::UserOutOfRange { b, z, u });
                continue;
            }
            rrhs_of.entry(u).or_default().insert(b);
            let capacity = cm.rate(b, z, u);
            if e.rate > capacity {
                out.push(Violation::RateAboveCapacity {
                    b,
                    z,
                    u,
                    rate: e.rate,
                    capacity,
                });
            }
            if opts.check_decodability && files_ok && !is_instantly_decodable(&e.kappa, u, si).unwrap_or(false) {
                out.push(Violation::NotDecodable { b, z, u });
            }
        }
    }
    for (u, rrhs) in rrhs_of {
        if rrhs.len() > 1 {
            out.push(Violation::MultipleRrhs {
                u,
                rrhs: rrhs.into_iter().collect(),
            });
        }
    }
    out
}

/// Reads the schedule encoded by a clique: per RRB, the XOR of the
/// members' files sent at their common rate to the members' users.
pub fn clique_to_schedule(c: &CliqueResult, g: &CranGraph) -> Result<Schedule> {
    if !is_clique(g.weighted(), &c.members)? {
        return Err(Error::ContractViolation("vertex set is not a clique".into()));
    }
    let mut per_rrb: BTreeMap<(usize, usize), (FileSet, BTreeSet<usize>, f64)> = BTreeMap::new();
    for &id in &c.members {
        let v = g.vertex(id);
        let slot = per_rrb
            .entry(v.rrb())
            .or_insert_with(|| (FileSet::new(), BTreeSet::new(), v.r));
        if slot.2 != v.r {
            return Err(Error::Inconsistent(format!(
                "rrb {:?} carries rates {} and {}",
                v.rrb(),
                slot.2,
                v.r
            )));
        }
        if !slot.1.insert(v.u) {
            return Err(Error::Inconsistent(format!(
                "user {} appears twice on rrb {:?}",
                v.u,
                v.rrb()
            )));
        }
        slot.0.insert(v.f);
    }
    let mut s = Schedule::new();
    for ((b, z), (files, targeted, rate)) in per_rrb {
        s.insert(
            b,
            z,
            ScheduleEntry {
                kappa: EncodedFile::new(files)?,
                rate,
                targeted,
            },
        );
    }
    Ok(s)
}

/// Inverse of [`clique_to_schedule`]: the vertices `(b, z, u, decoded file,
/// rate)` for every delivery, or `None` if some vertex was never generated.
pub fn schedule_to_vertices(s: &Schedule, g: &CranGraph, si: &SideInformation) -> Result<Option<Vec<usize>>> {
    let mut ids = Vec::new();
    for (&(b, z), e) in &s.entries {
        for &u in &e.targeted {
            let f = decoded_file(&e.kappa, u, si)?;
            match g.find(b, z, u, f, e.rate) {
                Some(id) => ids.push(id),
                None => return Ok(None),
            }
        }
    }
    ids.sort_unstable();
    Ok(Some(ids))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Solver {
    Exact,
    Greedy,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Greedy => "greedy",
        })
    }
}

pub const DEFAULT_VERTEX_BUDGET: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Exact,
    Greedy,
    /// Exact up to `vertex_budget` vertices, greedy above.
    Auto {
        vertex_budget: usize,
    },
}

impl Default for SolverChoice {
    fn default() -> Self {
        Self::Auto {
            vertex_budget: DEFAULT_VERTEX_BUDGET,
        }
    }
}

impl SolverChoice {
    pub fn resolve(self, num_vertices: usize) -> Solver {
        match self {
            Self::Exact => Solver::Exact,
            Self::Greedy => Solver::Greedy,
            Self::Auto { vertex_budget } if num_vertices <= vertex_budget => Solver::Exact,
            Self::Auto { .. } => Solver::Greedy,
        }
    }
}

pub fn solve_graph(g: &CranGraph, choice: SolverChoice) -> (CliqueResult, Solver) {
    let solver = choice.resolve(g.len());
    let c = match solver {
        Solver::Exact => max_weight_clique_decomposed(g).unwrap_or_else(|| max_weight_clique_exact(g.weighted())),
        Solver::Greedy => max_weight_clique_greedy(g.weighted()),
    };
    (c, solver)
}

/// A scheme's schedule together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub schedule: Schedule,
    pub report: ThroughputReport,
    pub solver: Option<Solver>,
    pub graph_vertices: usize,
}

pub fn propose_schedule(inst: &Instance, choice: SolverChoice) -> Result<(Schedule, ThroughputReport)> {
    let out = propose_schedule_detailed(inst, choice)?;
    Ok((out.schedule, out.report))
}

pub fn propose_schedule_detailed(inst: &Instance, choice: SolverChoice) -> Result<SchemeOutcome> {
    let g = build_graph(&inst.capacities, &inst.side_info, inst.dims)?;
    let (clique, solver) = solve_graph(&g, choice);
    let schedule = clique_to_schedule(&clique, &g)?;
    let violations = validate_schedule(&schedule, &inst.capacities, &inst.side_info);
    if !violations.is_empty() {
        return Err(Error::InvalidSchedule(violations));
    }
    let report = ThroughputReport::new(&schedule, inst.dims.num_users, inst.file_size_bits);
    Ok(SchemeOutcome {
        schedule,
        report,
        solver: Some(solver),
        graph_vertices: g.len(),
    })
}

/// Size limits for [`oracle_best_schedule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_users: usize,
    pub max_rrhs: usize,
    pub max_rrbs_per_rrh: usize,
    pub max_files: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_users: 3,
            max_rrhs: 2,
            max_rrbs_per_rrh: 2,
            max_files: 3,
        }
    }
}

/// Exhaustive search over every feasible schedule. Enumerates each user's
/// RRH (or none); given that, RRBs are independent, and each RRB tries every
/// nonempty combination, every achievable rate on it and every nonempty
/// subset of the users attached to its RRH.
pub fn oracle_best_schedule(inst: &Instance, budget: OracleBudget) -> Result<(Schedule, f64)> {
    let d = inst.dims;
    if d.num_users > budget.max_users
        || d.num_rrhs > budget.max_rrhs
        || d.num_rrbs_per_rrh > budget.max_rrbs_per_rrh
        || d.num_files > budget.max_files
    {
        return Err(Error::BudgetExceeded(format!(
            "{} users, {} rrhs, {} rrbs/rrh, {} files exceeds {budget:?}",
            d.num_users, d.num_rrhs, d.num_rrbs_per_rrh, d.num_files
        )));
    }
    let cm = &inst.capacities;
    let si = &inst.side_info;
    let combos: Vec<EncodedFile> = (1u32..1 << d.num_files)
        .map(|mask| EncodedFile::new((0..d.num_files).filter(|f| mask >> f & 1 == 1).collect()))
        .collect::<Result<_>>()?;
    let decodable: Vec<Vec<bool>> = combos
        .iter()
        .map(|k| {
            (0..d.num_users)
                .map(|u| is_instantly_decodable(k, u, si))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;

    let mut best = Schedule::new();
    let mut best_value = 0.0;
    let mut assignment = vec![0usize; d.num_users]; // 0 = unserved, b + 1 = rrh b
    loop {
        let mut s = Schedule::new();
        for b in 0..d.num_rrhs {
            let attached: Vec<usize> = (0..d.num_users).filter(|&u| assignment[u] == b + 1).collect();
            if attached.is_empty() {
                continue;
            }
            for z in 0..d.num_rrbs_per_rrh {
                let mut rates: Vec<f64> = (0..d.num_users)
                    .map(|u| cm.rate(b, z, u))
                    .filter(|&r| r > 0.0)
                    .collect();
                rates.sort_by(f64::total_cmp);
                rates.dedup();
                let mut rrb_best: Option<(f64, ScheduleEntry)> = None;
                for (ki, k) in combos.iter().enumerate() {
                    for &rate in &rates {
                        for tmask in 1u32..1 << attached.len() {
                            let targeted: BTreeSet<usize> = attached
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| tmask >> i & 1 == 1)
                                .map(|(_, &u)| u)
                                .collect();
                            let feasible = targeted.iter().all(|&u| decodable[ki][u] && rate <= cm.rate(b, z, u));
                            if !feasible {
                                continue;
                            }
                            let value = targeted.len() as f64 * rate;
                            if rrb_best.as_ref().is_none_or(|(v, _)| value > *v) {
                                rrb_best = Some((
                                    value,
                                    ScheduleEntry {
                                        kappa: k.clone(),
                                        rate,
                                        targeted,
                                    },
                                ));
                            }
                        }
                    }
                }
                if let Some((_, entry)) = rrb_best {
                    s.insert(b, z, entry);
                }
            }
        }
        let value = sum_rate(&s);
        if value > best_value {
            best_value = value;
            best = s;
        }
        // Next assignment in base (num_rrhs + 1).
        let mut i = 0;
        while i < d.num_users {
            assignment[i] += 1;
            if assignment[i] <= d.num_rrhs {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
        if i == d.num_users {
            break;
        }
    }
    Ok((best, best_value))
}

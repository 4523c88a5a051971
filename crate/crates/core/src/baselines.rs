//! Comparison schedulers: rate-unaware IDNC, rate-greedy RLNC and the
//! uncoded one-user-per-RRB scheme.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{build_graph_with, GraphKind};
use crate::instance::Instance;
use crate::scheduler::{
    clique_to_schedule, solve_graph, validate_schedule_with, Schedule, ScheduleEntry, SchemeOutcome, SolverChoice,
    ThroughputReport, ValidationOptions,
};
use crate::sideinfo::{EncodedFile, FileSet};

fn finish(
    inst: &Instance,
    schedule: Schedule,
    solver: Option<crate::scheduler::Solver>,
    graph_vertices: usize,
    opts: ValidationOptions,
) -> Result<SchemeOutcome> {
    let violations = validate_schedule_with(&schedule, &inst.capacities, &inst.side_info, opts);
    if !violations.is_empty() {
        return Err(Error::InvalidSchedule(violations));
    }
    let report = ThroughputReport::new(&schedule, inst.dims.num_users, inst.file_size_bits);
    Ok(SchemeOutcome {
        schedule,
        report,
        solver,
        graph_vertices,
    })
}

/// Picks XOR combinations to maximize the number of targeted users while
/// ignoring rates, then sends each RRB at the smallest capacity among its
/// targeted users.
pub fn classical_idnc(inst: &Instance, choice: SolverChoice) -> Result<SchemeOutcome> {
    let g = build_graph_with(GraphKind::RateFree, &inst.capacities, &inst.side_info, inst.dims)?;
    let (clique, solver) = solve_graph(&g, choice);
    let mut per_rrb: BTreeMap<(usize, usize), (FileSet, BTreeSet<usize>)> = BTreeMap::new();
    for &id in &clique.members {
        let v = g.vertex(id);
        let slot = per_rrb.entry(v.rrb()).or_default();
        slot.0.insert(v.f);
        slot.1.insert(v.u);
    }
    let mut schedule = Schedule::new();
    for ((b, z), (files, targeted)) in per_rrb {
        let rate = targeted
            .iter()
            .map(|&u| inst.capacities.rate(b, z, u))
            .fold(f64::INFINITY, f64::min);
        schedule.insert(
            b,
            z,
            ScheduleEntry {
                kappa: EncodedFile::new(files)?,
                rate,
                targeted,
            },
        );
    }
    finish(inst, schedule, Some(solver), g.len(), ValidationOptions::default())
}

/// Each user with pending wants joins the RRB where its capacity is highest
/// (ties to the lowest `(b, z)`). Every used RRB mixes all files and sends at
/// the smallest capacity among its users.
///
/// A full mix is not instantly decodable, so the schedule is validated
/// without the decodability check; each assigned user is credited the RRB
/// rate.
pub fn rlnc(inst: &Instance) -> Result<SchemeOutcome> {
    let d = inst.dims;
    let cm = &inst.capacities;
    let mut groups: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
    for u in 0..d.num_users {
        if inst.side_info.wants(u).is_empty() {
            continue;
        }
        let mut best: Option<((usize, usize), f64)> = None;
        for b in 0..d.num_rrhs {
            for z in 0..d.num_rrbs_per_rrh {
                let r = cm.rate(b, z, u);
                if r > 0.0 && best.is_none_or(|(_, br)| r > br) {
                    best = Some(((b, z), r));
                }
            }
        }
        if let Some((rrb, _)) = best {
            groups.entry(rrb).or_default().insert(u);
        }
    }
    let all_files = EncodedFile::new((0..d.num_files).collect())?;
    let mut schedule = Schedule::new();
    for ((b, z), targeted) in groups {
        let rate = targeted.iter().map(|&u| cm.rate(b, z, u)).fold(f64::INFINITY, f64::min);
        schedule.insert(
            b,
            z,
            ScheduleEntry {
                kappa: all_files.clone(),
                rate,
                targeted,
            },
        );
    }
    finish(
        inst,
        schedule,
        None,
        0,
        ValidationOptions {
            check_decodability: false,
        },
    )
}

/// Uncoded scheduling: at most one user per RRB, sent one of its wanted
/// files at its own capacity, a user possibly holding several RRBs of one
/// RRH.
pub fn heu_shd(inst: &Instance, choice: SolverChoice) -> Result<SchemeOutcome> {
    let g = build_graph_with(GraphKind::Uncoded, &inst.capacities, &inst.side_info, inst.dims)?;
    let (clique, solver) = solve_graph(&g, choice);
    let schedule = clique_to_schedule(&clique, &g)?;
    debug_assert!(schedule.entries.values().all(|e| e.targeted.len() == 1));
    finish(inst, schedule, Some(solver), g.len(), ValidationOptions::default())
}

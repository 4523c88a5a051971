//! Hand-built golden instances.
//!
//! Both use 3 users, 3 files, 2 RRHs and one RRB per RRH. Indices are
//! 0-based in code; the vertex labels in [`FIG4_CLIQUES`] follow the 1-based
//! `bzufr` convention (RRH, RRB, user, file, rate).

use crate::baselines::heu_shd;
use crate::channel::{CapacityMatrix, NetworkDims};
use crate::clique::is_clique;
use crate::error::Result;
use crate::graph::build_graph;
use crate::instance::Instance;
use crate::scheduler::{propose_schedule, SolverChoice};
use crate::sideinfo::SideInformation;

pub const DEFAULT_FILE_SIZE_BITS: f64 = 1.0e6;

fn dims() -> NetworkDims {
    NetworkDims::new(2, 1, 3, 3).expect("valid dims")
}

/// Every capacity is 1 bit/s/Hz. User 0 holds file 1, user 1 holds file 0,
/// user 2 holds nothing; user `u` wants file `u`. Coding 0⊕1 on one RRH and
/// file 2 on the other reaches 3; without coding only 2 is possible.
pub fn fig3() -> Instance {
    let cm = CapacityMatrix::uniform(dims(), 1.0).expect("valid rates");
    let si = SideInformation::from_lists(3, &[&[1], &[0], &[]], &[&[0], &[1], &[2]]).expect("valid side info");
    Instance::new(cm, si, DEFAULT_FILE_SIZE_BITS).expect("valid instance")
}

/// [`fig3`] with user 1 reduced to 0.1 bit/s/Hz on both RRHs, so pairing
/// users 0 and 1 drags the shared rate down.
pub fn fig3_asymmetric() -> Instance {
    let mut inst = fig3();
    for b in 0..2 {
        inst.capacities.set_rate(b, 0, 1, 0.1).expect("in range");
    }
    inst
}

/// Capacities read off the vertex labels of the worked graph example:
/// RRB (0,0) gives 1, 3, 2 and RRB (1,0) gives 2, 1, 2 for users 0, 1, 2.
/// Every user holds the two files it does not want.
pub fn fig4() -> Instance {
    let cm = CapacityMatrix::from_nested(dims(), vec![vec![vec![1.0, 3.0, 2.0]], vec![vec![2.0, 1.0, 2.0]]])
        .expect("valid rates");
    let si =
        SideInformation::from_lists(3, &[&[1, 2], &[0, 2], &[0, 1]], &[&[0], &[1], &[2]]).expect("valid side info");
    Instance::new(cm, si, DEFAULT_FILE_SIZE_BITS).expect("valid instance")
}

/// The seven listed cliques of the worked example, in listed order.
pub const FIG4_CLIQUES: [&[&str]; 7] = [
    &["11111", "21221"],
    &["21332", "11111"],
    &["21221", "11332"],
    &["21111", "21221", "21331"],
    &["11111", "11221", "11331"],
    &["21112", "11222", "11332"],
    &["11223", "21112", "21332"],
];

/// Their total weights in the same order.
pub const FIG4_CLIQUE_WEIGHTS: [f64; 7] = [2.0, 3.0, 3.0, 3.0, 3.0, 6.0, 7.0];

/// Decodes a 1-based `bzufr` label into 0-based `(b, z, u, f)` and the rate.
pub fn decode_label(label: &str) -> (usize, usize, usize, usize, f64) {
    let d: Vec<usize> = label
        .chars()
        .map(|c| c.to_digit(10).expect("digit label") as usize)
        .collect();
    assert_eq!(d.len(), 5, "label must have five digits");
    (d[0] - 1, d[1] - 1, d[2] - 1, d[3] - 1, d[4] as f64)
}

/// Outcome of one golden self-check.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenCheck {
    pub name: &'static str,
    /// Optimal sum rate found by the exact scheduler.
    pub value: f64,
    pub ok: bool,
    /// Empty when `ok`, otherwise what went wrong.
    pub detail: String,
}

/// Runs both worked examples through the scheduler: the optimum must be 3 on
/// [`fig3`] (2 without coding) and 7 on [`fig4`], where every listed clique
/// must also exist with its listed weight.
pub fn golden_checks() -> Result<Vec<GoldenCheck>> {
    let mut out = Vec::new();

    let inst = fig3();
    let (_, report) = propose_schedule(&inst, SolverChoice::Exact)?;
    let uncoded = heu_shd(&inst, SolverChoice::Exact)?.report.sum_rate;
    let mut problems = Vec::new();
    if report.sum_rate != 3.0 {
        problems.push(format!("optimum {} != 3", report.sum_rate));
    }
    if uncoded != 2.0 {
        problems.push(format!("uncoded {uncoded} != 2"));
    }
    out.push(GoldenCheck {
        name: "fig3",
        value: report.sum_rate,
        ok: problems.is_empty(),
        detail: problems.join("; "),
    });

    let inst = fig4();
    let g = build_graph(&inst.capacities, &inst.side_info, inst.dims)?;
    let mut problems = Vec::new();
    for (labels, &want) in FIG4_CLIQUES.iter().zip(&FIG4_CLIQUE_WEIGHTS) {
        let ids: Option<Vec<usize>> = labels
            .iter()
            .map(|l| {
                let (b, z, u, f, r) = decode_label(l);
                g.find(b, z, u, f, r)
            })
            .collect();
        let Some(ids) = ids else {
            problems.push(format!("{labels:?}: missing vertex"));
            continue;
        };
        let weight: f64 = ids.iter().map(|&v| g.weighted().weight(v)).sum();
        if !is_clique(g.weighted(), &ids)? || weight != want {
            problems.push(format!("{labels:?}: not a clique of weight {want}"));
        }
    }
    let (_, report) = propose_schedule(&inst, SolverChoice::Exact)?;
    if report.sum_rate != 7.0 {
        problems.push(format!("optimum {} != 7", report.sum_rate));
    }
    out.push(GoldenCheck {
        name: "fig4",
        value: report.sum_rate,
        ok: problems.is_empty(),
        detail: problems.join("; "),
    });
    Ok(out)
}

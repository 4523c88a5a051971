//! Round trips through the text formats: config, schedules, graph dumps and
//! sweep CSV files.

use cran_idnc::clique::WeightedGraph;
use cran_idnc::graph::build_graph;
use cran_idnc::harness::{emit_csv, parse_csv, run_sweep, ExperimentConfig, Scheme, SweptParameter};
use cran_idnc::scenario::generate_scenario;
use cran_idnc::scheduler::propose_schedule;
use cran_idnc::{ScenarioConfig, Schedule, SolverChoice};

const CONFIG: &str = r#"
num_rrhs = 2
num_rrbs = 2
num_users = 5
num_files = 6
has_prob = 0.3
seed = 11
sweep_param = "num_users"
sweep_values = [2, 5]
trials = 4
schemes = ["proposed_exact", "rlnc"]
"#;

#[test]
fn config_drives_the_sweep() {
    let c = ExperimentConfig::from_config_str(CONFIG).unwrap();
    assert_eq!(c.scenario.rng_seed, 11);
    assert_eq!(c.scenario.has_prob, 0.3);
    let spec = c.sweep_spec().unwrap();
    let r = run_sweep(&spec).unwrap();
    assert_eq!(r.swept_parameter, SweptParameter::NumUsers);
    assert_eq!(r.points.len(), 4);
    assert_eq!(r.records.len(), 2 * 4 * 2);
    assert!(r.point(Scheme::Rlnc, 5).is_some());
    assert!(r.point(Scheme::HeuShd, 5).is_none());
}

#[test]
fn csv_file_round_trip_and_repeatability() {
    let spec = ExperimentConfig::from_config_str(CONFIG).unwrap().sweep_spec().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    emit_csv(&run_sweep(&spec).unwrap(), &a).unwrap();
    emit_csv(&run_sweep(&spec).unwrap(), &b).unwrap();
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let result = run_sweep(&spec).unwrap();
    for row in parse_csv(&text).unwrap() {
        let p = result.point(row.scheme, row.value).unwrap();
        assert_eq!(row.mean, p.mean);
        assert_eq!(row.stderr, p.stderr);
    }
}

#[test]
fn schedule_text_round_trip() {
    let c = ScenarioConfig::from_config_str("num_users = 6\nseed = 3\n").unwrap();
    let inst = generate_scenario(&c).unwrap().instance();
    let (s, _) = propose_schedule(&inst, SolverChoice::Exact).unwrap();
    assert!(!s.is_empty());
    assert_eq!(Schedule::from_text(&s.to_text()).unwrap(), s);
}

#[test]
fn graph_dump_reloads_with_same_structure() {
    let c = ScenarioConfig::from_config_str("num_users = 4\nnum_rrbs = 2\n").unwrap();
    let inst = generate_scenario(&c).unwrap().instance();
    let g = build_graph(&inst.capacities, &inst.side_info, inst.dims).unwrap();
    let back = WeightedGraph::from_dimacs(&g.to_dimacs()).unwrap();
    assert_eq!(&back, g.weighted());
}

#[test]
fn bad_configs_are_rejected() {
    for text in [
        "num_users = 0\n",
        "has_prob = 1.5\n",
        "num_user = 3\n",
        "seed = \"x\"\n",
        "num_users = 3\nnum_users = 4\n",
        "sweep_values = [3, 3]\nsweep_param = \"num_users\"\n",
    ] {
        let r = ExperimentConfig::from_config_str(text).and_then(|c| c.sweep_spec().map(|_| ()));
        assert!(r.is_err(), "{text:?} accepted");
    }
}

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cran-idnc"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn selftest_prints_golden_values() {
    let o = run(&["selftest"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "fig3: 3.0 OK\nfig4: 7.0 OK\n");
}

#[test]
fn bad_flags_fail_with_help_hint() {
    for args in [
        &["selftest", "--nope"][..],
        &["sweep", "--config", "x.toml"][..],
        &["frobnicate"][..],
        &["--trials", "many", "selftest"][..],
        &[][..],
    ] {
        let o = run(args);
        assert!(!o.status.success(), "{args:?} succeeded");
        assert!(String::from_utf8_lossy(&o.stderr).contains("--help"), "{args:?}");
    }
}

#[test]
fn solve_with_empty_wants_reports_zero_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "wants_per_user = 0\nnum_users = 4\n");
    let o = run(&[
        "solve",
        "--config",
        &cfg,
        "--schemes",
        "proposed_exact,proposed_greedy,classical_idnc,rlnc,heu_shd",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let schemes: Vec<&str> = text.lines().filter(|l| l.starts_with("scheme ")).collect();
    assert_eq!(schemes.len(), 5);
    for line in schemes {
        assert!(line.contains(" sum_rate 0 "), "{line}");
        assert!(line.contains(" delivered_bits 0 "), "{line}");
    }
}

#[test]
fn solve_prints_feasible_looking_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "num_users = 5\nnum_rrbs = 2\n");
    let o = run(&["solve", "--config", &cfg, "--seed", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("instance rrhs=3 rrbs=2 users=5 files=10 seed=4\n"));
    assert!(text.contains("scheme proposed_exact "));
    assert!(text.contains("scheme heu_shd "));
}

#[test]
fn sweep_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        "num_rrbs = 1\nsweep_param = \"num_users\"\nsweep_values = [2, 3]\ntrials = 50\n",
    );
    let out = dir.path().join("o.csv");
    let o = run(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--trials",
        "3",
        "--schemes",
        "rlnc",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "scheme,swept_param,value,mean_bits_per_user_hz,stderr,mean_delivered_bits,trials"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("rlnc,num_users,2,") && lines[1].ends_with(",3"));
    assert!(lines[2].starts_with("rlnc,num_users,3,") && lines[2].ends_with(",3"));
}

#[test]
fn config_and_io_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    assert!(!run(&["solve", "--config", missing.to_str().unwrap()]).status.success());
    let unknown = write(dir.path(), "u.toml", "colour = 3\n");
    let o = run(&["solve", "--config", &unknown]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    let no_sweep = write(dir.path(), "n.toml", "num_users = 3\n");
    let out = dir.path().join("o.csv");
    assert!(!run(&["sweep", "--config", &no_sweep, "--out", out.to_str().unwrap()])
        .status
        .success());
    let cfg = write(
        dir.path(),
        "ok.toml",
        "num_users = 3\nsweep_param = \"num_users\"\nsweep_values = [3]\n",
    );
    let o = run(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        "/nonexistent-dir/o.csv",
        "--trials",
        "1",
    ]);
    assert!(!o.status.success());
    let o = run(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--trials",
        "0",
    ]);
    assert!(!o.status.success());
    let o = run(&["solve", "--config", &cfg, "--schemes", "best_one"]);
    assert!(!o.status.success());
}

#[test]
fn graph_dump_writes_dimacs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "num_users = 3\nnum_rrbs = 1\n");
    let out = dir.path().join("g.txt");
    assert!(run(&["graph-dump", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status
        .success());
    let text = std::fs::read_to_string(out).unwrap();
    let header = text.lines().find(|l| l.starts_with("p edge ")).unwrap();
    let n: usize = header.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("w ")).count(), n);
    assert_eq!(text.lines().filter(|l| l.starts_with("c v ")).count(), n);
}

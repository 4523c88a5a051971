use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use cran_idnc::fixtures::golden_checks;
use cran_idnc::graph::build_graph;
use cran_idnc::harness::{emit_csv, parse_schemes, run_sweep, ExperimentConfig};
use cran_idnc::scenario::generate_scenario;

#[derive(Debug, Parser)]
#[command(name = "cran-idnc", version, about = "Rate-aware IDNC scheduling for cloud RANs")]
struct Cli {
    /// Base random seed (overrides `seed` in the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per sweep point (overrides `trials`).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Comma-separated schemes (overrides `schemes`).
    #[arg(long, global = true)]
    schemes: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a parameter sweep and write the aggregated CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate one scenario and print every scheme's schedule.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write the CRAN-IDNC graph of one scenario in DIMACS-like form.
    GraphDump {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the scheduler on the two worked examples.
    Selftest,
}

fn load(cli: &Cli, path: &Path) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::from_file(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(seed) = cli.seed {
        c.scenario.rng_seed = seed;
    }
    if let Some(t) = cli.trials {
        c.trials = t;
    }
    if let Some(s) = &cli.schemes {
        c.schemes = parse_schemes(s)?;
    }
    Ok(c)
}

fn solve_report(c: &ExperimentConfig) -> Result<String> {
    let scenario = generate_scenario(&c.scenario)?;
    let inst = scenario.instance();
    let mut out = String::new();
    let d = inst.dims;
    writeln!(
        out,
        "instance rrhs={} rrbs={} users={} files={} seed={}",
        d.num_rrhs, d.num_rrbs_per_rrh, d.num_users, d.num_files, c.scenario.rng_seed
    )?;
    for scheme in &c.schemes {
        let o = scheme.run(&inst, c.vertex_budget)?;
        let solver = o.solver.map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(
            out,
            "scheme {} sum_rate {} bits_per_user_hz {} delivered_bits {} solver {} vertices {}",
            scheme,
            o.report.sum_rate,
            o.report.sum_rate / d.num_users as f64,
            o.report.delivered_bits,
            solver,
            o.graph_vertices
        )?;
        for line in o.schedule.to_text().lines() {
            writeln!(out, "  {line}")?;
        }
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Sweep { config, out } => {
            let c = load(cli, config)?;
            let result = run_sweep(&c.sweep_spec()?)?;
            emit_csv(&result, out)?;
        }
        Command::Solve { config } => {
            let c = load(cli, config)?;
            print!("{}", solve_report(&c)?);
        }
        Command::GraphDump { config, out } => {
            let c = load(cli, config)?;
            let inst = generate_scenario(&c.scenario)?.instance();
            let g = build_graph(&inst.capacities, &inst.side_info, inst.dims)?;
            std::fs::write(out, g.to_dimacs()).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Selftest => {
            let mut all_ok = true;
            for check in golden_checks()? {
                if check.ok {
                    println!("{}: {:.1} OK", check.name, check.value);
                } else {
                    println!("{}: {:.1} FAILED ({})", check.name, check.value, check.detail);
                    all_ok = false;
                }
            }
            return Ok(all_ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

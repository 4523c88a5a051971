//! Monte Carlo sweeps over one scenario parameter, with every scheme run on
//! the same scenario per trial, plus CSV emission.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::baselines::{classical_idnc, heu_shd, rlnc};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scenario::{generate_scenario, parse_table, scenario_keys, ScenarioConfig, SCENARIO_KEYS};
use crate::scheduler::{propose_schedule_detailed, SchemeOutcome, Solver, SolverChoice, DEFAULT_VERTEX_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Exact clique search within the vertex budget, greedy above it.
    ProposedExact,
    ProposedGreedy,
    ClassicalIdnc,
    Rlnc,
    HeuShd,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::ProposedExact,
        Scheme::ProposedGreedy,
        Scheme::ClassicalIdnc,
        Scheme::Rlnc,
        Scheme::HeuShd,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::ProposedExact => "proposed_exact",
            Self::ProposedGreedy => "proposed_greedy",
            Self::ClassicalIdnc => "classical_idnc",
            Self::Rlnc => "rlnc",
            Self::HeuShd => "heu_shd",
        }
    }

    pub fn run(&self, inst: &Instance, vertex_budget: usize) -> Result<SchemeOutcome> {
        let auto = SolverChoice::Auto { vertex_budget };
        match self {
            Self::ProposedExact => propose_schedule_detailed(inst, auto),
            Self::ProposedGreedy => propose_schedule_detailed(inst, SolverChoice::Greedy),
            Self::ClassicalIdnc => classical_idnc(inst, auto),
            Self::Rlnc => rlnc(inst),
            Self::HeuShd => heu_shd(inst, auto),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

/// Parses a comma-separated scheme list, keeping the given order and
/// dropping duplicates.
pub fn parse_schemes(list: &str) -> Result<Vec<Scheme>> {
    let mut out: Vec<Scheme> = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let s: Scheme = name.parse()?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no schemes given".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweptParameter {
    NumUsers,
    NumRrbs,
    FileSize,
}

impl SweptParameter {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NumUsers => "num_users",
            Self::NumRrbs => "num_rrbs",
            Self::FileSize => "file_size",
        }
    }

    fn apply(&self, base: &ScenarioConfig, value: u64) -> Result<ScenarioConfig> {
        let mut c = base.clone();
        match self {
            Self::NumUsers => c.dims.num_users = value as usize,
            Self::NumRrbs => c.dims.num_rrbs_per_rrh = value as usize,
            Self::FileSize => c.file_size_bits = value as f64,
        }
        c.validate()?;
        Ok(c)
    }
}

impl FromStr for SweptParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "num_users" => Ok(Self::NumUsers),
            "num_rrbs" => Ok(Self::NumRrbs),
            "file_size" | "file_size_bits" => Ok(Self::FileSize),
            other => Err(Error::Config(format!("cannot sweep `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub swept_parameter: SweptParameter,
    pub values: Vec<u64>,
    pub trials_per_point: usize,
    pub base_config: ScenarioConfig,
    pub schemes: Vec<Scheme>,
    pub vertex_budget: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sweep values must be strictly increasing".into()));
        }
        if self.trials_per_point == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("no schemes selected".into()));
        }
        self.base_config.validate()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable per-trial seed: splitmix64 chained over the base seed, the swept
/// value and the trial index.
pub fn trial_seed(base: u64, value: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ value) ^ trial)
}

/// Seed for trial `t` at sweep value `value`. File-size sweeps leave the
/// scenario untouched, so they reuse one scenario per trial index across all
/// values.
fn seed_for(spec: &SweepSpec, value: u64, trial: u64) -> u64 {
    let v = match spec.swept_parameter {
        SweptParameter::FileSize => 0,
        _ => value,
    };
    trial_seed(spec.base_config.rng_seed, v, trial)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub scheme: Scheme,
    pub value: u64,
    pub trial: usize,
    pub seed: u64,
    pub num_users: usize,
    pub sum_rate: f64,
    /// sum_rate / U, bits/user/Hz.
    pub normalized: f64,
    pub delivered_bits: f64,
    pub solver: Option<Solver>,
    pub graph_vertices: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub scheme: Scheme,
    pub value: u64,
    pub mean: f64,
    pub stderr: f64,
    pub mean_delivered_bits: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub swept_parameter: SweptParameter,
    /// Sorted by (scheme, value).
    pub points: Vec<PointSummary>,
    /// Sorted by (value, trial, scheme).
    pub records: Vec<TrialRecord>,
}

impl SweepResult {
    pub fn point(&self, scheme: Scheme, value: u64) -> Option<&PointSummary> {
        self.points.iter().find(|p| p.scheme == scheme && p.value == value)
    }

    pub fn records_for(&self, scheme: Scheme, value: u64) -> impl Iterator<Item = &TrialRecord> {
        self.records
            .iter()
            .filter(move |r| r.scheme == scheme && r.value == value)
    }
}

/// Mean and standard error of the mean. Values are summed in sorted order so
/// the result does not depend on trial order.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() == 1 {
        return (mean, 0.0);
    }
    let mut dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    dev.sort_by(f64::total_cmp);
    let var = dev.iter().sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_trial(spec: &SweepSpec, value: u64, trial: usize) -> Result<Vec<TrialRecord>> {
    let mut config = spec.swept_parameter.apply(&spec.base_config, value)?;
    let seed = seed_for(spec, value, trial as u64);
    config.rng_seed = seed;
    let scenario = generate_scenario(&config)?;
    let inst = scenario.instance();
    let u = config.dims.num_users;
    spec.schemes
        .iter()
        .map(|&scheme| {
            let out = scheme.run(&inst, spec.vertex_budget).map_err(|e| Error::Trial {
                scheme: scheme.name().into(),
                seed,
                source: Box::new(e),
            })?;
            Ok(TrialRecord {
                scheme,
                value,
                trial,
                seed,
                num_users: u,
                sum_rate: out.report.sum_rate,
                normalized: out.report.sum_rate / u as f64,
                delivered_bits: out.report.delivered_bits,
                solver: out.solver,
                graph_vertices: out.graph_vertices,
            })
        })
        .collect()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let jobs: Vec<(u64, usize)> = spec
        .values
        .iter()
        .flat_map(|&v| (0..spec.trials_per_point).map(move |t| (v, t)))
        .collect();
    let per_trial: Vec<Vec<TrialRecord>> = jobs
        .par_iter()
        .map(|&(v, t)| run_trial(spec, v, t))
        .collect::<Result<_>>()?;
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();

    let mut schemes = spec.schemes.clone();
    schemes.sort_by_key(|s| s.name());
    let mut points = Vec::new();
    for &scheme in &schemes {
        for &value in &spec.values {
            let rs: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.scheme == scheme && r.value == value)
                .collect();
            let (mean, stderr) = mean_and_stderr(&rs.iter().map(|r| r.normalized).collect::<Vec<_>>());
            let (mean_bits, _) = mean_and_stderr(&rs.iter().map(|r| r.delivered_bits).collect::<Vec<_>>());
            points.push(PointSummary {
                scheme,
                value,
                mean,
                stderr,
                mean_delivered_bits: mean_bits,
                trials: rs.len(),
            });
        }
    }
    Ok(SweepResult {
        swept_parameter: spec.swept_parameter,
        points,
        records,
    })
}

pub const CSV_HEADER: &str = "scheme,swept_param,value,mean_bits_per_user_hz,stderr,mean_delivered_bits,trials";

pub fn to_csv(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut points: Vec<&PointSummary> = result.points.iter().collect();
    points.sort_by(|a, b| a.scheme.name().cmp(b.scheme.name()).then(a.value.cmp(&b.value)));
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.scheme.name(),
            result.swept_parameter.name(),
            p.value,
            p.mean,
            p.stderr,
            p.mean_delivered_bits,
            p.trials
        );
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(result)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub scheme: Scheme,
    pub swept_param: String,
    pub value: u64,
    pub mean: f64,
    pub stderr: f64,
    pub mean_delivered_bits: f64,
    pub trials: usize,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            msg: "unexpected header".into(),
        });
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let err = |m: &str| Error::Parse {
                line: i + 2,
                msg: m.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(err("expected 7 fields"));
            }
            Ok(CsvRow {
                scheme: f[0].parse()?,
                swept_param: f[1].to_string(),
                value: f[2].parse().map_err(|_| err("bad value"))?,
                mean: f[3].parse().map_err(|_| err("bad mean"))?,
                stderr: f[4].parse().map_err(|_| err("bad stderr"))?,
                mean_delivered_bits: f[5].parse().map_err(|_| err("bad delivered bits"))?,
                trials: f[6].parse().map_err(|_| err("bad trial count"))?,
            })
        })
        .collect()
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct SweepKeys {
    sweep_param: Option<String>,
    sweep_values: Option<Vec<u64>>,
    trials: Option<usize>,
    schemes: Option<Vec<String>>,
    exact_vertex_budget: Option<usize>,
}

const SWEEP_KEYS: &[&str] = &[
    "sweep_param",
    "sweep_values",
    "trials",
    "schemes",
    "exact_vertex_budget",
];

pub const DEFAULT_TRIALS: usize = 100;

/// Contents of an experiment config file: scenario keys plus optional sweep
/// keys, all flat `key = value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub swept_parameter: Option<SweptParameter>,
    pub values: Vec<u64>,
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    pub vertex_budget: usize,
}

impl ExperimentConfig {
    pub fn from_config_str(text: &str) -> Result<Self> {
        let table = parse_table(text)?;
        if let Some(k) = table
            .keys()
            .find(|k| !SCENARIO_KEYS.contains(&k.as_str()) && !SWEEP_KEYS.contains(&k.as_str()))
        {
            return Err(Error::Config(format!("unknown key `{k}`")));
        }
        let scenario = scenario_keys(&table)?.apply()?;
        let sweep_table: toml::Table = table
            .iter()
            .filter(|(k, _)| SWEEP_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let keys: SweepKeys = sweep_table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let schemes = match keys.schemes {
            Some(list) => parse_schemes(&list.join(","))?,
            None => vec![
                Scheme::ProposedExact,
                Scheme::ClassicalIdnc,
                Scheme::Rlnc,
                Scheme::HeuShd,
            ],
        };
        Ok(Self {
            scenario,
            swept_parameter: keys.sweep_param.as_deref().map(str::parse).transpose()?,
            values: keys.sweep_values.unwrap_or_default(),
            trials: keys.trials.unwrap_or(DEFAULT_TRIALS),
            schemes,
            vertex_budget: keys.exact_vertex_budget.unwrap_or(DEFAULT_VERTEX_BUDGET),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_config_str(&text)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let spec = SweepSpec {
            swept_parameter: self
                .swept_parameter
                .ok_or_else(|| Error::Config("config has no `sweep_param`".into()))?,
            values: self.values.clone(),
            trials_per_point: self.trials,
            base_config: self.scenario.clone(),
            schemes: self.schemes.clone(),
            vertex_budget: self.vertex_budget,
        };
        spec.validate()?;
        Ok(spec)
    }
}

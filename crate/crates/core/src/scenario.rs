//! Random instance generation: a hexagonal cell with RRHs on a fixed ring,
//! users dropped uniformly, distance-based path loss with log-normal
//! shadowing drawn independently per RRB, and Bernoulli side information.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Deserialize;

use crate::channel::{capacity_matrix, CapacityMatrix, ChannelState, NetworkDims, PowerProfile};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::sideinfo::{FileSet, SideInformation};

/// Free-space loss at 100 m for a 2 GHz carrier: 20·log10(4π·100 / 0.15).
pub const DEFAULT_REFERENCE_LOSS_DB: f64 = 78.468_383_135_163;

/// Log-distance path loss `A + 10·γ·log10(d / d0)` plus Gaussian shadowing
/// in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    pub reference_distance_m: f64,
    pub reference_loss_db: f64,
    pub exponent: f64,
    /// Standard deviation of the shadowing term; 0 disables it.
    pub shadowing_std_db: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            reference_distance_m: 100.0,
            reference_loss_db: DEFAULT_REFERENCE_LOSS_DB,
            exponent: 4.0,
            shadowing_std_db: 8.0,
        }
    }
}

impl PathLossModel {
    /// Deterministic part of the loss in dB.
    pub fn mean_loss_db(&self, distance_m: f64) -> Result<f64> {
        if !distance_m.is_finite() || distance_m <= 0.0 {
            return Err(Error::Domain(format!("distance must be positive, got {distance_m}")));
        }
        Ok(self.reference_loss_db + 10.0 * self.exponent * (distance_m / self.reference_distance_m).log10())
    }

    /// One loss draw in dB, shadowing included.
    pub fn sample_loss_db<R: Rng + ?Sized>(&self, distance_m: f64, rng: &mut R) -> Result<f64> {
        let mean = self.mean_loss_db(distance_m)?;
        if self.shadowing_std_db == 0.0 {
            return Ok(mean);
        }
        let shadow =
            Normal::new(0.0, self.shadowing_std_db).map_err(|e| Error::Domain(format!("shadowing deviation: {e}")))?;
        Ok(mean + shadow.sample(rng))
    }
}

/// Linear power gain `10^(-PL/10)` for one link.
pub fn channel_gain<R: Rng + ?Sized>(model: &PathLossModel, distance_m: f64, rng: &mut R) -> Result<f64> {
    Ok(10f64.powf(-model.sample_loss_db(distance_m, rng)? / 10.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Whether `p` lies in the flat-topped regular hexagon centered at the
/// origin with vertex-to-vertex diameter `diameter`.
pub fn in_hexagon(p: &Point, diameter: f64) -> bool {
    let r = diameter / 2.0;
    let s3 = 3f64.sqrt();
    let (x, y) = (p.x.abs(), p.y.abs());
    y <= r * s3 / 2.0 && s3 * x + y <= s3 * r
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub dims: NetworkDims,
    /// Vertex-to-vertex diameter of the hexagonal cell.
    pub cell_diameter_m: f64,
    pub tx_psd_dbm_hz: f64,
    pub noise_psd_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub file_size_bits: f64,
    /// Probability that a user already holds any given file.
    pub has_prob: f64,
    pub wants_per_user: usize,
    pub path_loss: PathLossModel,
    /// Link distances are clamped to at least this value.
    pub min_distance_m: f64,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            dims: NetworkDims {
                num_rrhs: 3,
                num_rrbs_per_rrh: 4,
                num_users: 15,
                num_files: 10,
            },
            cell_diameter_m: 500.0,
            tx_psd_dbm_hz: -42.60,
            noise_psd_dbm_hz: -168.60,
            bandwidth_hz: 1.0e7,
            file_size_bits: 1.0e6,
            has_prob: 0.5,
            wants_per_user: 1,
            path_loss: PathLossModel::default(),
            min_distance_m: 10.0,
            rng_seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.dims.validate()?;
        let checks = [
            (self.cell_diameter_m > 0.0, "cell_diameter_m must be positive"),
            ((0.0..=1.0).contains(&self.has_prob), "has_prob must lie in [0, 1]"),
            (self.bandwidth_hz > 0.0, "bandwidth_hz must be positive"),
            (self.file_size_bits > 0.0, "file_size_bits must be positive"),
            (self.min_distance_m > 0.0, "min_distance_m must be positive"),
            (
                self.path_loss.reference_distance_m > 0.0,
                "reference_distance_m must be positive",
            ),
            (
                self.path_loss.shadowing_std_db >= 0.0,
                "shadowing_std_db must be nonnegative",
            ),
            (
                self.tx_psd_dbm_hz.is_finite() && self.noise_psd_dbm_hz.is_finite(),
                "power densities must be finite",
            ),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::Config(msg.into()));
            }
        }
        Ok(())
    }
}

/// Scenario keys accepted in a config file. Everything is optional and falls
/// back to [`ScenarioConfig::default`].
#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub(crate) struct ScenarioKeys {
    num_rrhs: Option<usize>,
    num_rrbs: Option<usize>,
    num_users: Option<usize>,
    num_files: Option<usize>,
    cell_diameter_m: Option<f64>,
    tx_psd_dbm_hz: Option<f64>,
    noise_psd_dbm_hz: Option<f64>,
    bandwidth_hz: Option<f64>,
    file_size_bits: Option<f64>,
    has_prob: Option<f64>,
    wants_per_user: Option<usize>,
    seed: Option<u64>,
    reference_distance_m: Option<f64>,
    reference_loss_db: Option<f64>,
    path_loss_exponent: Option<f64>,
    shadowing_std_db: Option<f64>,
    min_distance_m: Option<f64>,
}

pub(crate) const SCENARIO_KEYS: &[&str] = &[
    "num_rrhs",
    "num_rrbs",
    "num_users",
    "num_files",
    "cell_diameter_m",
    "tx_psd_dbm_hz",
    "noise_psd_dbm_hz",
    "bandwidth_hz",
    "file_size_bits",
    "has_prob",
    "wants_per_user",
    "seed",
    "reference_distance_m",
    "reference_loss_db",
    "path_loss_exponent",
    "shadowing_std_db",
    "min_distance_m",
];

impl ScenarioKeys {
    pub(crate) fn apply(self) -> Result<ScenarioConfig> {
        let mut c = ScenarioConfig::default();
        let d = &mut c.dims;
        d.num_rrhs = self.num_rrhs.unwrap_or(d.num_rrhs);
        d.num_rrbs_per_rrh = self.num_rrbs.unwrap_or(d.num_rrbs_per_rrh);
        d.num_users = self.num_users.unwrap_or(d.num_users);
        d.num_files = self.num_files.unwrap_or(d.num_files);
        c.cell_diameter_m = self.cell_diameter_m.unwrap_or(c.cell_diameter_m);
        c.tx_psd_dbm_hz = self.tx_psd_dbm_hz.unwrap_or(c.tx_psd_dbm_hz);
        c.noise_psd_dbm_hz = self.noise_psd_dbm_hz.unwrap_or(c.noise_psd_dbm_hz);
        c.bandwidth_hz = self.bandwidth_hz.unwrap_or(c.bandwidth_hz);
        c.file_size_bits = self.file_size_bits.unwrap_or(c.file_size_bits);
        c.has_prob = self.has_prob.unwrap_or(c.has_prob);
        c.wants_per_user = self.wants_per_user.unwrap_or(c.wants_per_user);
        c.rng_seed = self.seed.unwrap_or(c.rng_seed);
        let pl = &mut c.path_loss;
        pl.reference_distance_m = self.reference_distance_m.unwrap_or(pl.reference_distance_m);
        pl.reference_loss_db = self.reference_loss_db.unwrap_or(pl.reference_loss_db);
        pl.exponent = self.path_loss_exponent.unwrap_or(pl.exponent);
        pl.shadowing_std_db = self.shadowing_std_db.unwrap_or(pl.shadowing_std_db);
        c.min_distance_m = self.min_distance_m.unwrap_or(c.min_distance_m);
        c.validate()?;
        Ok(c)
    }
}

pub(crate) fn parse_table(text: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>().map_err(|e| Error::Config(e.to_string()))
}

impl ScenarioConfig {
    /// Reads flat `key = value` lines. Unknown keys are rejected.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let table = parse_table(text)?;
        if let Some(k) = table.keys().find(|k| !SCENARIO_KEYS.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key `{k}`")));
        }
        scenario_keys(&table)?.apply()
    }
}

pub(crate) fn scenario_keys(table: &toml::Table) -> Result<ScenarioKeys> {
    let subset: toml::Table = table
        .iter()
        .filter(|(k, _)| SCENARIO_KEYS.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    subset
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
}

/// RRHs on a ring of radius diameter/4 (one RRH sits at the center); users
/// uniform over the hexagon by rejection sampling.
pub fn place_nodes<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> (Vec<Point>, Vec<Point>) {
    let b = config.dims.num_rrhs;
    let rrhs = if b == 1 {
        vec![Point { x: 0.0, y: 0.0 }]
    } else {
        let ring = config.cell_diameter_m / 4.0;
        (0..b)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / b as f64;
                Point {
                    x: ring * a.cos(),
                    y: ring * a.sin(),
                }
            })
            .collect()
    };
    let r = config.cell_diameter_m / 2.0;
    let half_h = r * 3f64.sqrt() / 2.0;
    let users = (0..config.dims.num_users)
        .map(|_| loop {
            let p = Point {
                x: rng.random_range(-r..=r),
                y: rng.random_range(-half_h..=half_h),
            };
            if in_hexagon(&p, config.cell_diameter_m) {
                break p;
            }
        })
        .collect();
    (rrhs, users)
}

/// Each (user, file) pair enters Has with probability `has_prob`; Wants is a
/// uniform draw without replacement of `wants_per_user` files from the rest.
pub fn sample_side_info<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<SideInformation> {
    let f = config.dims.num_files;
    let mut has = Vec::with_capacity(config.dims.num_users);
    let mut wants = Vec::with_capacity(config.dims.num_users);
    for _ in 0..config.dims.num_users {
        let h: FileSet = (0..f).filter(|_| rng.random_bool(config.has_prob)).collect();
        let mut rest: Vec<usize> = (0..f).filter(|x| !h.contains(x)).collect();
        let k = config.wants_per_user.min(rest.len());
        let (picked, _) = rest.partial_shuffle(rng, k);
        wants.push(picked.iter().copied().collect());
        has.push(h);
    }
    SideInformation::new(f, has, wants)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub rrh_positions: Vec<Point>,
    pub user_positions: Vec<Point>,
    pub channel: ChannelState,
    pub power: PowerProfile,
    pub capacities: CapacityMatrix,
    pub side_info: SideInformation,
}

// Independent ChaCha streams so that, for one seed, changing the side
// information parameters leaves geometry and channels untouched.
const STREAM_GEOMETRY: u64 = 1;
const STREAM_CHANNEL: u64 = 2;
const STREAM_SIDE_INFO: u64 = 3;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn generate_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let dims = config.dims;
    let (rrh_positions, user_positions) = place_nodes(config, &mut stream(config.rng_seed, STREAM_GEOMETRY));

    let mut rng = stream(config.rng_seed, STREAM_CHANNEL);
    let mut channel = ChannelState::zeros(dims);
    for (b, rrh) in rrh_positions.iter().enumerate() {
        for z in 0..dims.num_rrbs_per_rrh {
            for (u, user) in user_positions.iter().enumerate() {
                let d = rrh.distance(user).max(config.min_distance_m);
                channel.set_gain(b, z, u, channel_gain(&config.path_loss, d, &mut rng)?)?;
            }
        }
    }
    let power = PowerProfile::from_psd(dims, config.tx_psd_dbm_hz, config.noise_psd_dbm_hz, config.bandwidth_hz)?;
    let capacities = capacity_matrix(&channel, &power, dims)?;
    let side_info = sample_side_info(config, &mut stream(config.rng_seed, STREAM_SIDE_INFO))?;
    Ok(Scenario {
        config: config.clone(),
        rrh_positions,
        user_positions,
        channel,
        power,
        capacities,
        side_info,
    })
}

impl Scenario {
    pub fn instance(&self) -> Instance {
        Instance {
            dims: self.config.dims,
            capacities: self.capacities.clone(),
            side_info: self.side_info.clone(),
            file_size_bits: self.config.file_size_bits,
        }
    }

    /// Plain-text dump of everything generated: positions, gains, rates and
    /// side information, one record per line.
    pub fn snapshot(&self) -> String {
        let d = self.config.dims;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "dims {} {} {} {}",
            d.num_rrhs, d.num_rrbs_per_rrh, d.num_users, d.num_files
        );
        let _ = writeln!(out, "seed {}", self.config.rng_seed);
        for (b, p) in self.rrh_positions.iter().enumerate() {
            let _ = writeln!(out, "rrh {b} {} {}", p.x, p.y);
        }
        for (u, p) in self.user_positions.iter().enumerate() {
            let _ = writeln!(out, "user {u} {} {}", p.x, p.y);
        }
        for b in 0..d.num_rrhs {
            for z in 0..d.num_rrbs_per_rrh {
                for u in 0..d.num_users {
                    let _ = writeln!(
                        out,
                        "link {b} {z} {u} {} {}",
                        self.channel.gain(b, z, u),
                        self.capacities.rate(b, z, u)
                    );
                }
            }
        }
        let join = |s: &FileSet| s.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(",");
        for u in 0..d.num_users {
            let _ = writeln!(
                out,
                "side {u} has={} wants={}",
                join(self.side_info.has(u)),
                join(self.side_info.wants(u))
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Instant;

    fn no_shadow() -> PathLossModel {
        PathLossModel {
            shadowing_std_db: 0.0,
            ..PathLossModel::default()
        }
    }

    #[test]
    fn reference_loss_constant() {
        let lambda = 299_792_458.0 / 2.0e9;
        let fs = 20.0 * (4.0 * PI * 100.0 / lambda).log10();
        assert!((fs - DEFAULT_REFERENCE_LOSS_DB).abs() < 1e-9);
    }

    #[test]
    fn loss_at_reference_distance() {
        let m = no_shadow();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(m.sample_loss_db(100.0, &mut rng).unwrap(), m.reference_loss_db);
        let g = channel_gain(&m, 100.0, &mut rng).unwrap();
        assert!((g - 10f64.powf(-m.reference_loss_db / 10.0)).abs() < 1e-22);
    }

    #[test]
    fn decade_slope() {
        let m = no_shadow();
        let d = m.mean_loss_db(1000.0).unwrap() - m.mean_loss_db(100.0).unwrap();
        assert!((d - 40.0).abs() < 1e-9);
        let d = m.mean_loss_db(2500.0).unwrap() - m.mean_loss_db(250.0).unwrap();
        assert!((d - 40.0).abs() < 1e-9);
    }

    #[test]
    fn nonpositive_distance_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(channel_gain(&PathLossModel::default(), 0.0, &mut rng).is_err());
        assert!(channel_gain(&PathLossModel::default(), -3.0, &mut rng).is_err());
    }

    #[test]
    fn shadowing_sample_mean() {
        let m = PathLossModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 10_000;
        let d = 180.0;
        let mean: f64 = (0..n).map(|_| m.sample_loss_db(d, &mut rng).unwrap()).sum::<f64>() / n as f64;
        let expected = m.reference_loss_db + 40.0 * (d / 100.0f64).log10();
        let sigma = m.shadowing_std_db / (n as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * sigma, "mean {mean} expected {expected}");
    }

    #[test]
    fn single_rrh_at_center_and_ring_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut c = ScenarioConfig::default();
        c.dims.num_rrhs = 1;
        let (r, _) = place_nodes(&c, &mut rng);
        assert_eq!(r, vec![Point { x: 0.0, y: 0.0 }]);
        c.dims.num_rrhs = 3;
        let (r, _) = place_nodes(&c, &mut rng);
        let origin = Point { x: 0.0, y: 0.0 };
        for p in &r {
            assert!((p.distance(&origin) - 125.0).abs() < 1e-9);
        }
        for i in 0..3 {
            let (a, b) = (&r[i], &r[(i + 1) % 3]);
            // Chord of a 120° arc on radius 125.
            assert!((a.distance(b) - 125.0 * 3f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn users_uniform_over_hexagon() {
        let mut c = ScenarioConfig::default();
        c.dims.num_users = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (_, users) = place_nodes(&c, &mut rng);
        assert!(users.iter().all(|p| in_hexagon(p, 500.0)));
        let n = users.len() as f64;
        let mx = users.iter().map(|p| p.x).sum::<f64>() / n;
        let my = users.iter().map(|p| p.y).sum::<f64>() / n;
        // Uniform over a regular hexagon of circumradius R: Var(x) = Var(y) = 5R²/24.
        let r: f64 = 250.0;
        let sd = (5.0 * r * r / 24.0).sqrt() / n.sqrt();
        assert!(mx.abs() < 3.0 * sd && my.abs() < 3.0 * sd, "({mx}, {my}) sd {sd}");
    }

    #[test]
    fn side_info_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = ScenarioConfig {
            has_prob: 0.0,
            ..ScenarioConfig::default()
        };
        let si = sample_side_info(&c, &mut rng).unwrap();
        for u in 0..c.dims.num_users {
            assert!(si.has(u).is_empty());
            assert_eq!(si.wants(u).len(), 1);
        }
        c.has_prob = 1.0;
        let si = sample_side_info(&c, &mut rng).unwrap();
        for u in 0..c.dims.num_users {
            assert_eq!(si.has(u).len(), c.dims.num_files);
            assert!(si.wants(u).is_empty());
        }
    }

    #[test]
    fn side_info_disjoint_over_seeds() {
        let mut c = ScenarioConfig {
            wants_per_user: 3,
            ..ScenarioConfig::default()
        };
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            c.has_prob = (seed % 11) as f64 / 10.0;
            let si = sample_side_info(&c, &mut rng).unwrap();
            for u in 0..c.dims.num_users {
                assert!(si.has(u).is_disjoint(si.wants(u)));
                let free = c.dims.num_files - si.has(u).len();
                assert_eq!(si.wants(u).len(), free.min(3));
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let c = ScenarioConfig::default();
        let a = generate_scenario(&c).unwrap();
        let b = generate_scenario(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.snapshot(), b.snapshot());
        let mut c2 = c.clone();
        c2.rng_seed = 2;
        assert_ne!(generate_scenario(&c2).unwrap().user_positions, a.user_positions);
    }

    #[test]
    fn side_info_parameters_do_not_move_users() {
        let c = ScenarioConfig::default();
        let mut c2 = c.clone();
        c2.has_prob = 0.1;
        let a = generate_scenario(&c).unwrap();
        let b = generate_scenario(&c2).unwrap();
        assert_eq!(a.user_positions, b.user_positions);
        assert_eq!(a.capacities, b.capacities);
    }

    #[test]
    fn capacities_finite_and_nonnegative() {
        for seed in 0..50 {
            let c = ScenarioConfig {
                rng_seed: seed,
                ..ScenarioConfig::default()
            };
            let s = generate_scenario(&c).unwrap();
            let d = c.dims;
            for b in 0..d.num_rrhs {
                for z in 0..d.num_rrbs_per_rrh {
                    assert!(s.capacities.column(b, z).iter().all(|r| r.is_finite() && *r >= 0.0));
                }
            }
        }
    }

    #[test]
    fn generation_time_budget() {
        let c = ScenarioConfig::default();
        generate_scenario(&c).unwrap();
        let start = Instant::now();
        for seed in 0..20 {
            generate_scenario(&ScenarioConfig {
                rng_seed: seed,
                ..c.clone()
            })
            .unwrap();
        }
        let per = start.elapsed() / 20;
        assert!(per.as_millis() < 10, "{per:?} per scenario");
    }

    #[test]
    fn config_parsing() {
        let c = ScenarioConfig::from_config_str("num_users = 6\nhas_prob = 0.25\nseed = 9\n").unwrap();
        assert_eq!(c.dims.num_users, 6);
        assert_eq!(c.has_prob, 0.25);
        assert_eq!(c.rng_seed, 9);
        assert_eq!(c.dims.num_rrhs, 3);
        assert!(ScenarioConfig::from_config_str("bogus = 1\n").is_err());
        assert!(ScenarioConfig::from_config_str("has_prob = 1.5\n").is_err());
        assert!(ScenarioConfig::from_config_str("num_users = \"x\"\n").is_err());
    }
}

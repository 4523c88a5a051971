//! Rate-aware instantly decodable network coding for cloud radio access
//! networks.
//!
//! A frame is scheduled by building the CRAN-IDNC graph from per-link
//! capacities and per-user Has/Wants sets ([`graph`]), finding a
//! maximum-weight clique in it ([`clique`]) and reading the clique back as a
//! joint user/RRB association, XOR combination and rate per RRB
//! ([`scheduler`]). [`baselines`] holds the comparison schemes, [`scenario`]
//! draws random cells and [`harness`] runs Monte Carlo sweeps over them.
//!
//! ```
//! use cran_idnc::{fixtures, scheduler::propose_schedule, SolverChoice};
//!
//! let inst = fixtures::fig3();
//! let (schedule, report) = propose_schedule(&inst, SolverChoice::Exact)?;
//! assert_eq!(report.sum_rate, 3.0);
//! assert_eq!(schedule.len(), 2);
//! # Ok::<(), cran_idnc::Error>(())
//! ```

pub mod baselines;
pub mod channel;
pub mod clique;
pub mod decomposed;
mod error;
pub mod fixtures;
pub mod graph;
pub mod harness;
mod instance;
pub mod scenario;
pub mod scheduler;
pub mod sideinfo;

pub use channel::{CapacityMatrix, ChannelState, NetworkDims, PowerProfile};
pub use clique::{CliqueResult, WeightedGraph};
pub use error::{Error, Result};
pub use graph::{CranGraph, GraphKind, Vertex};
pub use instance::Instance;
pub use scenario::{Scenario, ScenarioConfig};
pub use scheduler::{Schedule, ScheduleEntry, SchemeOutcome, Solver, SolverChoice, ThroughputReport};
pub use sideinfo::{EncodedFile, SideInformation};

//! Discrete-time simulation of back-pressure packet scheduling in multi-hop
//! wireless networks.
//!
//! A network is a set of nodes, directed capacitated links, and flows that
//! each follow a fixed multi-hop route. Time advances in slots. Every hop of
//! every flow keeps its own FIFO queue, and an interference relation says
//! which (flow, hop) pairs may be served in the same slot. Four scheduling
//! policies are provided:
//!
//! * `qbp`  – max-weight over queue differentials (classic back-pressure)
//! * `dbp`  – max-weight over head-of-line delay differentials
//! * `qgms` – greedy maximal schedule on queue differentials
//! * `dgms` – greedy maximal schedule on delay differentials
//!
//! The exact policies enumerate every maximal feasible schedule once per
//! network and take a per-slot argmax; the greedy ones scale to instances too
//! large to enumerate. Runs are deterministic: the same scenario, policy,
//! horizon, and seed reproduce the same packets, the same schedules, and
//! byte-identical output files.
//!
//! ```
//! use bpsim::scenario;
//! use bpsim::sched::Policy;
//!
//! let sc = scenario::load("hnet").unwrap().resolve().unwrap();
//! let summary = bpsim::engine::run(
//!     &sc.network,
//!     Policy::Dbp,
//!     2_000,
//!     7,
//!     bpsim::engine::RecordConfig::default(),
//! )
//! .unwrap();
//! assert_eq!(summary.conservation_violations, 0);
//! ```
//!
//! The `examples/` directory is the best starting point: one runnable program
//! per capability (last-packet starvation, throughput sweeps, delay tails,
//! invariant monitoring, programmatic network construction, greedy-vs-exact
//! comparisons). The `bpsim` binary wraps the same machinery behind `run`,
//! `sweep`, and `validate` subcommands.

pub mod engine;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod report;
pub mod scenario;
pub mod sched;
pub mod traffic;

pub use error::{Error, Result};
pub use model::{ConflictGraph, Flow, InterferenceSpec, Link, LinkFlowPair, Network, Topology};
pub use sched::Policy;

//! File-writing entry points behind the command-line interface.
//!
//! Each command resolves a scenario (built-in name or TOML path), applies
//! command-line overrides on top of the scenario defaults, runs the
//! simulation, and writes plot-ready CSV plus a JSON summary that embeds
//! the resolved configuration and seed. Outputs are byte-stable: rerunning
//! a command with the same inputs reproduces the files exactly.

use std::fmt;
use std::fs;
use std::path::PathBuf;

use crate::engine::{run, RecordConfig};
use crate::error::Result;
use crate::metrics::{sweep, RunSummary, SweepConfig, SweepResult};
use crate::report::{run_csv, run_json, run_report, sweep_csv, sweep_json, sweep_report};
use crate::scenario::load;
use crate::sched::{enumerate_maximal_schedules, Policy, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Clone)]
pub struct RunArgs {
    /// Built-in scenario name or path to a scenario TOML file.
    pub scenario: String,
    pub policy: Option<Policy>,
    pub horizon: Option<u64>,
    pub seed: Option<u64>,
    pub trace_stride: Option<u64>,
    /// Output directory; created if missing.
    pub out: PathBuf,
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
    pub summary: RunSummary,
}

/// Simulates one scenario under one policy and writes `timeseries.csv`
/// and `summary.json` into the output directory.
pub fn cmd_run(args: &RunArgs) -> Result<RunArtifacts> {
    let file = load(&args.scenario)?.normalized();
    let scenario = file.resolve()?;
    let policy = args.policy.unwrap_or(scenario.defaults.policy);
    let horizon = args.horizon.unwrap_or(scenario.defaults.horizon);
    let seed = args.seed.unwrap_or(scenario.defaults.seed);
    let stride = args.trace_stride.unwrap_or(scenario.defaults.trace_stride);
    let summary = run(
        &scenario.network,
        policy,
        horizon,
        seed,
        RecordConfig {
            stride,
            pair_traces: true,
        },
    )?;
    fs::create_dir_all(&args.out)?;
    let csv_path = args.out.join("timeseries.csv");
    let json_path = args.out.join("summary.json");
    fs::write(&csv_path, run_csv(&summary))?;
    fs::write(&json_path, run_json(&run_report(&summary, &file)))?;
    Ok(RunArtifacts {
        csv_path,
        json_path,
        summary,
    })
}

#[derive(Debug, Clone)]
pub struct SweepArgs {
    pub scenario: String,
    /// Policies compared on the same arrival sample paths.
    pub policies: Vec<Policy>,
    /// Load multipliers applied to every flow's arrival process.
    pub rhos: Vec<f64>,
    /// Independent runs per (policy, load) point.
    pub runs: u32,
    pub horizon: Option<u64>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

#[derive(Debug)]
pub struct SweepArtifacts {
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
    pub results: Vec<SweepResult>,
}

/// Runs a load sweep for each requested policy and writes `sweep.csv`
/// and `sweep.json` into the output directory.
pub fn cmd_sweep(args: &SweepArgs) -> Result<SweepArtifacts> {
    let file = load(&args.scenario)?.normalized();
    let scenario = file.resolve()?;
    let config = SweepConfig {
        rhos: args.rhos.clone(),
        runs: args.runs,
        horizon: args.horizon.unwrap_or(scenario.defaults.horizon),
        seed: args.seed.unwrap_or(scenario.defaults.seed),
        thresholds: Default::default(),
    };
    let mut results = Vec::with_capacity(args.policies.len());
    for &policy in &args.policies {
        results.push(sweep(&scenario.network, policy, &config)?);
    }
    fs::create_dir_all(&args.out)?;
    let csv_path = args.out.join("sweep.csv");
    let json_path = args.out.join("sweep.json");
    fs::write(&csv_path, sweep_csv(&results))?;
    fs::write(&json_path, sweep_json(&sweep_report(&results, &file)))?;
    Ok(SweepArtifacts {
        csv_path,
        json_path,
        results,
    })
}

/// What `validate` learned about a scenario without simulating it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub scenario: String,
    pub nodes: usize,
    pub links: usize,
    pub flows: usize,
    pub pairs: usize,
    pub conflict_edges: usize,
    pub unit_capacity: bool,
    /// Size of the maximal-schedule catalog, or `None` when the pair count
    /// exceeds the exact-enumeration cap (greedy policies still work).
    pub maximal_schedules: Option<usize>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} is valid", self.scenario)?;
        writeln!(f, "  nodes:            {}", self.nodes)?;
        writeln!(f, "  links:            {}", self.links)?;
        writeln!(f, "  flows:            {}", self.flows)?;
        writeln!(f, "  link-flow pairs:  {}", self.pairs)?;
        writeln!(f, "  conflict edges:   {}", self.conflict_edges)?;
        writeln!(
            f,
            "  unit capacity:    {}",
            if self.unit_capacity { "yes" } else { "no" }
        )?;
        match self.maximal_schedules {
            Some(n) => write!(f, "  maximal schedules: {n}"),
            None => write!(
                f,
                "  maximal schedules: not enumerated ({} pairs exceed the cap of {}; greedy policies only)",
                self.pairs, DEFAULT_ENUMERATION_CAP
            ),
        }
    }
}

/// Parses and validates a scenario, reporting its dimensions and whether
/// exact max-weight policies can enumerate its schedule catalog.
pub fn cmd_validate(source: &str) -> Result<ValidationReport> {
    let file = load(source)?;
    let scenario = file.resolve()?;
    let net = &scenario.network;
    let pairs = net.pairs().len();
    let maximal_schedules = if pairs <= DEFAULT_ENUMERATION_CAP {
        Some(enumerate_maximal_schedules(net.conflicts())?.sets().len())
    } else {
        None
    };
    Ok(ValidationReport {
        scenario: source.to_string(),
        nodes: net.topology().nodes().len(),
        links: net.topology().links().len(),
        flows: net.flows().len(),
        pairs,
        conflict_edges: net.conflicts().edge_count(),
        unit_capacity: net.is_unit_capacity(),
        maximal_schedules,
    })
}

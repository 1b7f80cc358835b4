//! Byte-stable renderings of run and sweep results.
//!
//! CSV files carry the time series (plot-ready); JSON files carry the
//! scalar summaries together with the fully resolved configuration and
//! seed, so every output can be reproduced exactly from its own metadata.
//! Nothing here depends on wall-clock time or map iteration order.

use std::fmt::Write as _;

use serde::Serialize;

use crate::metrics::{
    delay_distribution, stability_ratio, stability_verdict, DelayStats, RunSummary,
    StabilityThresholds, SweepResult, Verdict,
};
use crate::scenario::ScenarioFile;
use crate::sched::Policy;

/// Time-series CSV: one row per recorded slot with the total queue length,
/// then (when recorded) one `q_<pair>` column per queue length and one
/// `w_<pair>` column per HOL sojourn.
pub fn run_csv(summary: &RunSummary) -> String {
    let mut out = String::new();
    out.push_str("slot,total_queue");
    if summary.pair_queue_traces.is_some() {
        for label in &summary.pair_labels {
            let _ = write!(out, ",q_{label}");
        }
    }
    if summary.pair_hol_traces.is_some() {
        for label in &summary.pair_labels {
            let _ = write!(out, ",w_{label}");
        }
    }
    out.push('\n');
    for (i, slot) in summary.recorded_slots.iter().enumerate() {
        let _ = write!(out, "{slot},{}", summary.total_queue_trace[i]);
        if let Some(traces) = &summary.pair_queue_traces {
            for trace in traces {
                let _ = write!(out, ",{}", trace[i]);
            }
        }
        if let Some(traces) = &summary.pair_hol_traces {
            for trace in traces {
                let _ = write!(out, ",{}", trace[i]);
            }
        }
        out.push('\n');
    }
    out
}

/// JSON run summary: resolved configuration, network-wide totals, per-flow
/// counters and delay statistics, per-pair service counters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub totals: RunTotals,
    pub flows: Vec<FlowTotals>,
    pub pairs: Vec<PairTotals>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub policy: Policy,
    pub horizon: u64,
    pub seed: u64,
    pub trace_stride: u64,
    pub scenario: ScenarioFile,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTotals {
    pub mean_total_queue: f64,
    pub final_total_queue: u64,
    /// Last-quarter vs second-quarter queue-mass ratio; null when growth
    /// started from an empty second quarter.
    pub stability_ratio: Option<f64>,
    /// Absent for horizons too short to quarter.
    pub stability_verdict: Option<Verdict>,
    pub conservation_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowTotals {
    pub id: String,
    pub injected: u64,
    pub departed: u64,
    pub in_queue: u64,
    /// Absent when the flow had no departures.
    pub delay: Option<DelayStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTotals {
    pub label: String,
    pub served: u64,
}

/// Assembles the JSON-ready run report. `scenario` should be the normalized
/// form of the file the run was resolved from.
pub fn run_report(summary: &RunSummary, scenario: &ScenarioFile) -> RunReport {
    let thresholds = StabilityThresholds::default();
    let flows = summary
        .flow_ids
        .iter()
        .enumerate()
        .map(|(f, id)| FlowTotals {
            id: id.clone(),
            injected: summary.injected[f],
            departed: summary.departed[f],
            in_queue: summary.in_queue(f),
            delay: delay_distribution(summary, id).ok(),
        })
        .collect();
    let pairs = summary
        .pair_labels
        .iter()
        .enumerate()
        .map(|(p, label)| PairTotals {
            label: label.clone(),
            served: summary.served[p],
        })
        .collect();
    RunReport {
        config: RunConfig {
            policy: summary.policy,
            horizon: summary.horizon,
            seed: summary.seed,
            trace_stride: summary.stride,
            scenario: scenario.clone(),
        },
        totals: RunTotals {
            mean_total_queue: summary.mean_total_queue(),
            final_total_queue: summary.final_total_queue,
            stability_ratio: stability_ratio(&summary.quarter_sums, &summary.quarter_counts),
            stability_verdict: stability_verdict(summary, &thresholds).ok(),
            conservation_violations: summary.conservation_violations,
        },
        flows,
        pairs,
    }
}

pub fn run_json(report: &RunReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serialization");
    text.push('\n');
    text
}

/// Sweep CSV: one row per (policy, load) point.
pub fn sweep_csv(results: &[SweepResult]) -> String {
    let mut out = String::from("policy,rho,runs,mean_total_queue,stderr_total_queue,verdict\n");
    for result in results {
        for point in &result.points {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6},{}",
                result.policy,
                point.rho,
                result.runs,
                point.mean_taq,
                point.stderr_taq,
                point.verdict
            );
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub config: SweepRunConfig,
    pub results: Vec<PolicySweep>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRunConfig {
    pub policies: Vec<Policy>,
    pub rhos: Vec<f64>,
    pub runs: u32,
    pub horizon: u64,
    pub seed: u64,
    pub scenario: ScenarioFile,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicySweep {
    pub policy: Policy,
    pub points: Vec<PointReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub rho: f64,
    pub mean_total_queue: f64,
    pub stderr_total_queue: f64,
    pub per_run_total_queue: Vec<f64>,
    pub verdict: Verdict,
    pub per_run_verdicts: Vec<Verdict>,
}

/// Assembles the JSON-ready sweep report from the per-policy results
/// (which must share grid, runs, horizon, and seed).
pub fn sweep_report(results: &[SweepResult], scenario: &ScenarioFile) -> SweepReport {
    assert!(!results.is_empty(), "at least one policy result required");
    let first = &results[0];
    SweepReport {
        config: SweepRunConfig {
            policies: results.iter().map(|r| r.policy).collect(),
            rhos: first.points.iter().map(|p| p.rho).collect(),
            runs: first.runs,
            horizon: first.horizon,
            seed: first.seed,
            scenario: scenario.clone(),
        },
        results: results
            .iter()
            .map(|result| PolicySweep {
                policy: result.policy,
                points: result
                    .points
                    .iter()
                    .map(|p| PointReport {
                        rho: p.rho,
                        mean_total_queue: p.mean_taq,
                        stderr_total_queue: p.stderr_taq,
                        per_run_total_queue: p.per_run_taq.clone(),
                        verdict: p.verdict,
                        per_run_verdicts: p.per_run_verdicts.clone(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn sweep_json(report: &SweepReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serialization");
    text.push('\n');
    text
}

//! Run statistics: recorded traces, delay distributions, the top-X%
//! percentile, stability verdicts, and multi-run load sweeps.

use serde::Serialize;

use crate::engine::{run, RecordConfig};
use crate::error::{Error, Result};
use crate::model::Network;
use crate::sched::Policy;
use crate::traffic::run_seed;

/// Everything one simulation run leaves behind.
///
/// Traces hold one entry per recorded slot (every `stride` slots plus the
/// final state); the accumulator fields (`total_queue_sum`, quarter sums and
/// counts) cover every slot of the horizon exactly, independent of stride.
/// Per-pair vectors are indexed like the network's pair list, per-flow
/// vectors like its flow list; `flow_ids` and `pair_labels` carry the names.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub policy: Policy,
    pub seed: u64,
    pub horizon: u64,
    pub stride: u64,
    pub flow_ids: Vec<String>,
    pub pair_labels: Vec<String>,
    pub recorded_slots: Vec<u64>,
    pub total_queue_trace: Vec<u64>,
    pub pair_queue_traces: Option<Vec<Vec<u64>>>,
    pub pair_hol_traces: Option<Vec<Vec<u64>>>,
    pub final_total_queue: u64,
    pub total_queue_sum: u128,
    pub quarter_sums: [u128; 4],
    pub quarter_counts: [u64; 4],
    pub injected: Vec<u64>,
    pub served: Vec<u64>,
    pub departed: Vec<u64>,
    pub delays: Vec<Vec<u64>>,
    pub conservation_violations: u64,
}

impl RunSummary {
    /// Exact time average of the total queue length over the whole horizon.
    pub fn mean_total_queue(&self) -> f64 {
        self.total_queue_sum as f64 / self.horizon as f64
    }

    pub fn flow_index(&self, id: &str) -> Option<usize> {
        self.flow_ids.iter().position(|f| f == id)
    }

    /// Packets of flow `f` still queued at the end of the run.
    pub fn in_queue(&self, f: usize) -> u64 {
        self.injected[f] - self.departed[f]
    }
}

/// The delay of the `⌊N·X/100⌋`-th packet (0-based, clamped to the last)
/// when the N samples are sorted largest first; for `N·X/100 < 1` this is
/// the maximum delay.
pub fn top_percent_delay(delays: &[u64], percent: f64) -> Result<u64> {
    if delays.is_empty() {
        return Err(Error::NoSamples);
    }
    if !percent.is_finite() || percent <= 0.0 || percent > 100.0 {
        return Err(Error::InvalidArgument(format!(
            "percent must lie in (0, 100], got {percent}"
        )));
    }
    let mut sorted = delays.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let rank = (sorted.len() as f64 * percent / 100.0).floor() as usize;
    Ok(sorted[rank.min(sorted.len() - 1)])
}

/// Arithmetic mean of the recorded total queue length over slots in
/// `window` (half-open).
pub fn time_averaged_queue(summary: &RunSummary, window: std::ops::Range<u64>) -> Result<f64> {
    let mut sum = 0u128;
    let mut count = 0u64;
    for (i, slot) in summary.recorded_slots.iter().enumerate() {
        if window.contains(slot) {
            sum += summary.total_queue_trace[i] as u128;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyWindow);
    }
    Ok(sum as f64 / count as f64)
}

/// Cutoffs for [`stability_verdict`]'s last-quarter vs second-quarter ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityThresholds {
    /// Ratio above which the run is called unstable.
    pub unstable_ratio: f64,
    /// Ratio below which the run is called stable.
    pub stable_ratio: f64,
}

impl Default for StabilityThresholds {
    fn default() -> Self {
        Self {
            unstable_ratio: 2.0,
            stable_ratio: 1.2,
        }
    }
}

/// Finite-horizon proxy for queue stability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Mean total queue of the last quarter divided by the second quarter's.
/// Both quarters empty of packets → 1 (a quiet network is stable); growth
/// from an exactly-zero second quarter has no finite ratio → `None`.
pub fn stability_ratio(quarter_sums: &[u128; 4], quarter_counts: &[u64; 4]) -> Option<f64> {
    let second = quarter_sums[1] as f64 / quarter_counts[1].max(1) as f64;
    let last = quarter_sums[3] as f64 / quarter_counts[3].max(1) as f64;
    if second == 0.0 {
        if last == 0.0 {
            Some(1.0)
        } else {
            None
        }
    } else {
        Some(last / second)
    }
}

/// Classifies a run by how its queue mass evolved: ratio above
/// `unstable_ratio` (or growth from zero) → unstable, below `stable_ratio`
/// → stable, otherwise inconclusive.
pub fn stability_verdict(
    summary: &RunSummary,
    thresholds: &StabilityThresholds,
) -> Result<Verdict> {
    if summary.horizon < 4 {
        return Err(Error::InvalidArgument(
            "stability verdict needs a horizon of at least 4 slots".into(),
        ));
    }
    Ok(classify(
        stability_ratio(&summary.quarter_sums, &summary.quarter_counts),
        thresholds,
    ))
}

fn classify(ratio: Option<f64>, thresholds: &StabilityThresholds) -> Verdict {
    match ratio {
        None => Verdict::Unstable,
        Some(r) if r > thresholds.unstable_ratio => Verdict::Unstable,
        Some(r) if r < thresholds.stable_ratio => Verdict::Stable,
        Some(_) => Verdict::Inconclusive,
    }
}

/// One histogram cell: delays in `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HistogramBucket {
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
}

/// Empirical end-to-end delay distribution of one flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayStats {
    pub flow: String,
    pub count: usize,
    pub mean: f64,
    pub min: u64,
    pub max: u64,
    pub top1: u64,
    pub top5: u64,
    pub histogram: Vec<HistogramBucket>,
}

const HISTOGRAM_BUCKETS: u64 = 16;

/// Delay distribution of `flow`: mean, extremes, top-1% and top-5% delays,
/// and a 16-bucket linear histogram.
pub fn delay_distribution(summary: &RunSummary, flow: &str) -> Result<DelayStats> {
    let f = summary
        .flow_index(flow)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown flow '{flow}'")))?;
    let delays = &summary.delays[f];
    if delays.is_empty() {
        return Err(Error::NoDepartures {
            flow: flow.to_string(),
        });
    }
    let min = *delays.iter().min().expect("non-empty");
    let max = *delays.iter().max().expect("non-empty");
    let width = (max + 1 - min).div_ceil(HISTOGRAM_BUCKETS).max(1);
    let mut histogram: Vec<HistogramBucket> = (0..HISTOGRAM_BUCKETS)
        .map(|i| HistogramBucket {
            lo: min + i * width,
            hi: min + (i + 1) * width,
            count: 0,
        })
        .collect();
    for &d in delays {
        histogram[((d - min) / width) as usize].count += 1;
    }
    Ok(DelayStats {
        flow: flow.to_string(),
        count: delays.len(),
        mean: delays.iter().sum::<u64>() as f64 / delays.len() as f64,
        min,
        max,
        top1: top_percent_delay(delays, 1.0)?,
        top5: top_percent_delay(delays, 5.0)?,
        histogram,
    })
}

/// Grid and replication plan for [`sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Load scales applied to every flow's arrival intensity.
    pub rhos: Vec<f64>,
    /// Independent runs per grid point.
    pub runs: u32,
    pub horizon: u64,
    /// Base seed; run `i` of every point uses `run_seed(seed, i)`.
    pub seed: u64,
    pub thresholds: StabilityThresholds,
}

/// Aggregates for one load point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub rho: f64,
    /// Mean over runs of the exact per-run time-averaged total queue.
    pub mean_taq: f64,
    /// Standard error of that mean (0 for a single run).
    pub stderr_taq: f64,
    pub per_run_taq: Vec<f64>,
    /// Verdict over the runs pooled together.
    pub verdict: Verdict,
    pub per_run_verdicts: Vec<Verdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub policy: Policy,
    pub horizon: u64,
    pub runs: u32,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Smallest load scale judged unstable, if any point was.
    pub fn smallest_unstable_rho(&self) -> Option<f64> {
        self.points
            .iter()
            .filter(|p| p.verdict == Verdict::Unstable)
            .map(|p| p.rho)
            .fold(None, |acc, rho| Some(acc.map_or(rho, |a: f64| a.min(rho))))
    }
}

/// Runs `config.runs` independent simulations at every load scale in
/// `config.rhos` and aggregates time-averaged queue mass and stability.
/// Run `i` at every point uses the same derived seed, so policies can be
/// compared on identical arrival sequences.
pub fn sweep(net: &Network, policy: Policy, config: &SweepConfig) -> Result<SweepResult> {
    if config.rhos.is_empty() {
        return Err(Error::InvalidArgument("load grid must not be empty".into()));
    }
    if config.runs == 0 {
        return Err(Error::InvalidArgument(
            "runs per point must be at least 1".into(),
        ));
    }
    let mut points = Vec::with_capacity(config.rhos.len());
    for &rho in &config.rhos {
        let scaled = net.with_scaled_arrivals(rho)?;
        let mut per_run_taq = Vec::with_capacity(config.runs as usize);
        let mut per_run_verdicts = Vec::with_capacity(config.runs as usize);
        let mut pooled_sums = [0u128; 4];
        let mut pooled_counts = [0u64; 4];
        for i in 0..config.runs {
            let summary = run(
                &scaled,
                policy,
                config.horizon,
                run_seed(config.seed, i as u64),
                RecordConfig {
                    stride: config.horizon,
                    pair_traces: false,
                },
            )?;
            per_run_taq.push(summary.mean_total_queue());
            per_run_verdicts.push(stability_verdict(&summary, &config.thresholds)?);
            for q in 0..4 {
                pooled_sums[q] += summary.quarter_sums[q];
                pooled_counts[q] += summary.quarter_counts[q];
            }
        }
        let mean_taq = per_run_taq.iter().sum::<f64>() / per_run_taq.len() as f64;
        let stderr_taq = if per_run_taq.len() < 2 {
            0.0
        } else {
            let var = per_run_taq
                .iter()
                .map(|x| (x - mean_taq).powi(2))
                .sum::<f64>()
                / (per_run_taq.len() - 1) as f64;
            (var / per_run_taq.len() as f64).sqrt()
        };
        let verdict = classify(
            stability_ratio(&pooled_sums, &pooled_counts),
            &config.thresholds,
        );
        points.push(SweepPoint {
            rho,
            mean_taq,
            stderr_taq,
            per_run_taq,
            verdict,
            per_run_verdicts,
        });
    }
    Ok(SweepResult {
        policy,
        horizon: config.horizon,
        runs: config.runs,
        seed: config.seed,
        points,
    })
}

//! Sweeps offered load on the 4x4 grid and locates each policy's stability
//! boundary.
//!
//! Every point scales all arrival intensities by the load factor and runs a
//! few replications; a run counts as unstable when the total queue mass of
//! the last quarter clearly outgrows the second quarter. Run `i` uses the
//! same derived seed at every point and under every policy, so the verdicts
//! compare like with like. The sweep is deliberately short — the `sweep`
//! subcommand of the `bpsim` binary does the long version and writes
//! CSV/JSON.
//!
//!     cargo run --release --example throughput_sweep

use bpsim::metrics::{sweep, StabilityThresholds, SweepConfig};
use bpsim::scenario::load;
use bpsim::sched::Policy;

fn main() -> bpsim::Result<()> {
    let scenario = load("grid4x4")?.resolve()?;
    let config = SweepConfig {
        rhos: (1..=12).map(|i| i as f64 * 0.05).collect(),
        runs: 3,
        horizon: 20_000,
        seed: 1,
        thresholds: StabilityThresholds::default(),
    };

    println!(
        "grid4x4, {} runs x {} slots per point, loads {:.2}..{:.2}",
        config.runs,
        config.horizon,
        config.rhos.first().unwrap(),
        config.rhos.last().unwrap()
    );
    for policy in Policy::ALL {
        let result = sweep(&scenario.network, policy, &config)?;
        println!("{policy}:");
        println!(
            "  {:>5}  {:>12}  {:>10}  verdict",
            "load", "mean queue", "stderr"
        );
        for point in &result.points {
            println!(
                "  {:>5.2}  {:>12.2}  {:>10.2}  {}",
                point.rho, point.mean_taq, point.stderr_taq, point.verdict
            );
        }
        match result.smallest_unstable_rho() {
            Some(rho) => println!("  smallest unstable load: {rho:.2}"),
            None => println!("  no point judged unstable"),
        }
    }
    Ok(())
}

//! Compares end-to-end delay tails between queue-differential and
//! delay-differential back-pressure at moderate load.
//!
//! The 4x4 grid scenario carries eight steady flows plus one bursty flow
//! (`fb`) whose packets arrive in occasional files. Queue-differential
//! back-pressure leaves a file's last packets waiting until enough new
//! traffic builds pressure behind them, which stretches the delay tail;
//! delay-differential back-pressure pushes aging packets out instead. Both
//! policies see identical arrival sample paths per run, so the comparison
//! is paired.
//!
//!     cargo run --release --example delay_tail

use bpsim::engine::{run, RecordConfig};
use bpsim::metrics::delay_distribution;
use bpsim::scenario::load;
use bpsim::sched::Policy;
use bpsim::traffic::run_seed;

const LOAD: f64 = 0.2;
const HORIZON: u64 = 100_000;
const BASE_SEED: u64 = 1;
const RUNS: u64 = 10;
const FLOW: &str = "fb";

fn main() -> bpsim::Result<()> {
    let scenario = load("grid4x4")?.resolve()?;
    let net = scenario.network.with_scaled_arrivals(LOAD)?;
    let record = RecordConfig {
        stride: HORIZON,
        pair_traces: false,
    };

    println!("bursty flow '{FLOW}' at load {LOAD}, {HORIZON} slots, {RUNS} paired runs");
    println!(
        "{:>4}  {:>10} {:>8} {:>8}   {:>10} {:>8} {:>8}",
        "run", "qbp mean", "top5%", "top1%", "dbp mean", "top5%", "top1%"
    );

    let mut wins = 0;
    for i in 0..RUNS {
        let seed = run_seed(BASE_SEED, i);
        let q = delay_distribution(&run(&net, Policy::Qbp, HORIZON, seed, record)?, FLOW)?;
        let d = delay_distribution(&run(&net, Policy::Dbp, HORIZON, seed, record)?, FLOW)?;
        let win = d.mean < q.mean && d.top5 < q.top5 && d.top1 < q.top1;
        wins += win as u32;
        println!(
            "{:>4}  {:>10.3} {:>8} {:>8}   {:>10.3} {:>8} {:>8}  {}",
            i,
            q.mean,
            q.top5,
            q.top1,
            d.mean,
            d.top5,
            d.top1,
            if win { "dbp wins" } else { "" }
        );
    }
    println!("dbp beats qbp on mean, top-5%, and top-1% in {wins}/{RUNS} runs");
    Ok(())
}

//! Reproduces last-packet starvation on the H-shaped scenario.
//!
//! A finite batch enters the short crossing flow (`2→4→6`) at slot 0 while
//! two heavy Poisson flows keep pressure on the flanks. Under 2-hop
//! interference the short flow's links are only ever schedulable alone, so
//! queue-differential back-pressure stops favoring the batch the moment the
//! heavy backlogs dominate its bounded queue differential: the remaining
//! packets sit at the head of line for the rest of the run.
//! Delay-differential back-pressure weighs sojourn times instead of counts,
//! and a waiting packet's weight grows every slot, so the batch drains
//! within a handful of slots.
//!
//!     cargo run --release --example last_packet

use bpsim::engine::{run, RecordConfig};
use bpsim::scenario::load;
use bpsim::sched::Policy;

const HORIZON: u64 = 100_000;
const SEED: u64 = 1;

fn main() -> bpsim::Result<()> {
    let scenario = load("hnet")?.resolve()?;
    let net = &scenario.network;
    let record = RecordConfig {
        stride: 1_000,
        pair_traces: true,
    };

    println!("flow 'short': one batch at slot 0, nothing after; horizon {HORIZON}, seed {SEED}");
    println!(
        "{:>6}  {:>8} {:>8} {:>9} {:>22}",
        "policy", "injected", "departed", "stranded", "final head-of-line age"
    );
    for policy in [Policy::Qbp, Policy::Dbp] {
        let s = run(net, policy, HORIZON, SEED, record)?;
        let f = s
            .flow_index("short")
            .expect("scenario defines flow 'short'");
        let hol = s
            .pair_hol_traces
            .as_ref()
            .expect("pair traces were recorded");
        let first = s
            .pair_labels
            .iter()
            .position(|l| l == "short_1")
            .expect("pair short_1");
        let final_age = *hol[first].last().expect("at least one recorded slot");
        println!(
            "{:>6}  {:>8} {:>8} {:>9} {:>16} slots",
            policy,
            s.injected[f],
            s.departed[f],
            s.in_queue(f),
            final_age
        );
    }
    println!("(an age equal to the horizon means the batch's head packet never moved again)");
    Ok(())
}

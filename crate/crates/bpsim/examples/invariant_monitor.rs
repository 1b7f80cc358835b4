//! Checks the per-slot bounds the policies maintain on unit-capacity
//! networks, and shows the monitor firing on a state that breaks them.
//!
//! On unit-capacity links, queue-differential back-pressure keeps every
//! hop's queue within 2 of its successor (`Q_k ≥ Q_{k+1} − 2`), and
//! delay-differential back-pressure keeps hop delays similarly coupled
//! (`Ŵ_k ≥ Ŵ_{k+1} − 2·B_k`, with `B_k` the entry gap to the flow's next
//! packet). The delay bound is a property of batch-loaded runs — all
//! traffic present in the first queue at slot 0 — so that part of the demo
//! uses a batch arrival.
//!
//!     cargo run --release --example invariant_monitor

use std::collections::VecDeque;

use bpsim::engine::{InvariantMonitor, Packet, QueueState, Simulation};
use bpsim::model::{Flow, InterferenceSpec, Link, Network, Topology};
use bpsim::sched::Policy;
use bpsim::traffic::ArrivalSpec;

const HORIZON: u64 = 10_000;
const SEED: u64 = 7;

fn chain(hops: u32, arrival: ArrivalSpec) -> bpsim::Result<Network> {
    let nodes: Vec<u32> = (1..=hops + 1).collect();
    let links: Vec<Link> = (1..=hops)
        .map(|i| Link {
            src: i,
            dst: i + 1,
            capacity: 1,
        })
        .collect();
    let topology = Topology::new(nodes.clone(), links)?;
    let flow = Flow::from_node_route(&topology, "f", &nodes, arrival)?;
    Network::build(topology, vec![flow], &InterferenceSpec::KHop { k: 1 })
}

fn watch(net: &Network, policy: Policy) -> bpsim::Result<usize> {
    let mut sim = Simulation::new(net, policy, SEED)?;
    let mut monitor = InvariantMonitor::new(net, policy)?;
    for _ in 0..HORIZON {
        monitor.observe(sim.state());
        sim.step()?;
    }
    monitor.observe(sim.state());
    Ok(monitor.violations().len())
}

fn main() -> bpsim::Result<()> {
    let poisson = chain(4, ArrivalSpec::Poisson { rate: 0.3 })?;
    let n = watch(&poisson, Policy::Qbp)?;
    println!("qbp on a 4-hop chain, Poisson arrivals, {HORIZON} slots: {n} queue-bound violations");

    let batch = chain(4, ArrivalSpec::Batch { mean: 40.0 })?;
    let n = watch(&batch, Policy::Dbp)?;
    println!(
        "dbp on a 4-hop chain, one batch at slot 0, {HORIZON} slots: {n} delay-bound violations"
    );

    // A state no run of the policy produces: the downstream packet entered
    // nine slots before its predecessor's whole queue, so the hop delays
    // decouple and the monitor must flag pair 0.
    let planted = chain(2, ArrivalSpec::Poisson { rate: 0.0 })?;
    let state = QueueState::from_queues(
        vec![
            VecDeque::from([
                Packet {
                    flow: 0,
                    entry_slot: 9,
                },
                Packet {
                    flow: 0,
                    entry_slot: 10,
                },
            ]),
            VecDeque::from([Packet {
                flow: 0,
                entry_slot: 0,
            }]),
        ],
        10,
    );
    let mut monitor = InvariantMonitor::new(&planted, Policy::Dbp)?;
    monitor.observe(&state);
    for v in monitor.violations() {
        println!(
            "planted state: pair {} at slot {} breaks the delay bound ({} < {})",
            v.pair, v.slot, v.lhs, v.rhs
        );
    }
    Ok(())
}

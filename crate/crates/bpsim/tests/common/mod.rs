//! Seeded random instance generators shared by the integration tests.
#![allow(dead_code)]

use bpsim::model::{ConflictGraph, Flow, InterferenceSpec, Link, Network, Topology};
use bpsim::traffic::ArrivalSpec;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random conflict graph with `n` pairs and independent edges.
pub fn random_conflict_graph(rng: &mut ChaCha8Rng, n: usize, edge_prob: f64) -> ConflictGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < edge_prob {
                edges.push((i, j));
            }
        }
    }
    ConflictGraph::from_edges(n, &edges).unwrap()
}

pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    (0..n).map(|_| rng.random_range(-10..=10)).collect()
}

/// Random multi-hop network: a connected undirected node graph, 2–4 flows
/// routed along loop-free random walks, Poisson arrivals, and distance-based
/// interference. With `unit_capacity` every link has capacity 1 (the regime
/// the per-slot invariant monitors are stated for); otherwise capacities are
/// drawn from 1..=3.
pub fn random_network(seed: u64, unit_capacity: bool) -> Network {
    random_network_with(seed, unit_capacity, false)
}

/// Like [`random_network`] with unit capacities, but every flow's traffic is
/// a single batch injected in slot 0 — the loading pattern the delay-policy
/// hop-delay bound is stated for.
pub fn batch_loaded_network(seed: u64) -> Network {
    random_network_with(seed, true, true)
}

fn random_network_with(seed: u64, unit_capacity: bool, batch_arrivals: bool) -> Network {
    let mut rng = rng(seed);
    let n_nodes: u32 = rng.random_range(5..=8);
    let nodes: Vec<u32> = (1..=n_nodes).collect();

    // Random spanning tree plus a few extra undirected edges.
    let mut undirected: Vec<(u32, u32)> = Vec::new();
    let mut order: Vec<u32> = nodes.clone();
    order.shuffle(&mut rng);
    for i in 1..order.len() {
        let parent = order[rng.random_range(0..i)];
        undirected.push((order[i].min(parent), order[i].max(parent)));
    }
    for _ in 0..rng.random_range(0..=3) {
        let a = nodes[rng.random_range(0..nodes.len())];
        let b = nodes[rng.random_range(0..nodes.len())];
        let e = (a.min(b), a.max(b));
        if a != b && !undirected.contains(&e) {
            undirected.push(e);
        }
    }
    let neighbors = |node: u32| -> Vec<u32> {
        let mut out: Vec<u32> = undirected
            .iter()
            .filter_map(|&(a, b)| {
                if a == node {
                    Some(b)
                } else if b == node {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    };

    // Flows are loop-free random walks; links are created on first use so
    // every declared link carries traffic.
    let mut links: Vec<Link> = Vec::new();
    let link_id = |links: &mut Vec<Link>, src: u32, dst: u32, cap: u32| -> usize {
        if let Some(i) = links.iter().position(|l| l.src == src && l.dst == dst) {
            i
        } else {
            links.push(Link {
                src,
                dst,
                capacity: cap,
            });
            links.len() - 1
        }
    };
    let n_flows = rng.random_range(2..=4);
    let mut routes: Vec<(Vec<usize>, f64)> = Vec::new();
    for _ in 0..n_flows {
        let route = loop {
            let mut at = nodes[rng.random_range(0..nodes.len())];
            let mut visited = vec![at];
            let target_hops = rng.random_range(2..=4);
            while visited.len() <= target_hops {
                let options: Vec<u32> = neighbors(at)
                    .into_iter()
                    .filter(|n| !visited.contains(n))
                    .collect();
                match options.as_slice() {
                    [] => break,
                    opts => {
                        at = opts[rng.random_range(0..opts.len())];
                        visited.push(at);
                    }
                }
            }
            if visited.len() >= 3 {
                break visited;
            }
        };
        let mut hops = Vec::new();
        for w in route.windows(2) {
            let cap = if unit_capacity {
                1
            } else {
                rng.random_range(1..=3)
            };
            hops.push(link_id(&mut links, w[0], w[1], cap));
        }
        routes.push((hops, rng.random_range(0.05..0.30)));
    }

    let topology = Topology::new(nodes, links).unwrap();
    let flows: Vec<Flow> = routes
        .into_iter()
        .enumerate()
        .map(|(f, (hops, rate))| {
            let arrival = if batch_arrivals {
                ArrivalSpec::Batch {
                    mean: rng.random_range(50.0..300.0),
                }
            } else {
                ArrivalSpec::Poisson { rate }
            };
            Flow::new(&topology, format!("f{f}"), hops, arrival).unwrap()
        })
        .collect();
    let k = rng.random_range(1..=2);
    Network::build(topology, flows, &InterferenceSpec::KHop { k }).unwrap()
}

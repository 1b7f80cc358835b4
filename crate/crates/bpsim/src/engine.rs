//! Slot-by-slot simulation: weigh, schedule, serve, forward, inject.
//!
//! Within a slot `t` the engine observes queue state as of the start of the
//! slot, lets the policy pick a schedule, serves each active pair FIFO up to
//! its link capacity, forwards served packets one hop (never two hops in one
//! slot), and finally injects slot-`t` arrivals at each flow's first hop.
//! Arrivals therefore become visible at slot `t + 1`, and a packet leaving
//! the network during slot `t` departs with end-to-end delay
//! `(t + 1) − entry_slot`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::metrics::RunSummary;
use crate::model::Network;
use crate::sched::{
    enumerate_maximal_schedules, greedy_maximal_select, maxweight_select, Policy, Schedule,
    ScheduleCatalog, WeightVector,
};
use crate::traffic::{ArrivalProcess, RngStream};

/// One packet in flight. Identified by its flow and network-entry slot only;
/// position encodes everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packet {
    pub flow: u32,
    pub entry_slot: u64,
}

/// FIFO queues for every pair plus the current slot number.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueState {
    queues: Vec<VecDeque<Packet>>,
    slot: u64,
}

impl QueueState {
    pub fn empty(pair_count: usize) -> Self {
        Self {
            queues: (0..pair_count).map(|_| VecDeque::new()).collect(),
            slot: 0,
        }
    }

    /// Builds an arbitrary state, e.g. to probe the invariant monitor.
    pub fn from_queues(queues: Vec<VecDeque<Packet>>, slot: u64) -> Self {
        Self { queues, slot }
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn pair_count(&self) -> usize {
        self.queues.len()
    }

    pub fn len(&self, p: usize) -> u64 {
        self.queues[p].len() as u64
    }

    pub fn lengths(&self) -> Vec<u64> {
        self.queues.iter().map(|q| q.len() as u64).collect()
    }

    pub fn total(&self) -> u64 {
        self.queues.iter().map(|q| q.len() as u64).sum()
    }

    /// Head-of-line packet of pair `p`.
    pub fn hol(&self, p: usize) -> Option<&Packet> {
        self.queues[p].front()
    }

    /// Packet queued directly behind the head of line.
    pub fn follower(&self, p: usize) -> Option<&Packet> {
        self.queues[p].get(1)
    }
}

/// Queue differentials: `w = Q_current − Q_next`, with 0 after the last hop.
pub fn compute_qbp_weights(net: &Network, state: &QueueState) -> WeightVector {
    (0..net.pair_count())
        .map(|p| {
            let next = net.next_pair(p).map_or(0, |np| state.len(np));
            state.len(p) as i64 - next as i64
        })
        .collect()
}

/// Per-pair delay quantities for one observed slot.
///
/// `hol_sojourn` is the slots since the HOL packet entered the network, with
/// empty queues inheriting the previous hop's value (0 at the source).
/// `hop_delay` is its per-hop increment, `delay_diff` the differential fed to
/// the delay-based policies (0 beyond the last hop), and `follower_gap` the
/// network-entry gap between the HOL packet and the one behind it (0 with
/// fewer than two packets queued).
#[derive(Debug, Clone, PartialEq)]
pub struct DelayView {
    pub hol_sojourn: Vec<u64>,
    pub hop_delay: Vec<u64>,
    pub delay_diff: Vec<i64>,
    pub follower_gap: Vec<u64>,
}

pub fn compute_delay_view(net: &Network, state: &QueueState) -> DelayView {
    let n = net.pair_count();
    let t = state.slot();
    let mut hol_sojourn = vec![0u64; n];
    let mut hop_delay = vec![0u64; n];
    let mut delay_diff = vec![0i64; n];
    let mut follower_gap = vec![0u64; n];
    for f in 0..net.flow_count() {
        let range = net.flow_pairs(f);
        let mut w_prev = 0u64;
        for p in range.clone() {
            let w = match state.hol(p) {
                Some(pkt) => t.saturating_sub(pkt.entry_slot),
                None => w_prev,
            };
            debug_assert!(w >= w_prev, "HOL sojourn must not decrease along the route");
            hol_sojourn[p] = w;
            hop_delay[p] = w.saturating_sub(w_prev);
            w_prev = w;
        }
        for p in range {
            let next_hop_delay = net.next_pair(p).map_or(0, |np| hop_delay[np]);
            delay_diff[p] = hop_delay[p] as i64 - next_hop_delay as i64;
            if let (Some(hol), Some(follower)) = (state.hol(p), state.follower(p)) {
                follower_gap[p] = follower.entry_slot.saturating_sub(hol.entry_slot);
            }
        }
    }
    DelayView {
        hol_sojourn,
        hop_delay,
        delay_diff,
        follower_gap,
    }
}

/// Delay differentials: the weight vector for the delay-based policies.
pub fn compute_dbp_weights(net: &Network, state: &QueueState) -> WeightVector {
    compute_delay_view(net, state).delay_diff
}

/// What happened in one slot: the chosen schedule, packets actually moved
/// per pair, and arrivals injected per flow.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotDecision {
    pub slot: u64,
    pub schedule: Schedule,
    pub service: Vec<u64>,
    pub arrivals: Vec<u64>,
}

/// Applies one slot transition to `state`: serves
/// `min(capacity, queue length)` packets FIFO from every active pair,
/// forwards them one hop (calling `on_depart(flow, delay)` for packets
/// leaving the network), injects `arrivals[f]` packets at each flow's first
/// hop stamped with the current slot, and advances the clock. Queue lengths
/// obey `Q(t+1) = Q(t) + Ψ_in − Ψ_out` exactly.
pub fn advance(
    state: &mut QueueState,
    net: &Network,
    schedule: &Schedule,
    arrivals: &[u64],
    mut on_depart: impl FnMut(usize, u64),
) -> SlotDecision {
    let n = net.pair_count();
    assert_eq!(
        schedule.pair_count(),
        n,
        "schedule width must match pair count"
    );
    assert_eq!(
        arrivals.len(),
        net.flow_count(),
        "arrivals must be per flow"
    );
    debug_assert!(schedule.is_feasible(net.conflicts()));
    let t = state.slot;
    let mut service = vec![0u64; n];
    // Serve last hops first so a forwarded packet cannot be served again
    // within the same slot.
    for p in (0..n).rev() {
        if !schedule.is_active(p) {
            continue;
        }
        let cap = net.pairs()[p].capacity as u64;
        let moved = cap.min(state.queues[p].len() as u64);
        service[p] = moved;
        match net.next_pair(p) {
            Some(np) => {
                for _ in 0..moved {
                    let pkt = state.queues[p].pop_front().expect("length checked");
                    state.queues[np].push_back(pkt);
                }
            }
            None => {
                for _ in 0..moved {
                    let pkt = state.queues[p].pop_front().expect("length checked");
                    on_depart(pkt.flow as usize, (t + 1) - pkt.entry_slot);
                }
            }
        }
    }
    for (f, &count) in arrivals.iter().enumerate() {
        let first = net.flow_pairs(f).start;
        for _ in 0..count {
            state.queues[first].push_back(Packet {
                flow: f as u32,
                entry_slot: t,
            });
        }
    }
    state.slot = t + 1;
    SlotDecision {
        slot: t,
        schedule: schedule.clone(),
        service,
        arrivals: arrivals.to_vec(),
    }
}

/// A single run in progress: network, policy machinery, RNG-backed arrival
/// processes, and cumulative counters.
pub struct Simulation<'n> {
    net: &'n Network,
    policy: Policy,
    state: QueueState,
    catalog: Option<ScheduleCatalog>,
    arrivals: Vec<ArrivalProcess>,
    injected: Vec<u64>,
    served: Vec<u64>,
    departed: Vec<u64>,
    delays: Vec<Vec<u64>>,
    conservation_violations: u64,
}

impl<'n> Simulation<'n> {
    /// Prepares a run. Exact policies precompute the schedule catalog here
    /// and fail fast when the network exceeds the enumeration cap; flow `f`
    /// draws arrivals from stream `f` of `seed`.
    pub fn new(net: &'n Network, policy: Policy, seed: u64) -> Result<Self> {
        let catalog = if policy.exact() && net.pair_count() > 0 {
            Some(enumerate_maximal_schedules(net.conflicts())?)
        } else {
            None
        };
        let arrivals = net
            .flows()
            .iter()
            .enumerate()
            .map(|(f, flow)| {
                ArrivalProcess::new(
                    flow.arrival.clone(),
                    RngStream {
                        seed,
                        stream: f as u64,
                    },
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let flows = net.flow_count();
        Ok(Self {
            net,
            policy,
            state: QueueState::empty(net.pair_count()),
            catalog,
            arrivals,
            injected: vec![0; flows],
            served: vec![0; net.pair_count()],
            departed: vec![0; flows],
            delays: vec![Vec::new(); flows],
            conservation_violations: 0,
        })
    }

    pub fn network(&self) -> &Network {
        self.net
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn state(&self) -> &QueueState {
        &self.state
    }

    /// Cumulative arrivals per flow.
    pub fn injected(&self) -> &[u64] {
        &self.injected
    }

    /// Cumulative packets moved per pair.
    pub fn served(&self) -> &[u64] {
        &self.served
    }

    /// Cumulative departures per flow.
    pub fn departed(&self) -> &[u64] {
        &self.departed
    }

    /// End-to-end delay samples per flow, in departure order.
    pub fn delays(&self) -> &[Vec<u64>] {
        &self.delays
    }

    /// Slots where a per-pair or per-flow accounting identity failed. Always
    /// 0 unless the engine itself is broken.
    pub fn conservation_violations(&self) -> u64 {
        self.conservation_violations
    }

    /// Weight vector the policy would act on right now.
    pub fn weights(&self) -> WeightVector {
        if self.policy.queue_weighted() {
            compute_qbp_weights(self.net, &self.state)
        } else {
            compute_dbp_weights(self.net, &self.state)
        }
    }

    fn select(&self, weights: &[i64]) -> Result<Schedule> {
        if self.net.pair_count() == 0 {
            return Ok(Schedule::empty(0));
        }
        match &self.catalog {
            Some(catalog) => maxweight_select(weights, catalog),
            None => Ok(greedy_maximal_select(weights, self.net.conflicts())),
        }
    }

    /// Runs one slot and reports what happened.
    pub fn step(&mut self) -> Result<SlotDecision> {
        let weights = self.weights();
        let schedule = self.select(&weights)?;
        let slot = self.state.slot;
        let arrivals: Vec<u64> = self
            .arrivals
            .iter_mut()
            .map(|proc| proc.sample(slot))
            .collect();
        let before = self.state.lengths();
        let delays = &mut self.delays;
        let departed = &mut self.departed;
        let decision = advance(
            &mut self.state,
            self.net,
            &schedule,
            &arrivals,
            |flow, delay| {
                delays[flow].push(delay);
                departed[flow] += 1;
            },
        );
        for (f, &count) in arrivals.iter().enumerate() {
            self.injected[f] += count;
        }
        for (p, &moved) in decision.service.iter().enumerate() {
            self.served[p] += moved;
        }
        self.check_accounting(&before, &decision);
        Ok(decision)
    }

    /// Verifies the queue-evolution identity pairwise and flow conservation,
    /// counting any failure.
    fn check_accounting(&mut self, before: &[u64], decision: &SlotDecision) {
        for (p, &queued) in before.iter().enumerate() {
            let inflow = match self.net.pairs()[p].hop {
                1 => decision.arrivals[self.net.pair_flow(p)],
                _ => decision.service[p - 1],
            };
            let expected = (queued + inflow).checked_sub(decision.service[p]);
            if expected != Some(self.state.len(p)) {
                self.conservation_violations += 1;
            }
        }
        for f in 0..self.net.flow_count() {
            let in_queue: u64 = self.net.flow_pairs(f).map(|p| self.state.len(p)).sum();
            if self.injected[f] != in_queue + self.departed[f] {
                self.conservation_violations += 1;
            }
        }
    }
}

/// What [`run`] records beyond the always-on counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordConfig {
    /// Snapshot every `stride` slots (plus the final state).
    pub stride: u64,
    /// Also keep per-pair queue-length and HOL-sojourn traces.
    pub pair_traces: bool,
}

impl Default for RecordConfig {
    fn default() -> Self {
        Self {
            stride: 1,
            pair_traces: true,
        }
    }
}

/// Simulates `horizon` slots from an empty network and collects a
/// [`RunSummary`]. Snapshots are taken at slot starts every `record.stride`
/// slots and after the final slot; the total-queue accumulator and quarter
/// sums cover every slot start exactly regardless of stride.
pub fn run(
    net: &Network,
    policy: Policy,
    horizon: u64,
    seed: u64,
    record: RecordConfig,
) -> Result<RunSummary> {
    if horizon == 0 {
        return Err(Error::InvalidArgument(
            "horizon must be at least 1 slot".into(),
        ));
    }
    if record.stride == 0 {
        return Err(Error::InvalidArgument(
            "trace stride must be at least 1".into(),
        ));
    }
    let mut sim = Simulation::new(net, policy, seed)?;
    let n = net.pair_count();
    let mut recorded_slots = Vec::new();
    let mut total_queue_trace = Vec::new();
    let mut pair_queue_traces = record.pair_traces.then(|| vec![Vec::new(); n]);
    let mut pair_hol_traces = record.pair_traces.then(|| vec![Vec::new(); n]);
    let mut total_queue_sum = 0u128;
    let mut quarter_sums = [0u128; 4];
    let mut quarter_counts = [0u64; 4];

    let snapshot = |sim: &Simulation,
                    recorded_slots: &mut Vec<u64>,
                    total_queue_trace: &mut Vec<u64>,
                    pair_queue_traces: &mut Option<Vec<Vec<u64>>>,
                    pair_hol_traces: &mut Option<Vec<Vec<u64>>>| {
        recorded_slots.push(sim.state().slot());
        total_queue_trace.push(sim.state().total());
        if let Some(traces) = pair_queue_traces {
            for (p, trace) in traces.iter_mut().enumerate() {
                trace.push(sim.state().len(p));
            }
        }
        if let Some(traces) = pair_hol_traces {
            let view = compute_delay_view(net, sim.state());
            for (p, trace) in traces.iter_mut().enumerate() {
                trace.push(view.hol_sojourn[p]);
            }
        }
    };

    for t in 0..horizon {
        if t % record.stride == 0 {
            snapshot(
                &sim,
                &mut recorded_slots,
                &mut total_queue_trace,
                &mut pair_queue_traces,
                &mut pair_hol_traces,
            );
        }
        let total = sim.state().total();
        total_queue_sum += total as u128;
        let quarter = (t * 4 / horizon) as usize;
        quarter_sums[quarter] += total as u128;
        quarter_counts[quarter] += 1;
        sim.step()?;
    }
    snapshot(
        &sim,
        &mut recorded_slots,
        &mut total_queue_trace,
        &mut pair_queue_traces,
        &mut pair_hol_traces,
    );

    Ok(RunSummary {
        policy,
        seed,
        horizon,
        stride: record.stride,
        flow_ids: net.flows().iter().map(|f| f.id.clone()).collect(),
        pair_labels: (0..n).map(|p| net.pair_label(p)).collect(),
        recorded_slots,
        total_queue_trace,
        pair_queue_traces,
        pair_hol_traces,
        final_total_queue: sim.state().total(),
        total_queue_sum,
        quarter_sums,
        quarter_counts,
        injected: sim.injected.clone(),
        served: sim.served.clone(),
        departed: sim.departed.clone(),
        delays: sim.delays.clone(),
        conservation_violations: sim.conservation_violations,
    })
}

/// One breached bound: at `slot`, pair `pair` had `lhs < rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub slot: u64,
    pub pair: usize,
    pub lhs: i64,
    pub rhs: i64,
}

/// Checks the per-slot monotonicity bounds the scheduling policies maintain
/// on unit-capacity networks: queue-weighted policies keep
/// `Q_k ≥ Q_{k+1} − 2`, delay-weighted policies keep
/// `Ŵ_k ≥ Ŵ_{k+1} − 2·B_k` (quantities beyond the last hop read as 0).
///
/// `B_k` is the network-entry gap between the pair's HOL packet and the
/// flow's next packet in arrival order: the in-queue follower when the
/// queue holds two or more packets, otherwise the oldest packet waiting at
/// an upstream hop. A pair whose queue is empty, or whose HOL packet is
/// the flow's youngest anywhere in the network, has no measurable gap —
/// the bound's relaxation term is unbounded until the next packet actually
/// arrives — so the delay check skips it for that slot.
pub struct InvariantMonitor<'n> {
    net: &'n Network,
    queue_weighted: bool,
    violations: Vec<Violation>,
}

impl<'n> InvariantMonitor<'n> {
    /// Refuses networks with any capacity above 1: the bounds' constants
    /// assume single-packet service.
    pub fn new(net: &'n Network, policy: Policy) -> Result<Self> {
        if !net.is_unit_capacity() {
            return Err(Error::NonUnitCapacity);
        }
        Ok(Self {
            net,
            queue_weighted: policy.queue_weighted(),
            violations: Vec::new(),
        })
    }

    /// Checks every pair's bound in the observed state, recording breaches.
    pub fn observe(&mut self, state: &QueueState) {
        let slot = state.slot();
        if self.queue_weighted {
            for p in 0..self.net.pair_count() {
                let lhs = state.len(p) as i64;
                let next = self.net.next_pair(p).map_or(0, |np| state.len(np)) as i64;
                let rhs = next - 2;
                if lhs < rhs {
                    self.violations.push(Violation {
                        slot,
                        pair: p,
                        lhs,
                        rhs,
                    });
                }
            }
        } else {
            let view = compute_delay_view(self.net, state);
            for p in 0..self.net.pair_count() {
                let Some(hol) = state.hol(p) else { continue };
                let successor_entry = state.follower(p).map(|pk| pk.entry_slot).or_else(|| {
                    let first = self.net.flow_pairs(self.net.pair_flow(p)).start;
                    (first..p)
                        .rev()
                        .find_map(|up| state.hol(up).map(|pk| pk.entry_slot))
                });
                let Some(successor_entry) = successor_entry else {
                    continue;
                };
                let gap = successor_entry.saturating_sub(hol.entry_slot);
                let lhs = view.hop_delay[p] as i64;
                let next = self.net.next_pair(p).map_or(0, |np| view.hop_delay[np]) as i64;
                let rhs = next - 2 * gap as i64;
                if lhs < rhs {
                    self.violations.push(Violation {
                        slot,
                        pair: p,
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Flow, InterferenceSpec, Link, Network, Topology};
    use crate::traffic::ArrivalSpec;

    fn chain_network(hops: usize, capacity: u32, arrival: ArrivalSpec, k: u32) -> Network {
        let nodes: Vec<u32> = (1..=hops as u32 + 1).collect();
        let links: Vec<Link> = (1..=hops as u32)
            .map(|i| Link {
                src: i,
                dst: i + 1,
                capacity,
            })
            .collect();
        let topo = Topology::new(nodes.clone(), links).unwrap();
        let flow = Flow::from_node_route(&topo, "f", &nodes, arrival).unwrap();
        Network::build(topo, vec![flow], &InterferenceSpec::KHop { k }).unwrap()
    }

    fn zero() -> ArrivalSpec {
        ArrivalSpec::Poisson { rate: 0.0 }
    }

    /// Chain with no interference at all, so any activation is feasible.
    fn free_chain(hops: usize, capacity: u32) -> Network {
        let nodes: Vec<u32> = (1..=hops as u32 + 1).collect();
        let links: Vec<Link> = (1..=hops as u32)
            .map(|i| Link {
                src: i,
                dst: i + 1,
                capacity,
            })
            .collect();
        let topo = Topology::new(nodes.clone(), links).unwrap();
        let flow = Flow::from_node_route(&topo, "f", &nodes, zero()).unwrap();
        Network::build(
            topo,
            vec![flow],
            &InterferenceSpec::Explicit { conflicts: vec![] },
        )
        .unwrap()
    }

    fn state_with(net: &Network, lens_entries: &[Vec<u64>], slot: u64) -> QueueState {
        let queues = lens_entries
            .iter()
            .enumerate()
            .map(|(p, entries)| {
                entries
                    .iter()
                    .map(|&e| Packet {
                        flow: net.pair_flow(p) as u32,
                        entry_slot: e,
                    })
                    .collect()
            })
            .collect();
        QueueState::from_queues(queues, slot)
    }

    #[test]
    fn queue_differentials_use_zero_after_last_hop() {
        let net = chain_network(2, 1, zero(), 1);
        let state = state_with(&net, &[vec![0; 5], vec![0; 3]], 10);
        assert_eq!(compute_qbp_weights(&net, &state), vec![2, 3]);
        let state = state_with(&net, &[vec![], vec![0; 4]], 10);
        assert_eq!(compute_qbp_weights(&net, &state), vec![-4, 4]);

        let single = chain_network(1, 1, zero(), 1);
        let state = state_with(&single, &[vec![0; 7]], 10);
        assert_eq!(compute_qbp_weights(&single, &state), vec![7]);
    }

    #[test]
    fn delay_view_hand_evaluations() {
        let net = chain_network(2, 1, zero(), 1);

        let state = state_with(&net, &[vec![2], vec![]], 10);
        let view = compute_delay_view(&net, &state);
        assert_eq!(view.hol_sojourn, vec![8, 8]);
        assert_eq!(view.hop_delay, vec![8, 0]);
        assert_eq!(view.delay_diff, vec![8, 0]);

        let state = state_with(&net, &[vec![2], vec![0]], 10);
        let view = compute_delay_view(&net, &state);
        assert_eq!(view.hol_sojourn, vec![8, 10]);
        assert_eq!(view.hop_delay, vec![8, 2]);
        assert_eq!(view.delay_diff, vec![6, 2]);

        let state = state_with(&net, &[vec![], vec![]], 10);
        let view = compute_delay_view(&net, &state);
        assert_eq!(view.hol_sojourn, vec![0, 0]);
        assert_eq!(view.hop_delay, vec![0, 0]);
        assert_eq!(view.delay_diff, vec![0, 0]);
    }

    #[test]
    fn empty_queue_inherits_across_a_chain() {
        let net = chain_network(3, 1, zero(), 1);
        // Only the first hop holds a packet; hops 2 and 3 inherit its sojourn.
        let state = state_with(&net, &[vec![4], vec![], vec![]], 10);
        let view = compute_delay_view(&net, &state);
        assert_eq!(view.hol_sojourn, vec![6, 6, 6]);
        assert_eq!(view.hop_delay, vec![6, 0, 0]);
        assert_eq!(view.delay_diff, vec![6, 0, 0]);
    }

    #[test]
    fn follower_gap_requires_two_packets() {
        let net = chain_network(1, 1, zero(), 1);
        let state = state_with(&net, &[vec![2, 5, 6]], 10);
        assert_eq!(compute_delay_view(&net, &state).follower_gap, vec![3]);
        let state = state_with(&net, &[vec![2]], 10);
        assert_eq!(compute_delay_view(&net, &state).follower_gap, vec![0]);
    }

    #[test]
    fn advance_matches_evolution_arithmetic() {
        let net = free_chain(2, 1);
        let mut state = state_with(&net, &[vec![0, 0], vec![]], 0);
        let schedule = Schedule::from_active(vec![true, true]);
        let decision = advance(&mut state, &net, &schedule, &[1], |_, _| {});
        assert_eq!(decision.service, vec![1, 0]);
        assert_eq!(state.lengths(), vec![2, 1]);
        assert_eq!(state.slot(), 1);
    }

    #[test]
    fn empty_network_stays_empty() {
        let net = free_chain(2, 1);
        let mut state = QueueState::empty(2);
        let schedule = Schedule::from_active(vec![true, true]);
        let decision = advance(&mut state, &net, &schedule, &[0], |_, _| {});
        assert_eq!(decision.service, vec![0, 0]);
        assert_eq!(state.total(), 0);
    }

    #[test]
    fn service_is_capped_by_queue_length() {
        let net = chain_network(1, 3, zero(), 1);
        let mut state = state_with(&net, &[vec![0, 0]], 1);
        let schedule = Schedule::from_active(vec![true]);
        let mut departed = Vec::new();
        let decision = advance(&mut state, &net, &schedule, &[0], |f, d| {
            departed.push((f, d))
        });
        assert_eq!(decision.service, vec![2]);
        assert_eq!(departed, vec![(0, 2), (0, 2)]);
    }

    #[test]
    fn a_packet_moves_at_most_one_hop_per_slot() {
        let net = free_chain(2, 1);
        let mut state = state_with(&net, &[vec![0], vec![]], 5);
        let schedule = Schedule::from_active(vec![true, true]);
        let mut departures = 0;
        advance(&mut state, &net, &schedule, &[0], |_, _| departures += 1);
        assert_eq!(departures, 0);
        assert_eq!(state.lengths(), vec![0, 1]);
    }

    #[test]
    fn departure_delay_counts_from_network_entry() {
        let net = chain_network(2, 1, zero(), 1);
        let mut state = state_with(&net, &[vec![], vec![3]], 9);
        let schedule = Schedule::from_active(vec![false, true]);
        let mut out = Vec::new();
        advance(&mut state, &net, &schedule, &[0], |f, d| out.push((f, d)));
        assert_eq!(out, vec![(0, 7)]);
    }

    #[test]
    fn forwarding_preserves_fifo_entry_order() {
        let net = chain_network(2, 2, zero(), 1);
        let mut state = state_with(&net, &[vec![1, 2, 3], vec![0]], 5);
        let schedule = Schedule::from_active(vec![true, false]);
        advance(&mut state, &net, &schedule, &[0], |_, _| {});
        let entries: Vec<u64> = (0..state.queues[1].len())
            .map(|i| state.queues[1][i].entry_slot)
            .collect();
        assert_eq!(entries, vec![0, 1, 2]);
        assert_eq!(state.queues[0][0].entry_slot, 3);
    }

    #[test]
    fn simulation_is_deterministic_and_conserves_packets() {
        let net = chain_network(3, 2, ArrivalSpec::Poisson { rate: 0.8 }, 2);
        for policy in Policy::ALL {
            let mut a = Simulation::new(&net, policy, 77).unwrap();
            let mut b = Simulation::new(&net, policy, 77).unwrap();
            for _ in 0..2_000 {
                let da = a.step().unwrap();
                let db = b.step().unwrap();
                assert_eq!(da, db);
            }
            assert_eq!(a.state(), b.state());
            assert_eq!(a.conservation_violations(), 0, "{policy}");
            let queued: u64 = a.state().lengths().iter().sum();
            assert_eq!(a.injected()[0], queued + a.departed()[0]);
        }
    }

    #[test]
    fn run_with_zero_arrivals_is_identically_zero() {
        let net = chain_network(2, 1, zero(), 1);
        let summary = run(&net, Policy::Qbp, 500, 3, RecordConfig::default()).unwrap();
        assert!(summary.total_queue_trace.iter().all(|&q| q == 0));
        assert_eq!(summary.final_total_queue, 0);
        assert_eq!(summary.total_queue_sum, 0);
        assert!(summary.delays[0].is_empty());
        assert_eq!(summary.departed[0], 0);
    }

    #[test]
    fn stable_single_link_departure_rate_matches_arrivals() {
        let net = chain_network(1, 1, ArrivalSpec::Poisson { rate: 0.5 }, 1);
        let horizon = 100_000u64;
        let summary = run(
            &net,
            Policy::Qbp,
            horizon,
            13,
            RecordConfig {
                stride: horizon,
                pair_traces: false,
            },
        )
        .unwrap();
        let rate = summary.departed[0] as f64 / horizon as f64;
        let sigma = (0.5f64 / horizon as f64).sqrt();
        assert!(
            (rate - 0.5).abs() < 3.0 * sigma + summary.final_total_queue as f64 / horizon as f64,
            "departure rate {rate} too far from 0.5"
        );
        assert_eq!(summary.conservation_violations, 0);
    }

    #[test]
    fn run_accumulators_cover_every_slot() {
        let net = chain_network(2, 1, ArrivalSpec::Poisson { rate: 0.4 }, 1);
        let summary = run(
            &net,
            Policy::Dbp,
            1_001,
            5,
            RecordConfig {
                stride: 100,
                pair_traces: true,
            },
        )
        .unwrap();
        let qs: u128 = summary.quarter_sums.iter().sum();
        assert_eq!(qs, summary.total_queue_sum);
        assert_eq!(summary.quarter_counts.iter().sum::<u64>(), 1_001);
        assert_eq!(summary.recorded_slots.first(), Some(&0));
        assert_eq!(summary.recorded_slots.last(), Some(&1_001));
        assert_eq!(
            summary.total_queue_trace.len(),
            summary.recorded_slots.len()
        );
        let traces = summary.pair_queue_traces.as_ref().unwrap();
        assert_eq!(traces.len(), 2);
        assert_eq!(traces[0].len(), summary.recorded_slots.len());
    }

    #[test]
    fn zero_flow_network_runs() {
        let topo = Topology::new(
            vec![1, 2],
            vec![Link {
                src: 1,
                dst: 2,
                capacity: 1,
            }],
        )
        .unwrap();
        let net = Network::build(topo, vec![], &InterferenceSpec::KHop { k: 1 }).unwrap();
        for policy in Policy::ALL {
            let summary = run(&net, policy, 50, 1, RecordConfig::default()).unwrap();
            assert_eq!(summary.final_total_queue, 0);
        }
    }

    #[test]
    fn monitor_refuses_non_unit_capacity() {
        let net = chain_network(2, 2, zero(), 1);
        assert!(matches!(
            InvariantMonitor::new(&net, Policy::Qbp),
            Err(Error::NonUnitCapacity)
        ));
    }

    #[test]
    fn monitor_detects_planted_queue_violation() {
        let net = chain_network(2, 1, zero(), 1);
        let mut monitor = InvariantMonitor::new(&net, Policy::Qbp).unwrap();
        let fine = state_with(&net, &[vec![0; 2], vec![0; 4]], 10);
        monitor.observe(&fine);
        assert!(monitor.violations().is_empty());
        let bad = state_with(&net, &[vec![], vec![0; 5]], 10);
        monitor.observe(&bad);
        assert_eq!(monitor.violations().len(), 1);
        let v = monitor.violations()[0];
        assert_eq!((v.slot, v.pair, v.lhs, v.rhs), (10, 0, 0, 3));
    }

    #[test]
    fn monitor_detects_planted_delay_violation() {
        let net = chain_network(2, 1, zero(), 1);
        let mut monitor = InvariantMonitor::new(&net, Policy::Dbp).unwrap();
        // Hop 1's HOL entered at 9 (hop delay 1) with a follower one slot
        // behind it, while hop 2's HOL entered at 0 (hop delay 9):
        // 1 < 9 − 2·1.
        let bad = state_with(&net, &[vec![9, 10], vec![0]], 10);
        monitor.observe(&bad);
        assert_eq!(monitor.violations().len(), 1);
        let v = monitor.violations()[0];
        assert_eq!((v.slot, v.pair, v.lhs, v.rhs), (10, 0, 1, 7));
        // A follower gap of 4 relaxes the bound to 9 − 8 = 1 and clears it.
        let mut monitor = InvariantMonitor::new(&net, Policy::Dbp).unwrap();
        let relaxed = state_with(&net, &[vec![9, 13], vec![0]], 10);
        monitor.observe(&relaxed);
        assert!(monitor.violations().is_empty());
    }

    #[test]
    fn monitor_takes_the_delay_gap_from_upstream_when_the_queue_is_singleton() {
        let net = chain_network(3, 1, zero(), 1);
        // Hop 2's HOL (entered 9) is followed by the packet still waiting at
        // hop 1 (entered 10), so its gap is 1 and hop 3's delay of 9 breaches
        // the bound: 1 < 9 − 2·1.
        let mut monitor = InvariantMonitor::new(&net, Policy::Dbp).unwrap();
        let bad = state_with(&net, &[vec![10], vec![9], vec![0]], 13);
        monitor.observe(&bad);
        assert_eq!(monitor.violations().len(), 1);
        let v = monitor.violations()[0];
        assert_eq!((v.slot, v.pair, v.lhs, v.rhs), (13, 1, 1, 7));
        // With nothing behind the HOL anywhere in the network the gap is
        // unmeasurable and the pair is skipped, as is an empty pair.
        let mut monitor = InvariantMonitor::new(&net, Policy::Dbp).unwrap();
        monitor.observe(&state_with(&net, &[vec![], vec![9], vec![0]], 13));
        monitor.observe(&state_with(&net, &[vec![], vec![], vec![0]], 13));
        assert!(monitor.violations().is_empty());
    }
}

//! Network structure: nodes, directed capacitated links, fixed-route flows,
//! and the conflict relation between the units scheduling operates on.
//!
//! The unit of scheduling is a [`LinkFlowPair`]: one hop of one flow together
//! with the link it crosses. Each pair keeps its own FIFO queue during
//! simulation, and a slot's schedule is a set of pairs no two of which are
//! joined in the [`ConflictGraph`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traffic::ArrivalSpec;

/// Node identifier as declared by the scenario.
pub type NodeId = u32;

/// Index into [`Topology::links`].
pub type LinkId = usize;

/// Directed link with a per-slot service capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub src: NodeId,
    pub dst: NodeId,
    /// Packets the link can move in one slot when scheduled.
    pub capacity: u32,
}

/// Immutable node/link structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    nodes: Vec<NodeId>,
    links: Vec<Link>,
    node_index: BTreeMap<NodeId, usize>,
    by_endpoints: BTreeMap<(NodeId, NodeId), LinkId>,
}

impl Topology {
    /// Validates and freezes a topology. Node ids must be unique, link
    /// endpoints must be declared nodes, capacities must be at least 1, and
    /// at most one link may exist per (src, dst) direction.
    pub fn new(nodes: Vec<NodeId>, links: Vec<Link>) -> Result<Self> {
        let mut node_index = BTreeMap::new();
        for (i, &id) in nodes.iter().enumerate() {
            if node_index.insert(id, i).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate node id {id}")));
            }
        }
        let mut by_endpoints = BTreeMap::new();
        for (i, link) in links.iter().enumerate() {
            if link.src == link.dst {
                return Err(Error::InvalidNetwork(format!(
                    "links[{i}]: src and dst are both node {}",
                    link.src
                )));
            }
            for end in [link.src, link.dst] {
                if !node_index.contains_key(&end) {
                    return Err(Error::InvalidNetwork(format!(
                        "links[{i}]: endpoint {end} is not a declared node"
                    )));
                }
            }
            if link.capacity == 0 {
                return Err(Error::InvalidNetwork(format!(
                    "links[{i}]: capacity must be at least 1"
                )));
            }
            if by_endpoints.insert((link.src, link.dst), i).is_some() {
                return Err(Error::InvalidNetwork(format!(
                    "duplicate link {} -> {}",
                    link.src, link.dst
                )));
            }
        }
        Ok(Self {
            nodes,
            links,
            node_index,
            by_endpoints,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Link declared from `src` to `dst`, if any.
    pub fn link_between(&self, src: NodeId, dst: NodeId) -> Option<LinkId> {
        self.by_endpoints.get(&(src, dst)).copied()
    }

    /// Hop distance between every pair of nodes, ignoring link direction.
    /// `None` means unreachable. Indexed by declaration order of the nodes.
    fn undirected_distances(&self) -> Vec<Vec<Option<u32>>> {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for link in &self.links {
            let a = self.node_index[&link.src];
            let b = self.node_index[&link.dst];
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut dist = vec![vec![None; n]; n];
        for start in 0..n {
            let row = &mut dist[start];
            row[start] = Some(0);
            let mut frontier = vec![start];
            let mut d = 0u32;
            while !frontier.is_empty() {
                d += 1;
                let mut next = Vec::new();
                for &u in &frontier {
                    for &v in &adj[u] {
                        if row[v].is_none() {
                            row[v] = Some(d);
                            next.push(v);
                        }
                    }
                }
                frontier = next;
            }
        }
        dist
    }
}

/// A source with a fixed route, expressed as the links it crosses in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub id: String,
    pub route: Vec<LinkId>,
    pub arrival: ArrivalSpec,
}

impl Flow {
    /// Builds a flow from an explicit link route, validating it against the
    /// topology.
    pub fn new(
        topology: &Topology,
        id: impl Into<String>,
        route: Vec<LinkId>,
        arrival: ArrivalSpec,
    ) -> Result<Self> {
        let id = id.into();
        let flow = Self { id, route, arrival };
        validate_flow(topology, &flow)?;
        Ok(flow)
    }

    /// Builds a flow from the sequence of nodes it visits. Every consecutive
    /// node pair must be joined by a declared link in that direction.
    pub fn from_node_route(
        topology: &Topology,
        id: impl Into<String>,
        nodes: &[NodeId],
        arrival: ArrivalSpec,
    ) -> Result<Self> {
        let id = id.into();
        if nodes.len() < 2 {
            return Err(Error::InvalidNetwork(format!(
                "flow '{id}': route must visit at least two nodes"
            )));
        }
        let mut route = Vec::with_capacity(nodes.len() - 1);
        for pair in nodes.windows(2) {
            let link = topology.link_between(pair[0], pair[1]).ok_or_else(|| {
                Error::InvalidNetwork(format!(
                    "flow '{id}': no link {} -> {} is declared",
                    pair[0], pair[1]
                ))
            })?;
            route.push(link);
        }
        Self::new(topology, id, route, arrival)
    }

    /// Number of hops (links) on the route.
    pub fn hops(&self) -> usize {
        self.route.len()
    }
}

fn validate_flow_id(id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::InvalidNetwork("flow id must not be empty".into()));
    }
    if !id
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return Err(Error::InvalidNetwork(format!(
            "flow id '{id}' may only contain ASCII letters, digits, '_' and '-'"
        )));
    }
    Ok(())
}

fn validate_flow(topology: &Topology, flow: &Flow) -> Result<()> {
    validate_flow_id(&flow.id)?;
    flow.arrival
        .validate()
        .map_err(|e| Error::InvalidArrival(format!("flow '{}': {e}", flow.id)))?;
    if flow.route.is_empty() {
        return Err(Error::InvalidNetwork(format!(
            "flow '{}': route must cross at least one link",
            flow.id
        )));
    }
    for &l in &flow.route {
        if l >= topology.links().len() {
            return Err(Error::InvalidNetwork(format!(
                "flow '{}': link index {l} is out of range",
                flow.id
            )));
        }
    }
    let links = topology.links();
    let mut visited = BTreeSet::new();
    visited.insert(links[flow.route[0]].src);
    for (k, &l) in flow.route.iter().enumerate() {
        if k > 0 && links[flow.route[k - 1]].dst != links[l].src {
            return Err(Error::InvalidNetwork(format!(
                "flow '{}': hop {} starts at node {} but hop {} ended at node {}",
                flow.id,
                k + 1,
                links[l].src,
                k,
                links[flow.route[k - 1]].dst
            )));
        }
        if !visited.insert(links[l].dst) {
            return Err(Error::InvalidNetwork(format!(
                "flow '{}': route visits node {} twice",
                flow.id, links[l].dst
            )));
        }
    }
    Ok(())
}

/// One hop of one flow: the atom that gets queued, weighed, and scheduled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkFlowPair {
    pub flow: String,
    /// 1-based position along the flow's route.
    pub hop: u32,
    pub link: LinkId,
    pub capacity: u32,
}

/// Expands flows into their link-flow pairs, sorted by (flow id, hop).
pub fn build_pairs(topology: &Topology, flows: &[Flow]) -> Result<Vec<LinkFlowPair>> {
    let mut seen = BTreeSet::new();
    for flow in flows {
        validate_flow(topology, flow)?;
        if !seen.insert(flow.id.as_str()) {
            return Err(Error::InvalidNetwork(format!(
                "duplicate flow id '{}'",
                flow.id
            )));
        }
    }
    let mut order: Vec<&Flow> = flows.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));
    let mut pairs = Vec::new();
    for flow in order {
        for (k, &link) in flow.route.iter().enumerate() {
            pairs.push(LinkFlowPair {
                flow: flow.id.clone(),
                hop: (k + 1) as u32,
                link,
                capacity: topology.links()[link].capacity,
            });
        }
    }
    Ok(pairs)
}

/// Symmetric, irreflexive adjacency over pair indices. An edge means the two
/// pairs may never be active in the same slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictGraph {
    n: usize,
    adj: Vec<bool>,
}

impl ConflictGraph {
    fn with_pairs(n: usize) -> Self {
        Self {
            n,
            adj: vec![false; n * n],
        }
    }

    /// Builds a graph directly from an edge list over `pair_count` vertices.
    /// Entries are symmetrized and self-edges are ignored.
    pub fn from_edges(pair_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut graph = Self::with_pairs(pair_count);
        for &(i, j) in edges {
            if i >= pair_count || j >= pair_count {
                return Err(Error::InvalidInterference(format!(
                    "edge ({i}, {j}): index out of range (have {pair_count} vertices)"
                )));
            }
            graph.add_edge(i, j);
        }
        Ok(graph)
    }

    fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            self.adj[i * self.n + j] = true;
            self.adj[j * self.n + i] = true;
        }
    }

    /// Number of pairs (vertices).
    pub fn pair_count(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adj[i * self.n..(i + 1) * self.n];
        row.iter().enumerate().filter_map(|(j, &a)| a.then_some(j))
    }

    /// Undirected edges as (i, j) with i < j.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }
}

/// Conflicts from k-hop link distance: two pairs interfere when the closest
/// endpoints of their links are within `k − 1` hops of each other in the
/// undirected topology. `k = 1` is node-exclusive scheduling (links sharing a
/// node interfere); pairs on the same physical link always interfere.
pub fn khop_conflicts(
    topology: &Topology,
    pairs: &[LinkFlowPair],
    k: u32,
) -> Result<ConflictGraph> {
    if k == 0 {
        return Err(Error::InvalidInterference(
            "k must be at least 1 (k = 1 is node-exclusive scheduling)".into(),
        ));
    }
    for (i, pair) in pairs.iter().enumerate() {
        if pair.link >= topology.links().len() {
            return Err(Error::InvalidInterference(format!(
                "pair {i}: link index {} is out of range",
                pair.link
            )));
        }
    }
    let dist = topology.undirected_distances();
    let links = topology.links();
    let link_distance = |a: LinkId, b: LinkId| -> Option<u32> {
        let mut best: Option<u32> = None;
        for &u in &[links[a].src, links[a].dst] {
            for &v in &[links[b].src, links[b].dst] {
                let (ui, vi) = (topology.node_index[&u], topology.node_index[&v]);
                if let Some(d) = dist[ui][vi] {
                    best = Some(best.map_or(d, |cur| cur.min(d)));
                }
            }
        }
        best
    };
    let mut graph = ConflictGraph::with_pairs(pairs.len());
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            if pairs[i].link == pairs[j].link {
                graph.add_edge(i, j);
                continue;
            }
            if let Some(d) = link_distance(pairs[i].link, pairs[j].link) {
                if d < k {
                    graph.add_edge(i, j);
                }
            }
        }
    }
    Ok(graph)
}

/// Conflicts listed directly as pair-index pairs. The input relation is
/// symmetrized; self-entries are ignored; pairs sharing a physical link are
/// joined whether listed or not.
pub fn explicit_conflicts(
    pairs: &[LinkFlowPair],
    conflicts: &[(usize, usize)],
) -> Result<ConflictGraph> {
    let n = pairs.len();
    let mut graph = ConflictGraph::with_pairs(n);
    for &(i, j) in conflicts {
        if i >= n || j >= n {
            return Err(Error::InvalidInterference(format!(
                "conflict ({i}, {j}): pair index out of range (have {n} pairs)"
            )));
        }
        graph.add_edge(i, j);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if pairs[i].link == pairs[j].link {
                graph.add_edge(i, j);
            }
        }
    }
    Ok(graph)
}

/// How pair conflicts are derived from the topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InterferenceSpec {
    /// Pairs conflict when their links are within `k − 1` hops.
    KHop { k: u32 },
    /// Conflicts listed directly by pair index.
    Explicit { conflicts: Vec<(usize, usize)> },
}

/// A validated topology and flow set with the derived pair list and conflict
/// graph, ready to simulate. Flows are kept sorted by id; that order fixes
/// flow indices, pair indices, RNG stream assignment, and output columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    topology: Topology,
    flows: Vec<Flow>,
    pairs: Vec<LinkFlowPair>,
    conflicts: ConflictGraph,
    flow_first_pair: Vec<usize>,
    pair_flow: Vec<usize>,
}

impl Network {
    pub fn build(
        topology: Topology,
        mut flows: Vec<Flow>,
        interference: &InterferenceSpec,
    ) -> Result<Self> {
        let pairs = build_pairs(&topology, &flows)?;
        let conflicts = match interference {
            InterferenceSpec::KHop { k } => khop_conflicts(&topology, &pairs, *k)?,
            InterferenceSpec::Explicit { conflicts } => explicit_conflicts(&pairs, conflicts)?,
        };
        flows.sort_by(|a, b| a.id.cmp(&b.id));
        let mut flow_first_pair = Vec::with_capacity(flows.len());
        let mut pair_flow = Vec::with_capacity(pairs.len());
        let mut next = 0usize;
        for (f, flow) in flows.iter().enumerate() {
            flow_first_pair.push(next);
            next += flow.hops();
            pair_flow.extend(std::iter::repeat_n(f, flow.hops()));
        }
        debug_assert_eq!(next, pairs.len());
        Ok(Self {
            topology,
            flows,
            pairs,
            conflicts,
            flow_first_pair,
            pair_flow,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Flows in canonical (id-sorted) order.
    pub fn flows(&self) -> &[Flow] {
        &self.flows
    }

    pub fn pairs(&self) -> &[LinkFlowPair] {
        &self.pairs
    }

    pub fn conflicts(&self) -> &ConflictGraph {
        &self.conflicts
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn flow_count(&self) -> usize {
        self.flows.len()
    }

    /// Index of the flow that owns pair `p`.
    pub fn pair_flow(&self, p: usize) -> usize {
        self.pair_flow[p]
    }

    /// The same flow's next hop, if `p` is not the last one.
    pub fn next_pair(&self, p: usize) -> Option<usize> {
        let f = self.pair_flow[p];
        let range = self.flow_pairs(f);
        (p + 1 < range.end).then_some(p + 1)
    }

    /// Contiguous pair-index range belonging to flow `f`, in hop order.
    pub fn flow_pairs(&self, f: usize) -> std::ops::Range<usize> {
        let start = self.flow_first_pair[f];
        start..start + self.flows[f].hops()
    }

    pub fn flow_index(&self, id: &str) -> Option<usize> {
        self.flows.iter().position(|f| f.id == id)
    }

    /// Stable human-readable pair name, `<flow>_<hop>`.
    pub fn pair_label(&self, p: usize) -> String {
        format!("{}_{}", self.pairs[p].flow, self.pairs[p].hop)
    }

    pub fn is_unit_capacity(&self) -> bool {
        self.topology.links().iter().all(|l| l.capacity == 1)
    }

    /// Copy of this network with every flow's arrival intensity scaled by
    /// `rho`. Structure, conflicts, and pair order are unchanged.
    pub fn with_scaled_arrivals(&self, rho: f64) -> Result<Network> {
        let mut scaled = self.clone();
        for flow in &mut scaled.flows {
            flow.arrival = flow.arrival.scaled(rho)?;
        }
        Ok(scaled)
    }
}

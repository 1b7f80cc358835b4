//! Scenario files: a TOML format describing topology, interference, flows,
//! and run defaults, plus two built-in scenarios (`hnet`, `grid4x4`)
//! compiled into the library.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Flow, InterferenceSpec, Link, Network, NodeId, Topology};
use crate::sched::Policy;
use crate::traffic::ArrivalSpec;

/// Names accepted anywhere a scenario path is expected.
pub const BUILTIN_SCENARIOS: [&str; 2] = ["hnet", "grid4x4"];

const HNET_TOML: &str = include_str!("../scenarios/hnet.toml");
const GRID4X4_TOML: &str = include_str!("../scenarios/grid4x4.toml");

/// Parsed scenario document, unresolved. `resolve` turns it into a
/// simulated-ready [`Network`] plus run defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub nodes: NodesSection,
    pub links: Vec<LinkEntry>,
    pub interference: InterferenceSection,
    pub flows: Vec<FlowEntry>,
    #[serde(default)]
    pub defaults: Defaults,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodesSection {
    pub ids: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    pub src: NodeId,
    pub dst: NodeId,
    pub capacity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterferenceSection {
    /// Pairs conflict when their links' closest endpoints are within
    /// `k − 1` hops.
    Khop { k: u32 },
    /// Conflicting pair indices listed directly.
    Explicit { conflicts: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowEntry {
    pub id: String,
    /// Nodes visited in order; consecutive nodes must be joined by a
    /// declared link in that direction.
    pub route: Vec<NodeId>,
    pub arrival: ArrivalSpec,
}

/// Run parameters used when the command line does not override them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Defaults {
    pub horizon: u64,
    pub seed: u64,
    pub policy: Policy,
    pub trace_stride: u64,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            horizon: 100_000,
            seed: 1,
            policy: Policy::Qbp,
            trace_stride: 1,
        }
    }
}

/// A resolved scenario: validated network plus defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: Network,
    pub defaults: Defaults,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    /// Canonical form: flows sorted by id, matching the resolved network's
    /// flow order.
    pub fn normalized(mut self) -> Self {
        self.flows.sort_by(|a, b| a.id.cmp(&b.id));
        self
    }

    /// Validates everything and builds the network.
    pub fn resolve(&self) -> Result<Scenario> {
        if self.defaults.horizon == 0 {
            return Err(Error::ScenarioInvalid(
                "defaults.horizon must be at least 1".into(),
            ));
        }
        if self.defaults.trace_stride == 0 {
            return Err(Error::ScenarioInvalid(
                "defaults.trace_stride must be at least 1".into(),
            ));
        }
        let links = self
            .links
            .iter()
            .map(|l| Link {
                src: l.src,
                dst: l.dst,
                capacity: l.capacity,
            })
            .collect();
        let topology = Topology::new(self.nodes.ids.clone(), links)?;
        let flows = self
            .flows
            .iter()
            .map(|f| Flow::from_node_route(&topology, f.id.clone(), &f.route, f.arrival.clone()))
            .collect::<Result<Vec<_>>>()?;
        let interference = match &self.interference {
            InterferenceSection::Khop { k } => InterferenceSpec::KHop { k: *k },
            InterferenceSection::Explicit { conflicts } => InterferenceSpec::Explicit {
                conflicts: conflicts.clone(),
            },
        };
        let network = Network::build(topology, flows, &interference)?;
        Ok(Scenario {
            network,
            defaults: self.defaults.clone(),
        })
    }
}

/// Source text of a built-in scenario.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "hnet" => Some(HNET_TOML),
        "grid4x4" => Some(GRID4X4_TOML),
        _ => None,
    }
}

/// Loads a scenario from a built-in name or a filesystem path.
pub fn load(source: &str) -> Result<ScenarioFile> {
    if let Some(text) = builtin(source) {
        return ScenarioFile::parse(text);
    }
    let text = std::fs::read_to_string(Path::new(source)).map_err(|e| {
        Error::ScenarioInvalid(format!(
            "cannot read scenario '{source}' (not a built-in name or readable file): {e}"
        ))
    })?;
    ScenarioFile::parse(&text)
}

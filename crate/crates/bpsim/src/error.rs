//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building networks, parsing scenarios,
/// scheduling, or writing results.
#[derive(Debug, Error)]
pub enum Error {
    /// Topology, flow, or pair construction rejected its input.
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    /// Interference construction rejected its input.
    #[error("invalid interference: {0}")]
    InvalidInterference(String),

    /// Arrival specification with out-of-range parameters.
    #[error("invalid arrival spec: {0}")]
    InvalidArrival(String),

    /// Exact schedule enumeration refused an oversized instance.
    #[error(
        "exact schedule enumeration supports at most {cap} link-flow pairs, got {pairs}; \
         use a greedy policy (qgms or dgms) for larger instances"
    )]
    TooManyPairs { pairs: usize, cap: usize },

    /// A selection was attempted against a catalog with no schedules, which
    /// only happens when the instance has no link-flow pairs at all.
    #[error("schedule catalog is empty (the instance has no link-flow pairs)")]
    EmptyCatalog,

    /// The exhaustive reference solver refused an oversized instance.
    #[error("brute-force schedule search supports at most {limit} pairs, got {pairs}")]
    BruteForceTooLarge { pairs: usize, limit: usize },

    /// A delay statistic was requested over an empty sample set.
    #[error("no delay samples")]
    NoSamples,

    /// A delay statistic was requested for a flow with no departures.
    #[error("flow '{flow}' has no recorded departures")]
    NoDepartures { flow: String },

    /// A metric was requested over a window containing no recorded slots.
    #[error("metric window is empty")]
    EmptyWindow,

    /// The invariant monitor only supports unit-capacity scenarios.
    #[error("invariant monitor requires every link capacity to be 1")]
    NonUnitCapacity,

    /// Scenario text failed to parse.
    #[error("scenario parse error: {0}")]
    ScenarioParse(#[from] toml::de::Error),

    /// Scenario parsed but failed validation.
    #[error("invalid scenario: {0}")]
    ScenarioInvalid(String),

    /// Bad command-line or API argument.
    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

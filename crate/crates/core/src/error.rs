use std::path::PathBuf;

use thiserror::Error;

use crate::graph::AgentId;

pub type Result<T> = std::result::Result<T, HddError>;

#[derive(Debug, Error)]
pub enum HddError {
    #[error("graph needs at least one cooperative agent")]
    NoCooperativeAgents,

    #[error("edge probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(AgentId, AgentId),

    #[error("agent {agent} out of range for {n_agents} agents")]
    AgentOutOfRange { agent: AgentId, n_agents: usize },

    #[error("no connected graph after {0} attempts")]
    ConnectivityExhausted(usize),

    #[error("history horizon must be at least 2, got {0}")]
    HorizonTooShort(usize),

    #[error("invalid prefill interval [{low}, {high}]")]
    InvalidPrefill { low: f64, high: f64 },

    #[error("expected step {expected}, got {got}")]
    OutOfOrderStep { expected: i64, got: i64 },

    #[error("expected {expected} neighbor values, got {got}")]
    NeighborCountMismatch { expected: usize, got: usize },

    #[error("time {time} outside the window [{oldest}, {newest}]")]
    TimeOutsideWindow { time: i64, oldest: i64, newest: i64 },

    #[error("agent {other} is not a neighbor of agent {agent}")]
    NotANeighbor { agent: AgentId, other: AgentId },

    #[error("confidence bound {bound} at time {time} is not positive")]
    NonPositiveBound { time: i64, bound: f64 },

    #[error("invalid confidence schedule: {0}")]
    InvalidSchedule(String),

    #[error("discount factor {0} outside (0, 1)")]
    InvalidDiscount(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("malformed augmented trust vector: {0}")]
    MalformedTrust(String),

    #[error("weight row of agent {agent} sums to {sum}")]
    RowSum { agent: AgentId, sum: f64 },

    #[error("behavior model error: {0}")]
    Behavior(String),

    #[error("trajectory has no weight snapshot at the final step")]
    MissingFinalSnapshot,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("config file {path} not found")]
    ConfigNotFound { path: PathBuf },

    #[error("failed to parse config: {0}")]
    ConfigParse(String),

    #[error("invalid config value for `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HddError {
    pub(crate) fn invalid(field: &str, message: impl Into<String>) -> Self {
        HddError::ConfigInvalid {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

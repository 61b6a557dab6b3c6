//! History-data-driven consensus.
//!
//! Each cooperative agent keeps a rolling window of its own and its
//! neighbors' states, scores every neighbor by how often (and how recently)
//! it stayed inside a shrinking confidence ball, and averages with weights
//! proportional to those scores plus a unit self-trust.
//!
//! - [`graph`]: topology with a random cooperative core and attached adversaries
//! - [`history`]: rolling windows
//! - [`trust`]: membership, importance, mean/covariance estimation
//! - [`protocol`]: weight normalization and averaging steps
//! - [`agents`]: cooperative and adversarial behaviors
//! - [`sim`]: synchronous runs, metrics, sweeps, CSV/JSON export
//! - [`config`], [`scenario`]: experiment configuration and presets

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod config;
pub mod error;
pub mod graph;
pub mod history;
pub mod protocol;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod trust;

pub use config::{load_config, SimConfig};
pub use error::{HddError, Result};
pub use graph::{AgentId, Graph, NeighborView};
pub use sim::{run, TrajectoryLog};

//! CSV and JSON exports of a trajectory.
//!
//! Floats are written with Rust's shortest round-trip formatting, which is
//! locale-independent and parses back to the identical `f64`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::{derived_seeds, TrajectoryLog};
use crate::config::SimConfig;
use crate::error::Result;

/// `t,agent,state` for every step and agent.
pub fn write_states_csv<W: Write>(log: &TrajectoryLog, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "agent", "state"])?;
    for t in 0..=log.steps() {
        for (i, x) in log.states_at(t).iter().enumerate() {
            w.write_record([t.to_string(), i.to_string(), format!("{x:?}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `t,i,j,w` triplets of every recorded snapshot.
pub fn write_weights_csv<W: Write>(log: &TrajectoryLog, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "i", "j", "w"])?;
    for snapshot in &log.weights {
        snapshot.write_triplets(&mut w)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub version: &'static str,
    pub config: SimConfig,
    pub graph_attempt: u64,
    pub derived_seeds: BTreeMap<String, u64>,
    pub edges: Vec<(usize, usize)>,
    pub cooperative: Vec<usize>,
}

impl RunMetadata {
    pub fn from_log(log: &TrajectoryLog) -> Self {
        RunMetadata {
            version: env!("CARGO_PKG_VERSION"),
            config: log.config.clone(),
            graph_attempt: log.graph_attempt,
            derived_seeds: derived_seeds(&log.config, log.graph_attempt).into_iter().collect(),
            edges: log.graph.edges().collect(),
            cooperative: log.cooperative(),
        }
    }
}

pub fn write_metadata<W: Write>(log: &TrajectoryLog, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, &RunMetadata::from_log(log))?;
    Ok(())
}

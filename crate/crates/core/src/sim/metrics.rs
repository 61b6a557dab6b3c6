//! Clustering and trust-based consensus verdicts on final states.

use serde::Serialize;

use super::TrajectoryLog;
use crate::error::{HddError, Result};
use crate::graph::AgentId;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    /// Ascending agent ids.
    pub members: Vec<AgentId>,
    /// Mean of the members' values.
    pub representative: f64,
    /// `max - min` inside the cluster.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub tolerance: f64,
    /// Ordered by ascending value.
    pub clusters: Vec<Cluster>,
}

impl ClusterReport {
    pub fn count(&self) -> usize {
        self.clusters.len()
    }

    pub fn max_spread(&self) -> f64 {
        self.clusters.iter().map(|c| c.spread).fold(0.0, f64::max)
    }

    /// Index of the cluster holding `agent`.
    pub fn cluster_of(&self, agent: AgentId) -> Option<usize> {
        self.clusters.iter().position(|c| c.members.binary_search(&agent).is_ok())
    }

    /// Largest cluster; ties go to the lower-valued one.
    pub fn largest(&self) -> Option<&Cluster> {
        self.clusters
            .iter()
            .enumerate()
            .max_by_key(|(idx, c)| (c.members.len(), std::cmp::Reverse(*idx)))
            .map(|(_, c)| c)
    }
}

/// Single-linkage clustering on the real line: sort, then split wherever the
/// gap between neighbors exceeds `tol`.
pub fn detect_clusters(values: &[(AgentId, f64)], tol: f64) -> Result<ClusterReport> {
    if !(tol > 0.0) {
        return Err(HddError::InvalidArgument(format!("cluster tolerance must be positive, got {tol}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut runs: Vec<Vec<(AgentId, f64)>> = Vec::new();
    for v in sorted {
        match runs.last_mut() {
            Some(run) if v.1 - run.last().expect("runs are non-empty").1 <= tol => run.push(v),
            _ => runs.push(vec![v]),
        }
    }
    let clusters = runs
        .into_iter()
        .map(|run| {
            let lo = run[0].1;
            let hi = run[run.len() - 1].1;
            let representative = run.iter().map(|v| v.1).sum::<f64>() / run.len() as f64;
            let mut members: Vec<AgentId> = run.into_iter().map(|v| v.0).collect();
            members.sort_unstable();
            Cluster {
                members,
                representative,
                spread: hi - lo,
            }
        })
        .collect();
    Ok(ClusterReport { tolerance: tol, clusters })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsensusVerdict {
    pub agent: AgentId,
    /// Neighbors `j` with `w_ij(T_t)` above the weight threshold.
    pub trusted: Vec<AgentId>,
    /// Whether every trusted neighbor ends within `state_tol` of the agent.
    pub holds: bool,
}

/// Finite-horizon reading of trust-based consensus: each cooperative agent is
/// judged against the neighbors it still weights at the final step.
pub fn trust_based_consensus_check(
    log: &TrajectoryLog,
    weight_threshold: f64,
    state_tol: f64,
) -> Result<Vec<ConsensusVerdict>> {
    let w = log.final_weights().ok_or(HddError::MissingFinalSnapshot)?;
    let x = log.final_states();
    Ok(w.protocol_rows()
        .map(|row| {
            let i = row.agent;
            let mut trusted: Vec<AgentId> = row
                .entries
                .iter()
                .filter(|&&(j, wij)| j != i && wij > weight_threshold)
                .map(|&(j, _)| j)
                .collect();
            trusted.sort_unstable();
            let holds = trusted.iter().all(|&j| (x[i] - x[j]).abs() < state_tol);
            ConsensusVerdict { agent: i, trusted, holds }
        })
        .collect())
}

//! Weighted-averaging updates: the trust-weighted HDD rule and a uniform
//! memoryless baseline.

use std::io::Write;

use serde::Serialize;

use crate::error::{HddError, Result};
use crate::graph::{AgentId, NeighborView};

/// Row-sum deviation above which assembly reports an estimator bug.
pub const ROW_SUM_HARD_TOL: f64 = 1e-9;
/// Row-sum deviation accepted by invariant checks.
pub const ROW_SUM_CHECK_TOL: f64 = 1e-12;

/// Normalizes an augmented trust vector by its L1 norm.
///
/// The last entry is the self-trust and must be exactly 1, so the norm is at
/// least 1 and the division is always safe.
pub fn hdd_weights(z: &[f64]) -> Result<Vec<f64>> {
    match z.last() {
        Some(1.0) => {}
        _ => return Err(HddError::MalformedTrust("last entry must be the unit self-trust".into())),
    }
    if let Some(bad) = z.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(HddError::MalformedTrust(format!("entry {bad} outside [0, 1]")));
    }
    let norm: f64 = z.iter().sum();
    Ok(z.iter().map(|v| v / norm).collect())
}

/// `Σ_{j∈J_i} w_ij x_j(t)` with `row` laid out like `view.inclusive`.
pub fn hdd_step(states: &[f64], row: &[f64], view: &NeighborView) -> Result<f64> {
    if row.len() != view.inclusive.len() {
        return Err(HddError::DimensionMismatch(format!(
            "weight row of length {} for {} inclusive neighbors",
            row.len(),
            view.inclusive.len()
        )));
    }
    let mut sum = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (&j, &w) in view.inclusive.iter().zip(row) {
        let x = *states
            .get(j)
            .ok_or(HddError::AgentOutOfRange { agent: j, n_agents: states.len() })?;
        sum += w * x;
        lo = lo.min(x);
        hi = hi.max(x);
    }
    // Rounding can push a convex combination an ulp outside the hull.
    Ok(sum.clamp(lo, hi))
}

/// Equal weights `1/|J_i|` over the inclusive neighborhood.
pub fn baseline_step(states: &[f64], view: &NeighborView) -> f64 {
    let sum: f64 = view.inclusive.iter().map(|&j| states[j]).sum();
    sum / view.inclusive.len() as f64
}

/// One agent's sparse weight row: `(j, w_ij)` over `J_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightRow {
    pub agent: AgentId,
    pub entries: Vec<(AgentId, f64)>,
}

impl WeightRow {
    pub fn new(view: &NeighborView, weights: &[f64]) -> Result<Self> {
        if weights.len() != view.inclusive.len() {
            return Err(HddError::DimensionMismatch(format!(
                "{} weights for {} inclusive neighbors",
                weights.len(),
                view.inclusive.len()
            )));
        }
        Ok(WeightRow {
            agent: view.agent,
            entries: view.inclusive.iter().copied().zip(weights.iter().copied()).collect(),
        })
    }

    pub fn get(&self, j: AgentId) -> f64 {
        self.entries.iter().find(|(k, _)| *k == j).map_or(0.0, |(_, w)| *w)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }
}

/// `W(t)`. Rows of agents that do not run the protocol are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightMatrix {
    pub step: usize,
    rows: Vec<Option<WeightRow>>,
}

/// Collects the cooperative rows of `W(t)` and checks row sums.
pub fn assemble_weight_matrix(rows: Vec<WeightRow>, n_agents: usize, step: usize) -> Result<WeightMatrix> {
    let mut slots: Vec<Option<WeightRow>> = vec![None; n_agents];
    for row in rows {
        if row.agent >= n_agents {
            return Err(HddError::AgentOutOfRange { agent: row.agent, n_agents });
        }
        let sum = row.sum();
        if (sum - 1.0).abs() > ROW_SUM_HARD_TOL || row.entries.iter().any(|(_, w)| !(0.0..=1.0).contains(w)) {
            return Err(HddError::RowSum { agent: row.agent, sum });
        }
        let agent = row.agent;
        slots[agent] = Some(row);
    }
    Ok(WeightMatrix { step, rows: slots })
}

impl WeightMatrix {
    pub fn n_agents(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: AgentId) -> Option<&WeightRow> {
        self.rows.get(i).and_then(Option::as_ref)
    }

    /// `w_ij`, or `None` if `i` is not a protocol agent.
    pub fn get(&self, i: AgentId, j: AgentId) -> Option<f64> {
        self.row(i).map(|r| r.get(j))
    }

    /// Column `j` restricted to protocol rows: `(i, w_ij)`.
    pub fn column(&self, j: AgentId) -> Vec<(AgentId, f64)> {
        self.rows
            .iter()
            .flatten()
            .map(|r| (r.agent, r.get(j)))
            .collect()
    }

    pub fn protocol_rows(&self) -> impl Iterator<Item = &WeightRow> {
        self.rows.iter().flatten()
    }

    /// Sparse triplets `t,i,j,w` without a header.
    pub fn write_triplets<W: Write>(&self, out: &mut csv::Writer<W>) -> Result<()> {
        for row in self.protocol_rows() {
            let mut entries = row.entries.clone();
            entries.sort_by_key(|(j, _)| *j);
            for (j, w) in entries {
                out.write_record([
                    self.step.to_string(),
                    row.agent.to_string(),
                    j.to_string(),
                    format!("{w:?}"),
                ])?;
            }
        }
        Ok(())
    }
}

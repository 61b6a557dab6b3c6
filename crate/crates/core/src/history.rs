//! Rolling `T`-step history of an agent's own state and its neighbors' states.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HddError, Result};
use crate::graph::{AgentId, NeighborView};
use crate::rng::{substream, Stream};

/// How the `T - 1` pre-run samples of a fresh window are synthesized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PrefillStrategy {
    /// i.i.d. draws from `U[low, high]`.
    Uniform { low: f64, high: f64 },
    /// Every pre-run sample repeats the agent's initial state.
    Hold,
}

impl Default for PrefillStrategy {
    fn default() -> Self {
        PrefillStrategy::Uniform { low: 0.0, high: 1.0 }
    }
}

impl PrefillStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PrefillStrategy::Uniform { low, high } if !(low < high) || !low.is_finite() || !high.is_finite() => {
                Err(HddError::InvalidPrefill { low, high })
            }
            _ => Ok(()),
        }
    }

    /// Pre-run samples of agent `j`, oldest first, followed by nothing: the
    /// caller appends the real state at `t = 0`. The draw depends only on
    /// `(seed, j)` so every agent observing `j` sees the same fabricated past.
    fn synthesize(&self, j: AgentId, initial: f64, count: usize, seed: u64) -> Vec<f64> {
        match *self {
            PrefillStrategy::Uniform { low, high } => {
                let mut rng = substream(seed, Stream::Prefill, j as u64);
                (0..count).map(|_| rng.gen_range(low..=high)).collect()
            }
            PrefillStrategy::Hold => vec![initial; count],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryWindow {
    agent: AgentId,
    horizon: usize,
    newest: i64,
    neighbors: Vec<AgentId>,
    own: VecDeque<f64>,
    rows: Vec<VecDeque<f64>>,
}

impl HistoryWindow {
    /// Full window at `t = 0`. `states` holds every agent's initial state,
    /// which becomes the newest column.
    pub fn prefill(
        view: &NeighborView,
        horizon: usize,
        strategy: PrefillStrategy,
        states: &[f64],
        rng_seed: u64,
    ) -> Result<Self> {
        if horizon < 2 {
            return Err(HddError::HorizonTooShort(horizon));
        }
        strategy.validate()?;
        let fill = |j: AgentId| -> Result<VecDeque<f64>> {
            let initial = *states.get(j).ok_or(HddError::AgentOutOfRange {
                agent: j,
                n_agents: states.len(),
            })?;
            let mut row: VecDeque<f64> = strategy
                .synthesize(j, initial, horizon - 1, rng_seed)
                .into();
            row.push_back(initial);
            Ok(row)
        };
        Ok(HistoryWindow {
            agent: view.agent,
            horizon,
            newest: 0,
            neighbors: view.neighbors.clone(),
            own: fill(view.agent)?,
            rows: view.neighbors.iter().map(|&j| fill(j)).collect::<Result<_>>()?,
        })
    }

    /// Builds a window directly from recorded columns (oldest first) ending at `newest`.
    pub fn from_values(
        agent: AgentId,
        newest: i64,
        own: Vec<f64>,
        neighbors: Vec<AgentId>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let horizon = own.len();
        if horizon < 2 {
            return Err(HddError::HorizonTooShort(horizon));
        }
        if rows.len() != neighbors.len() {
            return Err(HddError::NeighborCountMismatch {
                expected: neighbors.len(),
                got: rows.len(),
            });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != horizon) {
            return Err(HddError::DimensionMismatch(format!(
                "neighbor row of length {} in a window of length {horizon}",
                r.len()
            )));
        }
        Ok(HistoryWindow {
            agent,
            horizon,
            newest,
            neighbors,
            own: own.into(),
            rows: rows.into_iter().map(VecDeque::from).collect(),
        })
    }

    /// Evicts the oldest column and appends the states observed at `t_next`.
    pub fn push(&mut self, t_next: i64, own: f64, neighbor_states: &[f64]) -> Result<()> {
        if t_next != self.newest + 1 {
            return Err(HddError::OutOfOrderStep {
                expected: self.newest + 1,
                got: t_next,
            });
        }
        if neighbor_states.len() != self.rows.len() {
            return Err(HddError::NeighborCountMismatch {
                expected: self.rows.len(),
                got: neighbor_states.len(),
            });
        }
        self.own.pop_front();
        self.own.push_back(own);
        for (row, &x) in self.rows.iter_mut().zip(neighbor_states) {
            row.pop_front();
            row.push_back(x);
        }
        self.newest = t_next;
        Ok(())
    }

    /// Stored `x_j(k)`; `j` may be the owning agent or one of its neighbors.
    pub fn value_at(&self, j: AgentId, k: i64) -> Result<f64> {
        let col = self.column_of(k)?;
        if j == self.agent {
            return Ok(self.own[col]);
        }
        let row = self
            .neighbors
            .binary_search(&j)
            .map_err(|_| HddError::NotANeighbor {
                agent: self.agent,
                other: j,
            })?;
        Ok(self.rows[row][col])
    }

    fn column_of(&self, k: i64) -> Result<usize> {
        let oldest = self.oldest();
        if k < oldest || k > self.newest {
            return Err(HddError::TimeOutsideWindow {
                time: k,
                oldest,
                newest: self.newest,
            });
        }
        Ok((k - oldest) as usize)
    }

    pub fn agent(&self) -> AgentId {
        self.agent
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Current step `t`.
    pub fn newest(&self) -> i64 {
        self.newest
    }

    pub fn oldest(&self) -> i64 {
        self.newest - self.horizon as i64 + 1
    }

    /// `κ_{t,T}` in ascending order.
    pub fn times(&self) -> impl Iterator<Item = i64> + Clone {
        self.oldest()..=self.newest
    }

    pub fn neighbors(&self) -> &[AgentId] {
        &self.neighbors
    }

    pub fn own_values(&self) -> &VecDeque<f64> {
        &self.own
    }

    /// Row of the neighbor at position `idx` in canonical order.
    pub fn neighbor_values(&self, idx: usize) -> &VecDeque<f64> {
        &self.rows[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn path_view() -> NeighborView {
        Graph::from_edges(3, [(0, 1), (1, 2)], [])
            .unwrap()
            .neighbor_view(1)
            .unwrap()
    }

    #[test]
    fn hold_replicates_initial_state() {
        let w = HistoryWindow::prefill(&path_view(), 5, PrefillStrategy::Hold, &[0.1, 0.7, 0.3], 0).unwrap();
        assert!(w.own_values().iter().all(|&x| x == 0.7));
        assert!(w.neighbor_values(1).iter().all(|&x| x == 0.3));
        assert_eq!(w.times().collect::<Vec<_>>(), vec![-4, -3, -2, -1, 0]);
    }

    #[test]
    fn uniform_prefill_in_range_and_deterministic() {
        let s = PrefillStrategy::Uniform { low: 0.0, high: 1.0 };
        let a = HistoryWindow::prefill(&path_view(), 8, s, &[0.5; 3], 42).unwrap();
        let b = HistoryWindow::prefill(&path_view(), 8, s, &[0.5; 3], 42).unwrap();
        assert_eq!(a, b);
        for row in [a.own_values(), a.neighbor_values(0), a.neighbor_values(1)] {
            assert!(row.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn shared_prefill_across_observers() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)], []).unwrap();
        let s = PrefillStrategy::default();
        let w0 = HistoryWindow::prefill(&g.neighbor_view(0).unwrap(), 4, s, &[0.0; 3], 9).unwrap();
        let w1 = HistoryWindow::prefill(&g.neighbor_view(1).unwrap(), 4, s, &[0.0; 3], 9).unwrap();
        for k in -3..=0 {
            assert_eq!(w0.value_at(2, k).unwrap(), w1.value_at(2, k).unwrap());
        }
    }

    #[test]
    fn prefill_rejects_bad_parameters() {
        let v = path_view();
        assert!(HistoryWindow::prefill(&v, 1, PrefillStrategy::Hold, &[0.0; 3], 0).is_err());
        let bad = PrefillStrategy::Uniform { low: 1.0, high: 1.0 };
        assert!(matches!(
            HistoryWindow::prefill(&v, 3, bad, &[0.0; 3], 0),
            Err(HddError::InvalidPrefill { .. })
        ));
    }

    #[test]
    fn push_is_fifo() {
        let mut w = HistoryWindow::from_values(0, 2, vec![1.0, 2.0, 3.0], vec![], vec![]).unwrap();
        w.push(3, 4.0, &[]).unwrap();
        assert_eq!(w.own_values().iter().copied().collect::<Vec<_>>(), vec![2.0, 3.0, 4.0]);
        assert_eq!(w.times().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(matches!(w.push(5, 0.0, &[]), Err(HddError::OutOfOrderStep { .. })));
        assert!(matches!(w.push(3, 0.0, &[]), Err(HddError::OutOfOrderStep { .. })));
    }

    #[test]
    fn push_requires_every_neighbor() {
        let mut w = HistoryWindow::prefill(&path_view(), 3, PrefillStrategy::Hold, &[0.0; 3], 0).unwrap();
        assert!(matches!(
            w.push(1, 0.0, &[1.0]),
            Err(HddError::NeighborCountMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn value_at_boundaries() {
        let w = HistoryWindow::from_values(4, 10, vec![1.0, 2.0, 3.0], vec![7], vec![vec![5.0, 6.0, 7.0]]).unwrap();
        assert_eq!(w.value_at(4, 9).unwrap(), 2.0);
        assert_eq!(w.value_at(4, 10).unwrap(), 3.0);
        assert_eq!(w.value_at(7, 8).unwrap(), 5.0);
        assert!(matches!(w.value_at(4, 7), Err(HddError::TimeOutsideWindow { .. })));
        assert!(matches!(w.value_at(4, 11), Err(HddError::TimeOutsideWindow { .. })));
        assert!(matches!(w.value_at(3, 10), Err(HddError::NotANeighbor { .. })));
    }
}

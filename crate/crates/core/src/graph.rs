//! Undirected communication topology.
//!
//! Agents `0..n_coop` are cooperative, the remaining ids are non-cooperative.
//! Neighbor lists are kept sorted by ascending id; every per-neighbor vector
//! elsewhere in the crate (trust means, importance rows, weight rows) is
//! indexed in that order.

use std::collections::{BTreeSet, VecDeque};
use std::io::Write;

use rand::Rng;

use crate::error::{HddError, Result};
use crate::rng::{substream, Stream};

pub type AgentId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_agents: usize,
    adjacency: Vec<Vec<AgentId>>,
    cooperative: Vec<bool>,
}

/// Agent `i`'s local view: `N_i` in canonical order, `J_i = N_i ∪ {i}` and the degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborView {
    pub agent: AgentId,
    pub neighbors: Vec<AgentId>,
    /// Neighbors first, then the agent itself; the same layout as weight rows.
    pub inclusive: Vec<AgentId>,
    pub degree: usize,
}

impl NeighborView {
    /// Position of `j` in `neighbors`.
    pub fn position(&self, j: AgentId) -> Option<usize> {
        self.neighbors.binary_search(&j).ok()
    }
}

impl Graph {
    /// Builds a graph from an explicit edge list. `non_cooperative` lists the
    /// agents outside `V_c`.
    pub fn from_edges(
        n_agents: usize,
        edges: impl IntoIterator<Item = (AgentId, AgentId)>,
        non_cooperative: impl IntoIterator<Item = AgentId>,
    ) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); n_agents];
        for (a, b) in edges {
            if a == b || a >= n_agents || b >= n_agents {
                return Err(HddError::InvalidEdge(a, b));
            }
            sets[a].insert(b);
            sets[b].insert(a);
        }
        let mut cooperative = vec![true; n_agents];
        for j in non_cooperative {
            if j >= n_agents {
                return Err(HddError::AgentOutOfRange { agent: j, n_agents });
            }
            cooperative[j] = false;
        }
        Ok(Graph {
            n_agents,
            adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
            cooperative,
        })
    }

    /// Random cooperative core (each pair linked with `edge_prob`) plus
    /// `n_noncoop` adversaries attached to every cooperative agent.
    /// Adversaries are linked to each other only when `adversary_links` is set.
    pub fn random_core(
        n_coop: usize,
        n_noncoop: usize,
        edge_prob: f64,
        rng_seed: u64,
        adversary_links: bool,
    ) -> Result<Self> {
        Self::random_core_attempt(n_coop, n_noncoop, edge_prob, rng_seed, adversary_links, 0)
    }

    pub(crate) fn random_core_attempt(
        n_coop: usize,
        n_noncoop: usize,
        edge_prob: f64,
        rng_seed: u64,
        adversary_links: bool,
        attempt: u64,
    ) -> Result<Self> {
        if n_coop == 0 {
            return Err(HddError::NoCooperativeAgents);
        }
        if !(0.0..=1.0).contains(&edge_prob) {
            return Err(HddError::InvalidProbability(edge_prob));
        }
        let n = n_coop + n_noncoop;
        let mut rng = substream(rng_seed, Stream::Graph, attempt);
        let mut edges = Vec::new();
        for i in 0..n_coop {
            for j in (i + 1)..n_coop {
                if rng.gen_bool(edge_prob) {
                    edges.push((i, j));
                }
            }
        }
        for a in n_coop..n {
            edges.extend((0..n_coop).map(|c| (c, a)));
            if adversary_links {
                edges.extend(((a + 1)..n).map(|b| (a, b)));
            }
        }
        Self::from_edges(n, edges, n_coop..n)
    }

    /// Keeps resampling the topology until it is connected.
    pub fn connected_random_core(
        n_coop: usize,
        n_noncoop: usize,
        edge_prob: f64,
        rng_seed: u64,
        adversary_links: bool,
        max_attempts: usize,
    ) -> Result<(Self, u64)> {
        for attempt in 0..max_attempts as u64 {
            let g = Self::random_core_attempt(
                n_coop,
                n_noncoop,
                edge_prob,
                rng_seed,
                adversary_links,
                attempt,
            )?;
            if g.is_connected() {
                return Ok((g, attempt));
            }
        }
        Err(HddError::ConnectivityExhausted(max_attempts))
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn is_cooperative(&self, i: AgentId) -> bool {
        self.cooperative.get(i).copied().unwrap_or(false)
    }

    pub fn cooperative_agents(&self) -> Vec<AgentId> {
        (0..self.n_agents).filter(|&i| self.cooperative[i]).collect()
    }

    pub fn non_cooperative_agents(&self) -> Vec<AgentId> {
        (0..self.n_agents).filter(|&i| !self.cooperative[i]).collect()
    }

    pub fn neighbors(&self, i: AgentId) -> &[AgentId] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, a: AgentId, b: AgentId) -> bool {
        a < self.n_agents && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Unordered edges as `(lo, hi)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, ns)| ns.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Breadth-first traversal from agent 0. The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.n_agents == 0 {
            return true;
        }
        let mut seen = vec![false; self.n_agents];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n_agents
    }

    pub fn neighbor_view(&self, i: AgentId) -> Result<NeighborView> {
        if i >= self.n_agents {
            return Err(HddError::AgentOutOfRange {
                agent: i,
                n_agents: self.n_agents,
            });
        }
        let neighbors = self.adjacency[i].clone();
        let mut inclusive = neighbors.clone();
        inclusive.push(i);
        Ok(NeighborView {
            agent: i,
            degree: neighbors.len(),
            neighbors,
            inclusive,
        })
    }

    /// Writes `i j` per line, ascending.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}")?;
        }
        out.flush()?;
        Ok(())
    }
}

//! Synchronous-round simulation, trajectory logging, metrics and sweeps.

mod export;
mod metrics;
mod sweep;

pub use export::{write_metadata, write_states_csv, write_weights_csv, RunMetadata};
pub use metrics::{detect_clusters, trust_based_consensus_check, Cluster, ClusterReport, ConsensusVerdict};
pub use sweep::{sweep, SweepAxes, SweepOptions, SweepRow, SweepTable};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::agents::{adversary_step, cooperative_step, BehaviorModel};
use crate::config::SimConfig;
use crate::error::{HddError, Result};
use crate::graph::{AgentId, Graph, NeighborView};
use crate::history::HistoryWindow;
use crate::protocol::{assemble_weight_matrix, WeightMatrix, WeightRow};
use crate::rng::{derive_seed, substream, Stream};
use crate::trust::{ConfidenceSchedule, DiscountSchedule, TrustEstimate};

/// Trust estimates of every cooperative agent at one step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateSnapshot {
    pub step: usize,
    pub estimates: Vec<TrustEstimate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub config: SimConfig,
    pub graph: Graph,
    /// Sampling attempt that produced `graph` (non-zero after connectivity retries).
    pub graph_attempt: u64,
    /// Confidence schedule of each cooperative agent, in `cooperative` order.
    pub schedules: Vec<ConfidenceSchedule>,
    n_agents: usize,
    steps: usize,
    /// Row-major `(steps + 1) × n_agents`.
    states: Vec<f64>,
    pub weights: Vec<WeightMatrix>,
    pub estimates: Vec<EstimateSnapshot>,
}

impl TrajectoryLog {
    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn states_at(&self, t: usize) -> &[f64] {
        &self.states[t * self.n_agents..(t + 1) * self.n_agents]
    }

    pub fn state(&self, t: usize, i: AgentId) -> f64 {
        self.states[t * self.n_agents + i]
    }

    pub fn cooperative(&self) -> Vec<AgentId> {
        self.graph.cooperative_agents()
    }

    pub fn final_states(&self) -> &[f64] {
        self.states_at(self.steps)
    }

    /// `(i, x_i(T_t))` for every cooperative agent.
    pub fn final_cooperative_states(&self) -> Vec<(AgentId, f64)> {
        self.cooperative()
            .into_iter()
            .map(|i| (i, self.state(self.steps, i)))
            .collect()
    }

    pub fn weights_at(&self, step: usize) -> Option<&WeightMatrix> {
        self.weights.iter().find(|w| w.step == step)
    }

    /// `W(T_t)`.
    pub fn final_weights(&self) -> Option<&WeightMatrix> {
        self.weights_at(self.steps)
    }

    /// `max - min` of the given agents' states at `t`.
    pub fn spread(&self, t: usize, agents: &[AgentId]) -> f64 {
        let xs = self.states_at(t);
        let (lo, hi) = agents
            .iter()
            .map(|&i| xs[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        if agents.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

struct CooperativeAgent {
    view: NeighborView,
    window: HistoryWindow,
    schedule: ConfidenceSchedule,
}

struct Adversary {
    id: AgentId,
    model: BehaviorModel,
    visible: Vec<AgentId>,
    rng: ChaCha8Rng,
}

fn build_graph(config: &SimConfig) -> Result<(Graph, u64)> {
    let g = &config.graph;
    if g.require_connected {
        Graph::connected_random_core(g.n_coop, g.n_noncoop, g.edge_prob, config.seed, g.adversary_links, g.max_attempts)
    } else {
        Graph::random_core(g.n_coop, g.n_noncoop, g.edge_prob, config.seed, g.adversary_links).map(|g| (g, 0))
    }
}

/// Seeds derived from the base seed, echoed in run metadata.
pub fn derived_seeds(config: &SimConfig, graph_attempt: u64) -> Vec<(String, u64)> {
    let n = config.n_agents() as u64;
    let mut out = vec![
        ("graph".to_string(), derive_seed(config.seed, Stream::Graph, graph_attempt)),
        ("initial".to_string(), derive_seed(config.seed, Stream::InitialState, 0)),
    ];
    for i in 0..n {
        out.push((format!("prefill.{i}"), derive_seed(config.seed, Stream::Prefill, i)));
    }
    for i in 0..config.graph.n_coop as u64 {
        out.push((format!("confidence.{i}"), derive_seed(config.seed, Stream::Confidence, i)));
    }
    for i in config.graph.n_coop as u64..n {
        out.push((format!("adversary.{i}"), derive_seed(config.seed, Stream::Adversary, i)));
    }
    out
}

/// Runs the configured experiment with the constant discount `config.nu`.
pub fn run(config: &SimConfig) -> Result<TrajectoryLog> {
    run_with_discount(config, &DiscountSchedule::Constant(config.nu))
}

/// Runs the experiment with an arbitrary discount schedule; `config.nu` is
/// only validated, not used.
pub fn run_with_discount(config: &SimConfig, discount: &DiscountSchedule) -> Result<TrajectoryLog> {
    config.validate()?;
    let (graph, graph_attempt) = build_graph(config)?;
    let n = graph.n_agents();

    let mut init_rng = substream(config.seed, Stream::InitialState, 0);
    let mut current: Vec<f64> = (0..n)
        .map(|_| init_rng.gen_range(config.initial.low..=config.initial.high))
        .collect();

    let mut cooperative = Vec::new();
    let mut adversaries = Vec::new();
    for i in 0..n {
        let view = graph.neighbor_view(i)?;
        match config.behavior(i) {
            BehaviorModel::Cooperative => {
                let window = HistoryWindow::prefill(&view, config.horizon, config.prefill, &current, config.seed)?;
                let mut rng = substream(config.seed, Stream::Confidence, i as u64);
                let schedule = config.confidence.realize(config.horizon, &mut rng)?;
                cooperative.push(CooperativeAgent { view, window, schedule });
            }
            model => adversaries.push(Adversary {
                id: i,
                model,
                visible: view.neighbors.iter().copied().filter(|&j| graph.is_cooperative(j)).collect(),
                rng: substream(config.seed, Stream::Adversary, i as u64),
            }),
        }
    }

    let steps = config.steps;
    let mut states = Vec::with_capacity((steps + 1) * n);
    states.extend_from_slice(&current);
    let mut weights = Vec::new();
    let mut estimates = Vec::new();
    let mut next = current.clone();
    let snapshot_due = |t: usize| {
        t == steps || (config.logging.snapshot_every > 0 && t.is_multiple_of(config.logging.snapshot_every))
    };

    for t in 0..=steps {
        let record = snapshot_due(t);
        let mut rows = Vec::new();
        let mut step_estimates = Vec::new();
        for agent in &cooperative {
            let out = cooperative_step(&agent.window, &agent.schedule, discount, &current, &agent.view, config.covariance)?;
            next[agent.view.agent] = out.next_state;
            if record {
                rows.push(WeightRow::new(&agent.view, &out.weights)?);
                if config.logging.estimates {
                    step_estimates.push(out.trace.estimate);
                }
            }
        }
        if record {
            weights.push(assemble_weight_matrix(rows, n, t)?);
            if config.logging.estimates {
                estimates.push(EstimateSnapshot { step: t, estimates: step_estimates });
            }
        }
        if t == steps {
            break;
        }
        for adv in &mut adversaries {
            let visible: Vec<f64> = adv.visible.iter().map(|&j| current[j]).collect();
            next[adv.id] = adversary_step(&adv.model, current[adv.id], &visible, t as u64, &mut adv.rng)?;
        }
        std::mem::swap(&mut current, &mut next);
        states.extend_from_slice(&current);
        for agent in &mut cooperative {
            let neighbor_states: Vec<f64> = agent.view.neighbors.iter().map(|&j| current[j]).collect();
            agent
                .window
                .push(t as i64 + 1, current[agent.view.agent], &neighbor_states)?;
        }
    }

    Ok(TrajectoryLog {
        config: config.clone(),
        schedules: cooperative.into_iter().map(|a| a.schedule).collect(),
        graph,
        graph_attempt,
        n_agents: n,
        steps,
        states,
        weights,
        estimates,
    })
}

/// Graph a config would simulate on.
pub fn config_graph(config: &SimConfig) -> Result<Graph> {
    config.validate()?;
    build_graph(config).map(|(g, _)| g)
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(HddError::InvalidSweep(msg()))
    }
}

//! Parameter sweeps over `(T, ν, ε̄)` and seeds.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{detect_clusters, ensure, run};
use crate::config::SimConfig;
use crate::error::{HddError, Result};
use crate::graph::AgentId;
use crate::trust::ConfidenceSpec;

/// Grid values per axis. An empty axis keeps the base config's value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepAxes {
    pub horizon: Vec<usize>,
    pub nu: Vec<f64>,
    pub eps_max: Vec<f64>,
}

impl SweepAxes {
    fn points(&self, base: &SimConfig) -> Result<Vec<SimConfig>> {
        ensure(
            !(self.horizon.is_empty() && self.nu.is_empty() && self.eps_max.is_empty()),
            || "every grid axis is empty".into(),
        )?;
        if !self.eps_max.is_empty() && base.eps_max().is_none() {
            return Err(HddError::InvalidSweep("eps_max axis needs a sorted-uniform confidence schedule".into()));
        }
        let or_base = |v: &[f64], b: f64| if v.is_empty() { vec![b] } else { v.to_vec() };
        let horizons = if self.horizon.is_empty() { vec![base.horizon] } else { self.horizon.clone() };
        let nus = or_base(&self.nu, base.nu);
        let eps = or_base(&self.eps_max, base.eps_max().unwrap_or(f64::NAN));
        let mut out = Vec::new();
        for &h in &horizons {
            for &e in &eps {
                for &nu in &nus {
                    let mut cfg = base.clone();
                    cfg.horizon = h;
                    cfg.nu = nu;
                    if let ConfidenceSpec::SortedUniform { upper, .. } = &mut cfg.confidence {
                        *upper = e;
                    }
                    out.push(cfg);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub cluster_tol: f64,
    /// Agents `j` whose final weight column `w_·j(T_t)` is recorded.
    pub weight_columns: Vec<AgentId>,
    pub parallel: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            cluster_tol: 1e-2,
            weight_columns: Vec::new(),
            parallel: true,
        }
    }
}

/// One run of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub horizon: usize,
    pub nu: f64,
    pub eps_max: Option<f64>,
    pub seed: u64,
    /// `(i, x_i(T_t))` for the cooperative agents.
    pub final_states: Vec<(AgentId, f64)>,
    /// Cluster index of each entry of `final_states`.
    pub cluster_ids: Vec<usize>,
    pub cluster_count: usize,
    /// `(j, [(i, w_ij(T_t))])` for each requested column.
    pub weight_columns: Vec<(AgentId, Vec<(AgentId, f64)>)>,
}

impl SweepRow {
    fn key(&self) -> (usize, u64, u64, u64) {
        (
            self.horizon,
            self.eps_max.unwrap_or(f64::NAN).to_bits(),
            self.nu.to_bits(),
            self.seed,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn eps_field(e: Option<f64>) -> String {
    e.map(|v| format!("{v:?}")).unwrap_or_default()
}

impl SweepTable {
    /// Sorts rows by `(T, ε̄, ν, seed)`.
    pub fn canonical_sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.horizon
                .cmp(&b.horizon)
                .then(a.eps_max.unwrap_or(f64::NAN).total_cmp(&b.eps_max.unwrap_or(f64::NAN)))
                .then(a.nu.total_cmp(&b.nu))
                .then(a.seed.cmp(&b.seed))
        });
        debug_assert!(self.rows.windows(2).all(|w| w[0].key() != w[1].key()));
    }

    /// Header `T,nu,eps_max,seed,agent,final_state,cluster_id`.
    pub fn write_states_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["T", "nu", "eps_max", "seed", "agent", "final_state", "cluster_id"])?;
        for row in &self.rows {
            for (&(agent, x), cid) in row.final_states.iter().zip(&row.cluster_ids) {
                w.write_record([
                    row.horizon.to_string(),
                    format!("{:?}", row.nu),
                    eps_field(row.eps_max),
                    row.seed.to_string(),
                    agent.to_string(),
                    format!("{x:?}"),
                    cid.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Header `T,nu,eps_max,seed,i,j,w`.
    pub fn write_weight_columns_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["T", "nu", "eps_max", "seed", "i", "j", "w"])?;
        for row in &self.rows {
            for (j, column) in &row.weight_columns {
                for &(i, wij) in column {
                    w.write_record([
                        row.horizon.to_string(),
                        format!("{:?}", row.nu),
                        eps_field(row.eps_max),
                        row.seed.to_string(),
                        i.to_string(),
                        j.to_string(),
                        format!("{wij:?}"),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn run_point(cfg: SimConfig, options: &SweepOptions) -> Result<SweepRow> {
    let log = run(&cfg)?;
    let final_states = log.final_cooperative_states();
    let report = detect_clusters(&final_states, options.cluster_tol)?;
    let cluster_ids = final_states
        .iter()
        .map(|&(i, _)| report.cluster_of(i).expect("every agent is clustered"))
        .collect();
    let w = log.final_weights().ok_or(HddError::MissingFinalSnapshot)?;
    Ok(SweepRow {
        horizon: cfg.horizon,
        nu: cfg.nu,
        eps_max: cfg.eps_max(),
        seed: cfg.seed,
        final_states,
        cluster_ids,
        cluster_count: report.count(),
        weight_columns: options.weight_columns.iter().map(|&j| (j, w.column(j))).collect(),
    })
}

/// One run per grid point per seed. Row order is grid-major, then seed,
/// independent of `options.parallel`.
pub fn sweep(base: &SimConfig, axes: &SweepAxes, seeds: &[u64], options: &SweepOptions) -> Result<SweepTable> {
    ensure(!seeds.is_empty(), || "seed list is empty".into())?;
    ensure(options.cluster_tol > 0.0, || "cluster tolerance must be positive".into())?;
    let jobs: Vec<SimConfig> = axes
        .points(base)?
        .into_iter()
        .flat_map(|cfg| {
            seeds.iter().map(move |&s| SimConfig {
                seed: s,
                ..cfg.clone()
            })
        })
        .collect();
    for cfg in &jobs {
        cfg.validate()?;
    }
    let rows = if options.parallel {
        jobs.into_par_iter().map(|cfg| run_point(cfg, options)).collect::<Result<Vec<_>>>()?
    } else {
        jobs.into_iter().map(|cfg| run_point(cfg, options)).collect::<Result<Vec<_>>>()?
    };
    Ok(SweepTable { rows })
}

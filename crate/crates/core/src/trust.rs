//! Trust estimation from a history window.
//!
//! For agent `i` at step `t` the pipeline is:
//!
//! 1. membership: for each window time `k`, the neighbors whose state lies in
//!    the closed ball of radius `ε_{i,k}` around `x_i(k)`;
//! 2. frequency counters: for each neighbor, the window times it was a member;
//! 3. discounted importance: `ν^{t-k}` at member times, `0` elsewhere;
//! 4. estimated mean: the average of each importance vector over the window;
//! 5. estimated covariance: spread of the normalized-distance columns
//!    `d/(1+d)` around that mean.
//!
//! The mean is the estimated trust configuration; `1 - mean` estimates how
//! non-cooperative each neighbor is.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HddError, Result};
use crate::graph::AgentId;
use crate::history::HistoryWindow;

/// Distance between two scalar states.
fn distance(a: f64, b: f64) -> f64 {
    (a - b).abs()
}

/// Parameters of a confidence-bound schedule before the per-agent draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConfidenceSpec {
    SortedUniform { lower: f64, upper: f64 },
    ExponentialDecay { amplitude: f64, rate: f64 },
    GeometricDecay { amplitude: f64, ratio: f64 },
}

impl Default for ConfidenceSpec {
    fn default() -> Self {
        ConfidenceSpec::SortedUniform { lower: 0.01, upper: 1.0 }
    }
}

impl ConfidenceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HddError::InvalidSchedule(m));
        match *self {
            ConfidenceSpec::SortedUniform { lower, upper } => {
                if !(lower > 0.0) || !(upper > lower) || !upper.is_finite() {
                    return bad(format!("sorted-uniform needs 0 < lower < upper, got [{lower}, {upper}]"));
                }
            }
            ConfidenceSpec::ExponentialDecay { amplitude, rate } => {
                if !(amplitude > 0.0) || !(rate > 0.0) || !amplitude.is_finite() || !rate.is_finite() {
                    return bad(format!("exponential-decay needs amplitude > 0 and rate > 0, got ({amplitude}, {rate})"));
                }
            }
            ConfidenceSpec::GeometricDecay { amplitude, ratio } => {
                if !(amplitude > 0.0) || !(ratio > 0.0 && ratio < 1.0) || !amplitude.is_finite() {
                    return bad(format!("geometric-decay needs amplitude > 0 and ratio in (0, 1), got ({amplitude}, {ratio})"));
                }
            }
        }
        Ok(())
    }

    /// Draws the agent's schedule. Only the sorted-uniform kind consumes randomness.
    pub fn realize<R: Rng + ?Sized>(&self, horizon: usize, rng: &mut R) -> Result<ConfidenceSchedule> {
        self.validate()?;
        Ok(match *self {
            ConfidenceSpec::SortedUniform { lower, upper } => {
                ConfidenceSchedule::sorted_uniform(lower, upper, horizon, rng)?
            }
            ConfidenceSpec::ExponentialDecay { amplitude, rate } => {
                ConfidenceSchedule::ExponentialDecay { amplitude, rate }
            }
            ConfidenceSpec::GeometricDecay { amplitude, ratio } => {
                ConfidenceSchedule::GeometricDecay { amplitude, ratio }
            }
        })
    }
}

/// Confidence bounds `ε_{i,k}` over a window, strictly decreasing toward the present.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConfidenceSchedule {
    /// Fixed per-position bounds, oldest (largest) first, reused at every step.
    SortedUniform { bounds: Vec<f64> },
    /// `ε_{i,k} = amplitude · e^{-rate·k}`.
    ExponentialDecay { amplitude: f64, rate: f64 },
    /// `ε_{i,k} = amplitude · ratio^k`.
    GeometricDecay { amplitude: f64, ratio: f64 },
}

impl ConfidenceSchedule {
    /// `horizon` draws from `U[lower, upper]` sorted in descending order.
    /// Ties are broken by stepping down to the next representable value.
    pub fn sorted_uniform<R: Rng + ?Sized>(lower: f64, upper: f64, horizon: usize, rng: &mut R) -> Result<Self> {
        if !(lower > 0.0) || !(upper > lower) {
            return Err(HddError::InvalidSchedule(format!(
                "sorted-uniform needs 0 < lower < upper, got [{lower}, {upper}]"
            )));
        }
        let mut bounds: Vec<f64> = (0..horizon).map(|_| rng.gen_range(lower..=upper)).collect();
        bounds.sort_by(|a, b| b.total_cmp(a));
        for k in 1..bounds.len() {
            if bounds[k] >= bounds[k - 1] {
                bounds[k] = bounds[k - 1].next_down();
            }
        }
        Self::from_sorted(bounds)
    }

    /// Explicit per-position bounds, oldest first.
    pub fn from_sorted(bounds: Vec<f64>) -> Result<Self> {
        if bounds.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(HddError::InvalidSchedule("bounds must be strictly decreasing".into()));
        }
        Ok(ConfidenceSchedule::SortedUniform { bounds })
    }

    /// Bounds for the window ending at `t`, oldest first.
    pub fn bounds(&self, t: i64, horizon: usize) -> Result<Vec<f64>> {
        let times = (t - horizon as i64 + 1)..=t;
        let out: Vec<f64> = match self {
            ConfidenceSchedule::SortedUniform { bounds } => {
                if bounds.len() != horizon {
                    return Err(HddError::DimensionMismatch(format!(
                        "schedule has {} bounds for a window of {horizon}",
                        bounds.len()
                    )));
                }
                bounds.clone()
            }
            ConfidenceSchedule::ExponentialDecay { amplitude, rate } => {
                times.clone().map(|k| amplitude * (-rate * k as f64).exp()).collect()
            }
            ConfidenceSchedule::GeometricDecay { amplitude, ratio } => {
                times.clone().map(|k| amplitude * ratio.powf(k as f64)).collect()
            }
        };
        if let Some((k, &b)) = times.zip(&out).find(|(_, b)| !(**b > 0.0)) {
            return Err(HddError::NonPositiveBound { time: k, bound: b });
        }
        Ok(out)
    }
}

/// Discount factor `ν_{i,t}`.
#[derive(Clone)]
pub enum DiscountSchedule {
    Constant(f64),
    Custom(Arc<dyn Fn(AgentId, i64) -> f64 + Send + Sync>),
}

impl fmt::Debug for DiscountSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscountSchedule::Constant(nu) => write!(f, "Constant({nu})"),
            DiscountSchedule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl DiscountSchedule {
    pub fn value(&self, agent: AgentId, t: i64) -> Result<f64> {
        let nu = match self {
            DiscountSchedule::Constant(nu) => *nu,
            DiscountSchedule::Custom(f) => f(agent, t),
        };
        check_discount(nu)?;
        Ok(nu)
    }
}

fn check_discount(nu: f64) -> Result<()> {
    if nu > 0.0 && nu < 1.0 {
        Ok(())
    } else {
        Err(HddError::InvalidDiscount(nu))
    }
}

/// Upper bound of any mean entry for a constant discount: `(1 - ν^T) / (T (1 - ν))`.
pub fn max_mean(nu: f64, horizon: usize) -> f64 {
    (1.0 - nu.powi(horizon as i32)) / (horizon as f64 * (1.0 - nu))
}

/// Neighbors inside the confidence ball at each window time.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipRecord {
    pub agent: AgentId,
    pub neighbors: Vec<AgentId>,
    /// `κ_{t,T}`, oldest first.
    pub times: Vec<i64>,
    /// `members[c]` are the neighbors in the ball at `times[c]`, ascending.
    pub members: Vec<Vec<AgentId>>,
}

impl MembershipRecord {
    /// Window times at which `j` was in the ball, ascending.
    pub fn frequency_counter(&self, j: AgentId) -> Result<Vec<i64>> {
        if self.neighbors.binary_search(&j).is_err() {
            return Err(HddError::NotANeighbor {
                agent: self.agent,
                other: j,
            });
        }
        Ok(self
            .times
            .iter()
            .zip(&self.members)
            .filter(|(_, m)| m.binary_search(&j).is_ok())
            .map(|(&k, _)| k)
            .collect())
    }
}

pub fn membership(window: &HistoryWindow, schedule: &ConfidenceSchedule) -> Result<MembershipRecord> {
    let horizon = window.horizon();
    let bounds = schedule.bounds(window.newest(), horizon)?;
    let own = window.own_values();
    let members = (0..horizon)
        .map(|c| {
            window
                .neighbors()
                .iter()
                .enumerate()
                .filter(|&(idx, _)| distance(window.neighbor_values(idx)[c], own[c]) <= bounds[c])
                .map(|(_, &j)| j)
                .collect()
        })
        .collect();
    Ok(MembershipRecord {
        agent: window.agent(),
        neighbors: window.neighbors().to_vec(),
        times: window.times().collect(),
        members,
    })
}

/// Importance vector over `κ_{t,T}`, oldest first.
pub fn discounted_importance(counter: &[i64], nu: f64, t: i64, horizon: usize) -> Result<Vec<f64>> {
    check_discount(nu)?;
    let oldest = t - horizon as i64 + 1;
    let mut out = vec![0.0; horizon];
    for &k in counter {
        if k < oldest || k > t {
            return Err(HddError::TimeOutsideWindow {
                time: k,
                oldest,
                newest: t,
            });
        }
        out[(k - oldest) as usize] = nu.powi((t - k) as i32);
    }
    Ok(out)
}

pub fn estimate_mean(importances: &[Vec<f64>], horizon: usize) -> Result<Vec<f64>> {
    importances
        .iter()
        .map(|v| {
            if v.len() != horizon {
                return Err(HddError::DimensionMismatch(format!(
                    "importance vector of length {} for horizon {horizon}",
                    v.len()
                )));
            }
            Ok(v.iter().sum::<f64>() / horizon as f64)
        })
        .collect()
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(HddError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    fn add_to(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] += v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }
}

/// `d_i × T` matrix of normalized distances `|x_i(k) - x_j(k)| / (1 + |x_i(k) - x_j(k)|)`.
pub fn variability_matrix(window: &HistoryWindow) -> Matrix {
    let own = window.own_values();
    let horizon = window.horizon();
    let mut m = Matrix::zeros(window.neighbors().len(), horizon);
    for idx in 0..window.neighbors().len() {
        let row = window.neighbor_values(idx);
        for c in 0..horizon {
            let d = distance(own[c], row[c]);
            m.data[idx * horizon + c] = d / (1.0 + d);
        }
    }
    m
}

/// Sum over window columns of `(D_k - μ)(D_k - μ)ᵀ`, divided by `T - 1`.
/// Only the upper triangle is accumulated and then mirrored, so the result
/// is exactly symmetric.
pub fn estimate_covariance(variability: &Matrix, mean: &[f64], horizon: usize) -> Result<Matrix> {
    if horizon < 2 {
        return Err(HddError::HorizonTooShort(horizon));
    }
    let d = mean.len();
    if variability.rows() != d || variability.cols() != horizon {
        return Err(HddError::DimensionMismatch(format!(
            "variability matrix is {}x{}, expected {d}x{horizon}",
            variability.rows(),
            variability.cols()
        )));
    }
    let mut cov = Matrix::zeros(d, d);
    let mut dev = vec![0.0; d];
    for k in 0..horizon {
        for (r, slot) in dev.iter_mut().enumerate() {
            *slot = variability.get(r, k) - mean[r];
        }
        for r in 0..d {
            for c in r..d {
                cov.add_to(r, c, dev[r] * dev[c]);
            }
        }
    }
    let scale = 1.0 / (horizon - 1) as f64;
    for r in 0..d {
        for c in r..d {
            let v = cov.get(r, c) * scale;
            cov.data[r * d + c] = v;
            cov.data[c * d + r] = v;
        }
    }
    Ok(cov)
}

/// `[mean; 1]`: neighbors in canonical order, then the agent itself.
pub fn augmented_trust(mean: &[f64]) -> Vec<f64> {
    let mut z = Vec::with_capacity(mean.len() + 1);
    z.extend_from_slice(mean);
    z.push(1.0);
    z
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrustEstimate {
    pub agent: AgentId,
    pub time: i64,
    pub neighbors: Vec<AgentId>,
    pub mean: Vec<f64>,
    pub covariance: Option<Matrix>,
}

impl TrustEstimate {
    /// Estimated trust configuration; identical to the mean.
    pub fn trust_config(&self) -> &[f64] {
        &self.mean
    }

    pub fn noncoop_config(&self) -> Vec<f64> {
        self.mean.iter().map(|m| 1.0 - m).collect()
    }

    pub fn augmented(&self) -> Vec<f64> {
        augmented_trust(&self.mean)
    }
}

/// Every intermediate of one estimation, for inspection and logging.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustTrace {
    pub membership: MembershipRecord,
    pub counters: Vec<Vec<i64>>,
    pub importances: Vec<Vec<f64>>,
    pub variability: Option<Matrix>,
    pub estimate: TrustEstimate,
}

pub fn estimate_trust(
    window: &HistoryWindow,
    confidence: &ConfidenceSchedule,
    discount: &DiscountSchedule,
    with_covariance: bool,
) -> Result<TrustTrace> {
    let t = window.newest();
    let horizon = window.horizon();
    let nu = discount.value(window.agent(), t)?;
    let membership = membership(window, confidence)?;
    let counters = window
        .neighbors()
        .iter()
        .map(|&j| membership.frequency_counter(j))
        .collect::<Result<Vec<_>>>()?;
    let importances = counters
        .iter()
        .map(|c| discounted_importance(c, nu, t, horizon))
        .collect::<Result<Vec<_>>>()?;
    let mean = estimate_mean(&importances, horizon)?;
    let (variability, covariance) = if with_covariance {
        let v = variability_matrix(window);
        let cov = estimate_covariance(&v, &mean, horizon)?;
        (Some(v), Some(cov))
    } else {
        (None, None)
    };
    Ok(TrustTrace {
        estimate: TrustEstimate {
            agent: window.agent(),
            time: t,
            neighbors: window.neighbors().to_vec(),
            mean,
            covariance,
        },
        membership,
        counters,
        importances,
        variability,
    })
}

//! Agent behaviors: cooperative agents run the trust-weighted protocol,
//! adversaries follow one of several non-protocol update rules.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HddError, Result};
use crate::graph::NeighborView;
use crate::history::HistoryWindow;
use crate::protocol::{hdd_step, hdd_weights};
use crate::trust::{estimate_trust, ConfidenceSchedule, DiscountSchedule, TrustTrace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BehaviorModel {
    Cooperative,
    /// Fresh `U[low, high]` draw every step.
    Random { low: f64, high: f64 },
    /// Always reports `value`.
    Stubborn { value: f64 },
    /// Moves toward the mean of its visible cooperative neighbors with
    /// `gain` until `betrayal`, then behaves like `Random { low, high }`.
    ///
    /// This is an extension: a simple trust-winning rule that imitates
    /// cooperative behavior, not a published update law.
    Stealth {
        gain: f64,
        #[serde(default)]
        betrayal: Option<u64>,
        #[serde(default = "unit_low")]
        low: f64,
        #[serde(default = "unit_high")]
        high: f64,
    },
}

fn unit_low() -> f64 {
    0.0
}

fn unit_high() -> f64 {
    1.0
}

impl Default for BehaviorModel {
    fn default() -> Self {
        BehaviorModel::Random { low: 0.0, high: 1.0 }
    }
}

impl BehaviorModel {
    pub fn is_cooperative(&self) -> bool {
        matches!(self, BehaviorModel::Cooperative)
    }

    pub fn validate(&self) -> Result<()> {
        let interval = |low: f64, high: f64| {
            if low < high && low.is_finite() && high.is_finite() {
                Ok(())
            } else {
                Err(HddError::Behavior(format!("invalid interval [{low}, {high}]")))
            }
        };
        match *self {
            BehaviorModel::Cooperative => Ok(()),
            BehaviorModel::Random { low, high } => interval(low, high),
            BehaviorModel::Stubborn { value } if value.is_finite() => Ok(()),
            BehaviorModel::Stubborn { value } => Err(HddError::Behavior(format!("non-finite value {value}"))),
            BehaviorModel::Stealth { gain, low, high, .. } => {
                if !(gain > 0.0 && gain <= 1.0) {
                    return Err(HddError::Behavior(format!("stealth gain {gain} outside (0, 1]")));
                }
                interval(low, high)
            }
        }
    }
}

/// Next state of a non-cooperative agent. `visible` holds the current states
/// of the cooperative agents it can observe.
pub fn adversary_step<R: Rng + ?Sized>(
    model: &BehaviorModel,
    own: f64,
    visible: &[f64],
    t: u64,
    rng: &mut R,
) -> Result<f64> {
    match *model {
        BehaviorModel::Cooperative => Err(HddError::Behavior("cooperative agents do not take adversary steps".into())),
        BehaviorModel::Random { low, high } => Ok(rng.gen_range(low..=high)),
        BehaviorModel::Stubborn { value } => Ok(value),
        BehaviorModel::Stealth { gain, betrayal, low, high } => {
            if betrayal.is_some_and(|tb| t >= tb) {
                return Ok(rng.gen_range(low..=high));
            }
            if visible.is_empty() {
                return Ok(own);
            }
            let target = visible.iter().sum::<f64>() / visible.len() as f64;
            Ok(own + gain * (target - own))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CooperativeOutcome {
    pub next_state: f64,
    /// Laid out like `view.inclusive`.
    pub weights: Vec<f64>,
    pub trace: TrustTrace,
}

/// Full protocol step for a cooperative agent whose window is current at the
/// step of `states`.
pub fn cooperative_step(
    window: &HistoryWindow,
    confidence: &ConfidenceSchedule,
    discount: &DiscountSchedule,
    states: &[f64],
    view: &NeighborView,
    with_covariance: bool,
) -> Result<CooperativeOutcome> {
    if window.neighbors() != view.neighbors.as_slice() {
        return Err(HddError::DimensionMismatch("window and view disagree on neighbors".into()));
    }
    let trace = estimate_trust(window, confidence, discount, with_covariance)?;
    let weights = hdd_weights(&trace.estimate.augmented())?;
    let next_state = hdd_step(states, &weights, view)?;
    Ok(CooperativeOutcome {
        next_state,
        weights,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn adversary_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let stubborn = BehaviorModel::Stubborn { value: 0.3 };
        for t in [0, 17, 1000] {
            assert_eq!(adversary_step(&stubborn, 0.9, &[0.1], t, &mut rng).unwrap(), 0.3);
        }
        let random = BehaviorModel::default();
        for t in 0..200 {
            let x = adversary_step(&random, 0.5, &[], t, &mut rng).unwrap();
            assert!((0.0..=1.0).contains(&x));
        }
        let stealth = BehaviorModel::Stealth { gain: 1.0, betrayal: None, low: 0.0, high: 1.0 };
        assert_eq!(adversary_step(&stealth, 0.9, &[0.2, 0.4], 5, &mut rng).unwrap(), 0.30000000000000004);
        assert_eq!(adversary_step(&stealth, 0.9, &[], 5, &mut rng).unwrap(), 0.9);
        assert!(adversary_step(&BehaviorModel::Cooperative, 0.0, &[], 0, &mut rng).is_err());
    }

    #[test]
    fn stealth_betrays() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = BehaviorModel::Stealth { gain: 0.5, betrayal: Some(10), low: 5.0, high: 6.0 };
        assert_eq!(adversary_step(&m, 1.0, &[3.0], 9, &mut rng).unwrap(), 2.0);
        let x = adversary_step(&m, 1.0, &[3.0], 10, &mut rng).unwrap();
        assert!((5.0..=6.0).contains(&x));
    }

    #[test]
    fn model_validation() {
        assert!(BehaviorModel::Random { low: 1.0, high: 0.0 }.validate().is_err());
        assert!(BehaviorModel::Stealth { gain: 0.0, betrayal: None, low: 0.0, high: 1.0 }.validate().is_err());
        assert!(BehaviorModel::Stealth { gain: 1.0, betrayal: Some(3), low: 0.0, high: 1.0 }.validate().is_ok());
        assert!(BehaviorModel::Stubborn { value: f64::NAN }.validate().is_err());
    }

    fn pair_window(xi: f64, xj: f64, horizon: usize) -> (HistoryWindow, NeighborView) {
        let view = Graph::from_edges(2, [(0, 1)], []).unwrap().neighbor_view(0).unwrap();
        let w = HistoryWindow::from_values(0, 10, vec![xi; horizon], vec![1], vec![vec![xj; horizon]]).unwrap();
        (w, view)
    }

    #[test]
    fn isolated_agent_keeps_state() {
        let (w, view) = pair_window(0.0, 5.0, 3);
        let s = ConfidenceSchedule::from_sorted(vec![0.3, 0.2, 0.1]).unwrap();
        let out = cooperative_step(&w, &s, &DiscountSchedule::Constant(0.5), &[0.0, 5.0], &view, false).unwrap();
        assert_eq!(out.next_state, 0.0);
        assert_eq!(out.weights, vec![0.0, 1.0]);
    }

    #[test]
    fn chained_example() {
        let (w, view) = pair_window(0.0, 1.0, 3);
        let s = ConfidenceSchedule::from_sorted(vec![3.0, 2.0, 1.0]).unwrap();
        let out = cooperative_step(&w, &s, &DiscountSchedule::Constant(0.5), &[0.0, 1.0], &view, true).unwrap();
        let mu = 0.583_333_333_333_333_3;
        assert!((out.trace.estimate.mean[0] - mu).abs() < 1e-12);
        assert!((out.weights[0] - 0.368_421_052_631_578_9).abs() < 1e-12);
        assert!((out.weights[1] - 0.631_578_947_368_421_1).abs() < 1e-12);
        assert!((out.next_state - 0.368_421_052_631_578_9).abs() < 1e-12);
    }

    #[test]
    fn consensus_is_a_fixed_point() {
        let (w, view) = pair_window(0.4, 0.4, 4);
        let s = ConfidenceSchedule::from_sorted(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let out = cooperative_step(&w, &s, &DiscountSchedule::Constant(0.9), &[0.4, 0.4], &view, true).unwrap();
        assert!((out.next_state - 0.4).abs() < 1e-15);
    }
}

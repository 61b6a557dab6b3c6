#![allow(dead_code)]

use hdd_consensus::history::HistoryWindow;
use hdd_consensus::trust::ConfidenceSchedule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random estimator input.
#[derive(Debug, Clone)]
pub struct Instance {
    pub agent: usize,
    pub newest: i64,
    pub own: Vec<f64>,
    pub neighbors: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
    pub bounds: Vec<f64>,
    pub nu: f64,
}

impl Instance {
    pub fn random(rng: &mut ChaCha8Rng, max_degree: usize, horizons: std::ops::RangeInclusive<usize>) -> Self {
        let horizon = rng.gen_range(horizons);
        let degree = rng.gen_range(0..=max_degree);
        let agent = rng.gen_range(0..20);
        let mut neighbors: Vec<usize> = (0..20).filter(|&j| j != agent).collect();
        for k in (1..neighbors.len()).rev() {
            neighbors.swap(k, rng.gen_range(0..=k));
        }
        neighbors.truncate(degree);
        neighbors.sort_unstable();
        let own: Vec<f64> = (0..horizon).map(|_| rng.gen_range(0.0..1.0)).collect();
        let rows = (0..degree)
            .map(|_| {
                let scale = [0.2, 1.0, 3.0][rng.gen_range(0..3)];
                (0..horizon).map(|_| rng.gen_range(0.0..scale)).collect()
            })
            .collect();
        let mut bounds: Vec<f64> = (0..horizon).map(|_| rng.gen_range(0.01..0.8)).collect();
        bounds.sort_by(|a, b| b.total_cmp(a));
        bounds.dedup();
        while bounds.len() < horizon {
            let last = *bounds.last().unwrap();
            bounds.push(last * 0.5);
        }
        Instance {
            agent,
            newest: rng.gen_range(-20..300),
            own,
            neighbors,
            rows,
            bounds,
            nu: rng.gen_range(0.01..0.99),
        }
    }

    pub fn horizon(&self) -> usize {
        self.own.len()
    }

    pub fn window(&self) -> HistoryWindow {
        HistoryWindow::from_values(self.agent, self.newest, self.own.clone(), self.neighbors.clone(), self.rows.clone())
            .unwrap()
    }

    pub fn schedule(&self) -> ConfidenceSchedule {
        ConfidenceSchedule::from_sorted(self.bounds.clone()).unwrap()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Everything recomputed from the definitions with plain loops.
#[derive(Debug, Clone)]
pub struct Brute {
    /// `member[j][c]`: neighbor `j` inside the ball at window column `c`.
    pub member: Vec<Vec<bool>>,
    pub counters: Vec<Vec<i64>>,
    pub importance: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub variability: Vec<Vec<f64>>,
    pub covariance: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

pub fn brute_force(inst: &Instance) -> Brute {
    let t = inst.newest;
    let horizon = inst.horizon();
    let d = inst.neighbors.len();
    let oldest = t - horizon as i64 + 1;
    let mut member = vec![vec![false; horizon]; d];
    let mut counters = vec![Vec::new(); d];
    let mut importance = vec![vec![0.0; horizon]; d];
    let mut variability = vec![vec![0.0; horizon]; d];
    for j in 0..d {
        for c in 0..horizon {
            let gap = (inst.rows[j][c] - inst.own[c]).abs();
            variability[j][c] = gap / (1.0 + gap);
            if gap <= inst.bounds[c] {
                member[j][c] = true;
                let k = oldest + c as i64;
                counters[j].push(k);
                let mut p = 1.0;
                for _ in k..t {
                    p *= inst.nu;
                }
                importance[j][c] = p;
            }
        }
    }
    let mean: Vec<f64> = importance.iter().map(|v| v.iter().sum::<f64>() / horizon as f64).collect();
    let mut covariance = vec![vec![0.0; d]; d];
    for (r, row) in covariance.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in 0..horizon {
                s += (variability[r][k] - mean[r]) * (variability[c][k] - mean[c]);
            }
            *cell = s / (horizon as f64 - 1.0);
        }
    }
    let norm: f64 = 1.0 + mean.iter().sum::<f64>();
    let mut weights: Vec<f64> = mean.iter().map(|m| m / norm).collect();
    weights.push(1.0 / norm);
    Brute {
        member,
        counters,
        importance,
        mean,
        variability,
        covariance,
        weights,
    }
}

/// `(1 - ν^T) / (T (1 - ν))` via an explicit geometric sum.
pub fn full_membership_mean(nu: f64, horizon: usize) -> f64 {
    let mut s = 0.0;
    let mut p = 1.0;
    for _ in 0..horizon {
        s += p;
        p *= nu;
    }
    s / horizon as f64
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 0.0;
    }
    let mat = nalgebra::DMatrix::from_fn(n, n, |r, c| m[r][c]);
    nalgebra::SymmetricEigen::new(mat)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Connected components by repeated edge relaxation.
pub fn component_count(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for &(a, b) in edges {
            let m = label[a].min(label[b]);
            if label[a] != m || label[b] != m {
                label[a] = m;
                label[b] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut roots = label.clone();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

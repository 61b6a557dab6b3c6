//! Preset experiments: 13 agents (10 cooperative on a random core with edge
//! probability 0.4, 3 adversaries attached to every cooperative agent),
//! 200 rounds, confidence bounds drawn from `U[0.01, ε̄]`.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::agents::BehaviorModel;
use crate::config::{Assignment, GraphConfig, SimConfig};
use crate::error::{HddError, Result};
use crate::graph::AgentId;
use crate::sim::{self, SweepAxes, SweepOptions, TrajectoryLog};
use crate::trust::ConfidenceSpec;

/// Discount factors run by `run_scenario`.
pub const SCENARIO_NUS: [f64; 3] = [0.05, 0.5, 0.95];
/// Lower confidence limit shared by every preset.
pub const EPS_MIN: f64 = 0.01;
/// Agents whose final weight columns are reported by the ν sweep:
/// one cooperative agent and the three adversaries.
pub const REPORT_COLUMNS: [AgentId; 4] = [1, 10, 11, 12];
/// The adversary that plays the stealth role in the ν sweep.
pub const STEALTH_AGENT: AgentId = 12;

/// `0.05, 0.10, …, 0.95`.
pub fn nu_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Scenario {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Fig1a, Scenario::Fig1b, Scenario::Fig1c, Scenario::Fig1d];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1a => "fig1a",
            Scenario::Fig1b => "fig1b",
            Scenario::Fig1c => "fig1c",
            Scenario::Fig1d => "fig1d",
        }
    }

    pub fn horizon(self) -> usize {
        match self {
            Scenario::Fig1d => 5,
            _ => 15,
        }
    }

    pub fn eps_max(self) -> f64 {
        match self {
            Scenario::Fig1a => 0.5,
            Scenario::Fig1b | Scenario::Fig1d => 1.0,
            Scenario::Fig1c => 1.5,
        }
    }

    /// Three random adversaries.
    pub fn config(self, seed: u64, nu: f64) -> SimConfig {
        SimConfig {
            seed,
            steps: 200,
            horizon: self.horizon(),
            nu,
            graph: GraphConfig {
                n_coop: 10,
                n_noncoop: 3,
                edge_prob: 0.4,
                ..GraphConfig::default()
            },
            confidence: ConfidenceSpec::SortedUniform {
                lower: EPS_MIN,
                upper: self.eps_max(),
            },
            adversaries: crate::config::AdversaryConfig {
                default: BehaviorModel::Random { low: 0.0, high: 1.0 },
                assign: Vec::new(),
            },
            ..SimConfig::default()
        }
    }

    /// Two random adversaries and one stealth adversary that tracks the
    /// cooperative mean and never betrays within the run.
    pub fn stealth_config(self, seed: u64, nu: f64) -> SimConfig {
        let mut cfg = self.config(seed, nu);
        cfg.adversaries.assign.push(Assignment {
            agent: STEALTH_AGENT,
            model: BehaviorModel::Stealth {
                gain: 0.5,
                betrayal: None,
                low: 0.0,
                high: 1.0,
            },
        });
        cfg
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = HddError;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| HddError::UnknownScenario(s.to_string()))
    }
}

/// What a batch command produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// Resolved configs, one per executed run or sweep base.
    pub configs: Vec<SimConfig>,
    pub out_dir: PathBuf,
    pub artifacts: Vec<PathBuf>,
}

/// Tracks files written so far and deletes them if the batch fails.
struct ArtifactSet {
    out_dir: PathBuf,
    written: Vec<PathBuf>,
    done: bool,
}

impl ArtifactSet {
    fn new(out_dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        Ok(ArtifactSet {
            out_dir: out_dir.to_path_buf(),
            written: Vec::new(),
            done: false,
        })
    }

    fn write(&mut self, name: &str, f: impl FnOnce(BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.out_dir.join(name);
        self.written.push(path.clone());
        f(BufWriter::new(File::create(&path)?))
    }

    fn finish(mut self, configs: Vec<SimConfig>) -> RunManifest {
        self.done = true;
        RunManifest {
            configs,
            out_dir: self.out_dir.clone(),
            artifacts: std::mem::take(&mut self.written),
        }
    }
}

impl Drop for ArtifactSet {
    fn drop(&mut self) {
        if !self.done {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

/// Writes `<stem>.states.csv`, `<stem>.weights.csv` and `<stem>.meta.json`.
pub fn write_run_artifacts(log: &TrajectoryLog, out_dir: &Path, stem: &str) -> Result<RunManifest> {
    let mut set = ArtifactSet::new(out_dir)?;
    write_log(&mut set, log, stem)?;
    Ok(set.finish(vec![log.config.clone()]))
}

fn write_log(set: &mut ArtifactSet, log: &TrajectoryLog, stem: &str) -> Result<()> {
    set.write(&format!("{stem}.states.csv"), |w| sim::write_states_csv(log, w))?;
    set.write(&format!("{stem}.weights.csv"), |w| sim::write_weights_csv(log, w))?;
    set.write(&format!("{stem}.meta.json"), |w| sim::write_metadata(log, w))
}

/// Runs one preset for each of `SCENARIO_NUS`, writing one set of artifacts per ν.
pub fn run_scenario(scenario: Scenario, seed: u64, out_dir: &Path) -> Result<RunManifest> {
    let mut set = ArtifactSet::new(out_dir)?;
    let mut configs = Vec::new();
    for nu in SCENARIO_NUS {
        let cfg = scenario.config(seed, nu);
        let log = sim::run(&cfg)?;
        write_log(&mut set, &log, &format!("{scenario}_nu{nu:.2}_seed{seed}"))?;
        configs.push(cfg);
    }
    Ok(set.finish(configs))
}

/// Final-state and final-weight-column tables over the 19-point ν grid for
/// each listed preset, plus a single metadata file for the whole batch.
pub fn run_nu_sweep(scenarios: &[Scenario], seeds: &[u64], out_dir: &Path) -> Result<RunManifest> {
    if scenarios.is_empty() {
        return Err(HddError::InvalidSweep("no scenarios selected".into()));
    }
    if seeds.is_empty() {
        return Err(HddError::InvalidSweep("seed list is empty".into()));
    }
    let mut set = ArtifactSet::new(out_dir)?;
    let axes = SweepAxes {
        nu: nu_grid(),
        ..SweepAxes::default()
    };
    let options = SweepOptions {
        weight_columns: REPORT_COLUMNS.to_vec(),
        ..SweepOptions::default()
    };
    let mut configs = Vec::new();
    for &scenario in scenarios {
        let base = scenario.stealth_config(seeds[0], 0.5);
        let mut table = sim::sweep(&base, &axes, seeds, &options)?;
        table.canonical_sort();
        set.write(&format!("{scenario}_final_states.csv"), |w| table.write_states_csv(w))?;
        set.write(&format!("{scenario}_final_weights.csv"), |w| table.write_weight_columns_csv(w))?;
        configs.push(base);
    }
    let meta = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "scenarios": scenarios.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "seeds": seeds,
        "nu_grid": nu_grid(),
        "weight_columns": REPORT_COLUMNS,
        "configs": configs,
    });
    set.write("nu_sweep.meta.json", |w| Ok(serde_json::to_writer_pretty(w, &meta)?))?;
    Ok(set.finish(configs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_parameters() {
        assert_eq!((Scenario::Fig1b.horizon(), Scenario::Fig1b.eps_max()), (15, 1.0));
        assert_eq!((Scenario::Fig1d.horizon(), Scenario::Fig1d.eps_max()), (5, 1.0));
        assert_eq!(Scenario::Fig1a.eps_max(), 0.5);
        assert_eq!(Scenario::Fig1c.eps_max(), 1.5);
        let cfg = Scenario::Fig1c.config(3, 0.5);
        cfg.validate().unwrap();
        assert_eq!(cfg.n_agents(), 13);
        assert_eq!(cfg.steps, 200);
    }

    #[test]
    fn names_parse() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!(matches!("fig2".parse::<Scenario>(), Err(HddError::UnknownScenario(_))));
    }

    #[test]
    fn nu_grid_has_19_points() {
        let g = nu_grid();
        assert_eq!(g.len(), 19);
        assert!((g[0] - 0.05).abs() < 1e-12 && (g[18] - 0.95).abs() < 1e-12);
    }

    #[test]
    fn stealth_preset_has_one_stealth() {
        let cfg = Scenario::Fig1b.stealth_config(0, 0.5);
        assert!(matches!(cfg.behavior(12), BehaviorModel::Stealth { .. }));
        assert!(matches!(cfg.behavior(11), BehaviorModel::Random { .. }));
    }
}

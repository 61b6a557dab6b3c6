//! Experiment configuration: a TOML file with nested sections plus flat
//! `dotted.key=value` overrides.
//!
//! ```toml
//! seed = 7
//! steps = 200
//! horizon = 15
//! nu = 0.95
//!
//! [graph]
//! n_coop = 10
//! n_noncoop = 3
//! edge_prob = 0.4
//!
//! [confidence]
//! kind = "sorted-uniform"
//! lower = 0.01
//! upper = 1.0
//!
//! [[adversaries.assign]]
//! agent = 12
//! kind = "stealth"
//! gain = 0.5
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::BehaviorModel;
use crate::error::{HddError, Result};
use crate::graph::AgentId;
use crate::history::PrefillStrategy;
use crate::trust::ConfidenceSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub n_coop: usize,
    pub n_noncoop: usize,
    pub edge_prob: f64,
    pub adversary_links: bool,
    pub require_connected: bool,
    pub max_attempts: usize,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            n_coop: 10,
            n_noncoop: 3,
            edge_prob: 0.4,
            adversary_links: false,
            require_connected: true,
            max_attempts: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialStates {
    pub low: f64,
    pub high: f64,
}

impl Default for InitialStates {
    fn default() -> Self {
        InitialStates { low: 0.0, high: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub agent: AgentId,
    #[serde(flatten)]
    pub model: BehaviorModel,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdversaryConfig {
    /// Behavior of every non-cooperative agent without an explicit assignment.
    pub default: BehaviorModel,
    pub assign: Vec<Assignment>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoggingConfig {
    /// Record `W(t)` every this many steps; 0 keeps only the final snapshot.
    pub snapshot_every: usize,
    /// Also record trust estimates at snapshot steps.
    pub estimates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    /// Number of update rounds `T_t`.
    pub steps: usize,
    /// History length `T`.
    pub horizon: usize,
    /// Constant discount factor shared by every agent.
    pub nu: f64,
    /// Compute the estimated covariance alongside the mean.
    pub covariance: bool,
    pub graph: GraphConfig,
    pub confidence: ConfidenceSpec,
    pub prefill: PrefillStrategy,
    pub initial: InitialStates,
    pub adversaries: AdversaryConfig,
    pub logging: LoggingConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            steps: 200,
            horizon: 15,
            nu: 0.5,
            covariance: true,
            graph: GraphConfig::default(),
            confidence: ConfidenceSpec::default(),
            prefill: PrefillStrategy::default(),
            initial: InitialStates::default(),
            adversaries: AdversaryConfig::default(),
            logging: LoggingConfig::default(),
        }
    }
}

/// Every key accepted in a config file or override, with a short description.
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("seed", "base seed for every random substream (0..=2^63-1)"),
    ("steps", "number of synchronous update rounds"),
    ("horizon", "history window length T (>= 2)"),
    ("nu", "discount factor in (0, 1)"),
    ("covariance", "compute the estimated covariance (true/false)"),
    ("graph.n_coop", "number of cooperative agents (ids 0..n_coop)"),
    ("graph.n_noncoop", "number of non-cooperative agents"),
    ("graph.edge_prob", "edge probability inside the cooperative core"),
    ("graph.adversary_links", "link non-cooperative agents to each other"),
    ("graph.require_connected", "resample until the graph is connected"),
    ("graph.max_attempts", "sampling attempts before giving up on connectivity"),
    ("confidence.kind", "sorted-uniform | exponential-decay | geometric-decay"),
    ("confidence.lower", "sorted-uniform: lower bound of the draw"),
    ("confidence.upper", "sorted-uniform: upper bound of the draw"),
    ("confidence.amplitude", "decay kinds: amplitude R"),
    ("confidence.rate", "exponential-decay: rate"),
    ("confidence.ratio", "geometric-decay: ratio in (0, 1)"),
    ("prefill.kind", "uniform | hold"),
    ("prefill.low", "uniform prefill: lower bound"),
    ("prefill.high", "uniform prefill: upper bound"),
    ("initial.low", "initial states: lower bound"),
    ("initial.high", "initial states: upper bound"),
    ("adversaries.default.kind", "random | stubborn | stealth"),
    ("adversaries.default.low", "random/stealth: lower bound of random draws"),
    ("adversaries.default.high", "random/stealth: upper bound of random draws"),
    ("adversaries.default.value", "stubborn: constant reported value"),
    ("adversaries.default.gain", "stealth: tracking gain in (0, 1]"),
    ("adversaries.default.betrayal", "stealth: step at which it turns random"),
    ("adversaries.assign", "per-agent behavior list: [[adversaries.assign]] agent = id, kind = ..."),
    ("logging.snapshot_every", "record W(t) every k steps (0 = final only)"),
    ("logging.estimates", "record trust estimates at snapshot steps"),
];

/// Help text listing [`CONFIG_KEYS`].
pub fn config_keys_help() -> String {
    let width = CONFIG_KEYS.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::from("Config keys (file sections or --set dotted.key=value):\n");
    for (k, d) in CONFIG_KEYS {
        s.push_str(&format!("  {k:<width$}  {d}\n"));
    }
    s
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seed > i64::MAX as u64 {
            return Err(HddError::invalid("seed", format!("must fit a TOML integer (<= {}), got {}", i64::MAX, self.seed)));
        }
        if self.horizon < 2 {
            return Err(HddError::invalid("horizon", format!("must be >= 2, got {}", self.horizon)));
        }
        if self.steps < 1 {
            return Err(HddError::invalid("steps", "must be >= 1"));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(HddError::invalid("nu", format!("must lie in (0, 1), got {}", self.nu)));
        }
        let g = &self.graph;
        if g.n_coop == 0 {
            return Err(HddError::invalid("graph.n_coop", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&g.edge_prob) {
            return Err(HddError::invalid("graph.edge_prob", format!("must lie in [0, 1], got {}", g.edge_prob)));
        }
        if g.require_connected && g.max_attempts == 0 {
            return Err(HddError::invalid("graph.max_attempts", "must be >= 1"));
        }
        self.confidence
            .validate()
            .map_err(|e| HddError::invalid("confidence", e.to_string()))?;
        self.prefill
            .validate()
            .map_err(|e| HddError::invalid("prefill", e.to_string()))?;
        let InitialStates { low, high } = self.initial;
        if !(low < high) || !low.is_finite() || !high.is_finite() {
            return Err(HddError::invalid("initial", format!("need low < high, got [{low}, {high}]")));
        }
        let check_model = |field: &str, m: &BehaviorModel| -> Result<()> {
            if m.is_cooperative() {
                return Err(HddError::invalid(field, "non-cooperative agents cannot be cooperative"));
            }
            m.validate().map_err(|e| HddError::invalid(field, e.to_string()))
        };
        check_model("adversaries.default", &self.adversaries.default)?;
        let n = self.n_agents();
        let mut seen = Vec::new();
        for a in &self.adversaries.assign {
            if a.agent < g.n_coop || a.agent >= n {
                return Err(HddError::invalid(
                    "adversaries.assign",
                    format!("agent {} is not a non-cooperative id ({}..{n})", a.agent, g.n_coop),
                ));
            }
            if seen.contains(&a.agent) {
                return Err(HddError::invalid("adversaries.assign", format!("agent {} assigned twice", a.agent)));
            }
            seen.push(a.agent);
            check_model("adversaries.assign", &a.model)?;
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.graph.n_coop + self.graph.n_noncoop
    }

    /// Behavior of agent `i` under this config.
    pub fn behavior(&self, i: AgentId) -> BehaviorModel {
        if i < self.graph.n_coop {
            return BehaviorModel::Cooperative;
        }
        self.adversaries
            .assign
            .iter()
            .find(|a| a.agent == i)
            .map_or(self.adversaries.default, |a| a.model)
    }

    /// Upper confidence limit for sorted-uniform schedules.
    pub fn eps_max(&self) -> Option<f64> {
        match self.confidence {
            ConfidenceSpec::SortedUniform { upper, .. } => Some(upper),
            _ => None,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Parses TOML text layered over the defaults, applies overrides, validates.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let file: toml::Table = toml::from_str(text).map_err(|e| HddError::ConfigParse(e.to_string()))?;
        let mut merged = default_table();
        merge(&mut merged, file);
        for ov in overrides {
            apply_override(&mut merged, ov)?;
        }
        let cfg: SimConfig = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| HddError::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies overrides to an already-resolved config.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        Self::from_toml_str(&self.to_toml(), overrides)
    }
}

/// Reads `path`, applies `key=value` overrides (override wins) and validates.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => HddError::ConfigNotFound { path: path.to_path_buf() },
        _ => HddError::Io(e),
    })?;
    SimConfig::from_toml_str(&text, overrides)
}

fn default_table() -> toml::Table {
    match toml::Value::try_from(SimConfig::default()).expect("default config serializes") {
        toml::Value::Table(t) => t,
        _ => unreachable!("config serializes to a table"),
    }
}

/// Deep merge. A table whose `kind` tag changes is replaced wholesale so
/// fields of the old variant do not leak into the new one.
fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) if same_kind(b, &o) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn same_kind(a: &toml::Table, b: &toml::Table) -> bool {
    match (a.get("kind"), b.get("kind")) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    }
}

fn parse_scalar(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn apply_override(table: &mut toml::Table, ov: &str) -> Result<()> {
    let (key, raw) = ov
        .split_once('=')
        .ok_or_else(|| HddError::ConfigParse(format!("override `{ov}` is not key=value")))?;
    let key = key.trim();
    let path: Vec<&str> = key.split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(HddError::ConfigParse(format!("malformed key `{key}`")));
    }
    let (last, parents) = path.split_last().expect("split yields at least one part");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(HddError::ConfigParse(format!("`{p}` in `{key}` is not a section"))),
        };
    }
    let value = parse_scalar(raw.trim());
    if *last == "kind" && cur.get("kind").is_some_and(|k| *k != value) {
        // switching variants drops the old variant's fields
        cur.clear();
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_wins() {
        let cfg = SimConfig::from_toml_str("nu = 0.5", &["nu=0.95".into()]).unwrap();
        assert_eq!(cfg.nu, 0.95);
    }

    #[test]
    fn nested_overrides() {
        let cfg = SimConfig::from_toml_str(
            "[confidence]\nkind = \"sorted-uniform\"\nlower = 0.01\nupper = 0.5\n",
            &["confidence.upper=1.5".into(), "graph.n_coop=4".into()],
        )
        .unwrap();
        assert_eq!(cfg.eps_max(), Some(1.5));
        assert_eq!(cfg.graph.n_coop, 4);
        assert_eq!(cfg.graph.edge_prob, 0.4);
    }

    #[test]
    fn switching_kind_drops_old_fields() {
        let cfg = SimConfig::from_toml_str(
            "",
            &[
                "confidence.kind=geometric-decay".into(),
                "confidence.amplitude=1.0".into(),
                "confidence.ratio=0.9".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.confidence, ConfidenceSpec::GeometricDecay { amplitude: 1.0, ratio: 0.9 });
        let cfg = SimConfig::from_toml_str("[confidence]\nkind = \"exponential-decay\"\namplitude = 2.0\nrate = 0.1\n", &[]).unwrap();
        assert_eq!(cfg.confidence, ConfidenceSpec::ExponentialDecay { amplitude: 2.0, rate: 0.1 });
    }

    #[test]
    fn horizon_one_is_rejected() {
        for (text, ov) in [("horizon = 1", vec![]), ("", vec!["horizon=1".to_string()])] {
            match SimConfig::from_toml_str(text, &ov) {
                Err(HddError::ConfigInvalid { field, .. }) => assert_eq!(field, "horizon"),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn missing_file_differs_from_parse_failure() {
        let missing = load_config(Path::new("/nonexistent/hdd.toml"), &[]);
        assert!(matches!(missing, Err(HddError::ConfigNotFound { .. })));
        let bad = SimConfig::from_toml_str("nu = [", &[]);
        assert!(matches!(bad, Err(HddError::ConfigParse(_))));
        let unknown = SimConfig::from_toml_str("bogus = 1", &[]);
        assert!(matches!(unknown, Err(HddError::ConfigParse(_))));
    }

    #[test]
    fn field_precise_validation() {
        let field = |text: &str| match SimConfig::from_toml_str(text, &[]) {
            Err(HddError::ConfigInvalid { field, .. }) => field,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(field("nu = 1.0"), "nu");
        assert_eq!(field("steps = 0"), "steps");
        assert_eq!(field("[graph]\nn_coop = 0"), "graph.n_coop");
        assert_eq!(field("[graph]\nedge_prob = 1.2"), "graph.edge_prob");
        assert_eq!(field("[confidence]\nlower = 0.0"), "confidence");
        assert_eq!(field("[initial]\nlow = 2.0"), "initial");
        assert_eq!(field("[adversaries.default]\nkind = \"cooperative\""), "adversaries.default");
        assert_eq!(field("[[adversaries.assign]]\nagent = 3\nkind = \"stubborn\"\nvalue = 0.1"), "adversaries.assign");
    }

    #[test]
    fn assignments() {
        let cfg = SimConfig::from_toml_str(
            "[[adversaries.assign]]\nagent = 12\nkind = \"stealth\"\ngain = 0.5\n",
            &[],
        )
        .unwrap();
        assert_eq!(cfg.behavior(0), BehaviorModel::Cooperative);
        assert_eq!(cfg.behavior(10), BehaviorModel::default());
        assert_eq!(
            cfg.behavior(12),
            BehaviorModel::Stealth { gain: 0.5, betrayal: None, low: 0.0, high: 1.0 }
        );
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = SimConfig::default();
        cfg.adversaries.assign.push(Assignment {
            agent: 11,
            model: BehaviorModel::Stubborn { value: 0.2 },
        });
        let back = SimConfig::from_toml_str(&cfg.to_toml(), &[]).unwrap();
        assert_eq!(back, cfg);
    }

    fn flatten(prefix: &str, v: &toml::Value, out: &mut Vec<String>) {
        match v {
            toml::Value::Table(t) => {
                for (k, v) in t {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    flatten(&key, v, out);
                }
            }
            _ => out.push(prefix.to_string()),
        }
    }

    #[test]
    fn every_default_key_is_documented() {
        let mut keys = Vec::new();
        flatten("", &toml::Value::try_from(SimConfig::default()).unwrap(), &mut keys);
        let documented: Vec<&str> = CONFIG_KEYS.iter().map(|(k, _)| *k).collect();
        for k in keys {
            assert!(documented.contains(&k.as_str()), "undocumented key {k}");
        }
        let help = config_keys_help();
        assert!(documented.iter().all(|k| help.contains(k)));
    }
}

//! Confidence-bound schedules over a window and their effect on a run.

use hdd_consensus::config::SimConfig;
use hdd_consensus::sim::{self, detect_clusters};
use hdd_consensus::trust::{ConfidenceSchedule, ConfidenceSpec};
use rand::SeedableRng;

fn main() -> hdd_consensus::Result<()> {
    let horizon = 6;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let schedules = [
        ("sorted-uniform", ConfidenceSchedule::sorted_uniform(0.01, 1.0, horizon, &mut rng)?),
        ("exponential", ConfidenceSchedule::ExponentialDecay { amplitude: 1.0, rate: 0.01 }),
        ("geometric", ConfidenceSchedule::GeometricDecay { amplitude: 1.0, ratio: 0.99 }),
    ];
    for (name, s) in &schedules {
        for t in [5, 100] {
            let b: Vec<String> = s.bounds(t, horizon)?.iter().map(|v| format!("{v:.3}")).collect();
            println!("{name:>14} t={t:>3}: {}", b.join(" "));
        }
    }

    let specs = [
        ConfidenceSpec::SortedUniform { lower: 0.01, upper: 1.0 },
        ConfidenceSpec::ExponentialDecay { amplitude: 1.0, rate: 0.01 },
        ConfidenceSpec::GeometricDecay { amplitude: 1.0, ratio: 0.99 },
    ];
    for spec in specs {
        let cfg = SimConfig { confidence: spec, nu: 0.9, ..SimConfig::default() };
        let log = sim::run(&cfg)?;
        let clusters = detect_clusters(&log.final_cooperative_states(), 1e-2)?.count();
        println!("{spec:?}: {clusters} final clusters");
    }
    Ok(())
}

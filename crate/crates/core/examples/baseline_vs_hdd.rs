//! A stubborn agent drags memoryless uniform averaging to its value; the
//! trust-weighted rule drops it once its history stops matching.

use hdd_consensus::agents::BehaviorModel;
use hdd_consensus::config::{AdversaryConfig, GraphConfig, SimConfig};
use hdd_consensus::protocol::baseline_step;
use hdd_consensus::sim;
use hdd_consensus::trust::ConfidenceSpec;

fn main() -> hdd_consensus::Result<()> {
    let cfg = SimConfig {
        seed: 2,
        steps: 200,
        horizon: 10,
        nu: 0.3,
        graph: GraphConfig { n_coop: 8, n_noncoop: 1, edge_prob: 0.5, ..GraphConfig::default() },
        confidence: ConfidenceSpec::SortedUniform { lower: 0.01, upper: 0.3 },
        adversaries: AdversaryConfig { default: BehaviorModel::Stubborn { value: 2.0 }, assign: Vec::new() },
        ..SimConfig::default()
    };
    let log = sim::run(&cfg)?;
    let g = &log.graph;
    let coop = g.cooperative_agents();
    let views: Vec<_> = (0..g.n_agents()).map(|i| g.neighbor_view(i)).collect::<Result<_, _>>()?;

    let mut x = log.states_at(0).to_vec();
    for _ in 0..cfg.steps {
        let next: Vec<f64> = (0..x.len())
            .map(|i| if g.is_cooperative(i) { baseline_step(&x, &views[i]) } else { x[i] })
            .collect();
        x = next;
    }
    let mean = |xs: &[f64]| coop.iter().map(|&i| xs[i]).sum::<f64>() / coop.len() as f64;
    println!("stubborn value      2.0");
    println!("initial coop mean   {:.4}", mean(log.states_at(0)));
    println!("uniform averaging   {:.4}", mean(&x));
    println!("trust weighted      {:.4}", mean(log.final_states()));
    Ok(())
}

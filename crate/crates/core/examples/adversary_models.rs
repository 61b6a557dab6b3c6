//! How much final weight each kind of adversary keeps, for a short and a long memory.

use hdd_consensus::agents::BehaviorModel;
use hdd_consensus::config::Assignment;
use hdd_consensus::scenario::Scenario;
use hdd_consensus::sim;

fn main() -> hdd_consensus::Result<()> {
    let models = [
        (10, BehaviorModel::Random { low: 0.0, high: 1.0 }),
        (11, BehaviorModel::Stubborn { value: 0.9 }),
        (12, BehaviorModel::Stealth { gain: 0.5, betrayal: Some(150), low: 0.0, high: 1.0 }),
    ];
    for nu in [0.05, 0.95] {
        let mut cfg = Scenario::Fig1b.config(1, nu);
        cfg.adversaries.assign = models.iter().map(|&(agent, model)| Assignment { agent, model }).collect();
        cfg.logging.snapshot_every = 50;
        let log = sim::run(&cfg)?;
        println!("nu = {nu}");
        for w in &log.weights {
            let summary: Vec<String> = models
                .iter()
                .map(|&(j, _)| {
                    let col = w.column(j);
                    let mean = col.iter().map(|&(_, v)| v).sum::<f64>() / col.len() as f64;
                    format!("agent {j}: {mean:.4}")
                })
                .collect();
            println!("  t={:>3} mean weight  {}", w.step, summary.join("  "));
        }
    }
    Ok(())
}

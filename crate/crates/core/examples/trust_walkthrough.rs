//! Walks one agent's trust estimate through every stage of the pipeline.

use hdd_consensus::history::HistoryWindow;
use hdd_consensus::protocol::hdd_weights;
use hdd_consensus::trust::{estimate_trust, max_mean, ConfidenceSchedule, DiscountSchedule};

fn main() -> hdd_consensus::Result<()> {
    // Agent 0 watches neighbors 1 (close), 2 (drifting away) and 3 (far).
    let window = HistoryWindow::from_values(
        0,
        4,
        vec![0.50, 0.50, 0.50, 0.50, 0.50],
        vec![1, 2, 3],
        vec![
            vec![0.52, 0.49, 0.51, 0.50, 0.50],
            vec![0.55, 0.60, 0.75, 0.90, 1.10],
            vec![3.00, 2.50, 3.20, 2.80, 3.10],
        ],
    )?;
    let schedule = ConfidenceSchedule::from_sorted(vec![0.6, 0.4, 0.2, 0.1, 0.05])?;
    let nu = 0.8;
    let trace = estimate_trust(&window, &schedule, &DiscountSchedule::Constant(nu), true)?;

    println!("window times {:?}", trace.membership.times);
    for (k, members) in trace.membership.times.iter().zip(&trace.membership.members) {
        println!("  k={k:>2} in ball: {members:?}");
    }
    for (idx, &j) in window.neighbors().iter().enumerate() {
        println!(
            "neighbor {j}: counter {:?} importance {:?} mean {:.4}",
            trace.counters[idx], trace.importances[idx], trace.estimate.mean[idx]
        );
    }
    println!("mean bound (1-nu^T)/(T(1-nu)) = {:.4}", max_mean(nu, window.horizon()));
    let cov = trace.estimate.covariance.as_ref().unwrap();
    println!("covariance:");
    for r in 0..cov.rows() {
        println!("  {:?}", cov.row(r).iter().map(|v| format!("{v:+.4}")).collect::<Vec<_>>());
    }
    let w = hdd_weights(&trace.estimate.augmented())?;
    println!("weights (neighbors 1, 2, 3, self): {:?}", w.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
    Ok(())
}

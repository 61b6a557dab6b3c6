//! Cluster counts over a (T, nu) grid, run in parallel.

use hdd_consensus::scenario::Scenario;
use hdd_consensus::sim::{sweep, SweepAxes, SweepOptions};

fn main() -> hdd_consensus::Result<()> {
    let base = Scenario::Fig1b.config(0, 0.5);
    let axes = SweepAxes {
        horizon: vec![5, 15],
        nu: vec![0.05, 0.25, 0.5, 0.75, 0.95],
        ..SweepAxes::default()
    };
    let seeds: Vec<u64> = (0..5).collect();
    let mut table = sweep(&base, &axes, &seeds, &SweepOptions::default())?;
    table.canonical_sort();

    println!("  T    nu   mean clusters");
    for chunk in table.rows.chunks(seeds.len()) {
        let mean = chunk.iter().map(|r| r.cluster_count as f64).sum::<f64>() / chunk.len() as f64;
        println!("{:>3} {:>5.2}   {mean:.1}", chunk[0].horizon, chunk[0].nu);
    }
    table.write_states_csv(std::io::sink())?;
    Ok(())
}

//! Runs a preset for the three panel discounts and summarizes the final
//! cooperative states. Pass an output directory to also write the CSVs.
//!
//! ```text
//! cargo run --release --example scenario_presets -- fig1b 0 [OUT_DIR]
//! ```

use std::path::PathBuf;

use hdd_consensus::scenario::{self, Scenario, SCENARIO_NUS};
use hdd_consensus::sim::{self, detect_clusters};

fn main() -> hdd_consensus::Result<()> {
    let mut args = std::env::args().skip(1);
    let sc: Scenario = args.next().as_deref().unwrap_or("fig1b").parse()?;
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(0);
    let out = args.next().map(PathBuf::from);

    println!("{sc}: T={} eps_max={} seed={seed}", sc.horizon(), sc.eps_max());
    for nu in SCENARIO_NUS {
        let log = sim::run(&sc.config(seed, nu))?;
        let report = detect_clusters(&log.final_cooperative_states(), 1e-2)?;
        println!("nu={nu:.2}: {} clusters", report.count());
        for c in &report.clusters {
            println!("    {:.4} <- agents {:?}", c.representative, c.members);
        }
    }
    if let Some(dir) = out {
        let manifest = scenario::run_scenario(sc, seed, &dir)?;
        println!("wrote {} files to {}", manifest.artifacts.len(), dir.display());
    }
    Ok(())
}

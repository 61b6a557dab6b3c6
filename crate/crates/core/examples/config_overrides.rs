//! Builds a config from TOML text plus dotted overrides, as the CLI does.

use hdd_consensus::config::{config_keys_help, SimConfig};

const TEXT: &str = r#"
seed = 11
horizon = 8

[confidence]
kind = "geometric-decay"
amplitude = 1.0
ratio = 0.995

[[adversaries.assign]]
agent = 12
kind = "stealth"
gain = 0.5
betrayal = 120
"#;

fn main() -> hdd_consensus::Result<()> {
    let cfg = SimConfig::from_toml_str(TEXT, &["nu=0.9".into(), "graph.edge_prob=0.3".into()])?;
    print!("{}", cfg.to_toml());
    println!();
    match SimConfig::from_toml_str(TEXT, &["graph.n_coop=0".into()]) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    println!();
    print!("{}", config_keys_help());
    Ok(())
}

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hdd_consensus::config::{config_keys_help, load_config};
use hdd_consensus::scenario::{self, RunManifest, Scenario};
use hdd_consensus::sim::{self, SweepAxes, SweepOptions};
use hdd_consensus::{HddError, Result};

#[derive(Parser)]
#[command(name = "hdd", version, about = "History-data-driven consensus simulator", after_long_help = config_keys_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured experiment.
    #[command(after_long_help = config_keys_help())]
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. `--set nu=0.95`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, env = "HDD_OUT_DIR")]
        out: PathBuf,
    },
    /// Run a preset (fig1a..fig1d) for ν ∈ {0.05, 0.5, 0.95}.
    Scenario {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "HDD_OUT_DIR")]
        out: PathBuf,
    },
    /// Sweep a config over a grid of T, nu and eps_max values.
    #[command(after_long_help = config_keys_help())]
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// `T=5,15`, `nu=0.05,0.5` or `eps_max=0.5,1.0`; repeatable.
        #[arg(long, value_name = "KEY=V1,V2,...")]
        grid: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        /// Agents whose final weight columns are exported.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<usize>,
        #[arg(long, default_value_t = 1e-2)]
        cluster_tol: f64,
        /// Run grid points one after another instead of in parallel.
        #[arg(long)]
        serial: bool,
        #[arg(long, env = "HDD_OUT_DIR")]
        out: PathBuf,
    },
    /// ν-grid sweep over presets with final weight columns of agents 1, 10, 11, 12.
    NuSweep {
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        /// Presets to include; all four when omitted.
        #[arg(long = "scenario")]
        scenarios: Vec<String>,
        #[arg(long, env = "HDD_OUT_DIR")]
        out: PathBuf,
    },
    /// Write the configured graph as an `i j` edge list.
    GraphExport {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_grid(specs: &[String]) -> Result<SweepAxes> {
    let mut axes = SweepAxes::default();
    for spec in specs {
        let (key, values) = spec
            .split_once('=')
            .ok_or_else(|| HddError::InvalidSweep(format!("grid `{spec}` is not key=v1,v2,...")))?;
        let parse = |v: &str| -> Result<f64> {
            v.trim()
                .parse()
                .map_err(|_| HddError::InvalidSweep(format!("bad grid value `{v}` for `{key}`")))
        };
        let values: Vec<&str> = values.split(',').filter(|v| !v.trim().is_empty()).collect();
        match key.trim() {
            "T" | "horizon" => {
                axes.horizon = values
                    .iter()
                    .map(|v| v.trim().parse().map_err(|_| HddError::InvalidSweep(format!("bad horizon `{v}`"))))
                    .collect::<Result<_>>()?
            }
            "nu" => axes.nu = values.into_iter().map(parse).collect::<Result<_>>()?,
            "eps_max" | "confidence.upper" => axes.eps_max = values.into_iter().map(parse).collect::<Result<_>>()?,
            other => return Err(HddError::InvalidSweep(format!("unknown grid key `{other}`"))),
        }
    }
    Ok(axes)
}

fn write_file(path: &Path, f: impl FnOnce(BufWriter<File>) -> Result<()>) -> Result<()> {
    let result = File::create(path).map_err(HddError::from).and_then(|file| f(BufWriter::new(file)));
    if result.is_err() {
        let _ = std::fs::remove_file(path);
    }
    result
}

fn print_manifest(m: &RunManifest) {
    for a in &m.artifacts {
        println!("{}", a.display());
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, overrides, out } => {
            let cfg = load_config(&config, &overrides)?;
            let log = sim::run(&cfg)?;
            print_manifest(&scenario::write_run_artifacts(&log, &out, "run")?);
        }
        Command::Scenario { name, seed, out } => {
            let sc: Scenario = name.parse()?;
            print_manifest(&scenario::run_scenario(sc, seed, &out)?);
        }
        Command::Sweep {
            config,
            overrides,
            grid,
            seeds,
            columns,
            cluster_tol,
            serial,
            out,
        } => {
            let cfg = load_config(&config, &overrides)?;
            let axes = parse_grid(&grid)?;
            let options = SweepOptions {
                cluster_tol,
                weight_columns: columns,
                parallel: !serial,
            };
            let mut table = sim::sweep(&cfg, &axes, &seeds, &options)?;
            table.canonical_sort();
            std::fs::create_dir_all(&out)?;
            let states = out.join("sweep.csv");
            let weights = out.join("sweep_weights.csv");
            let meta = out.join("sweep.meta.json");
            let written = write_file(&states, |w| table.write_states_csv(w))
                .and_then(|_| write_file(&weights, |w| table.write_weight_columns_csv(w)))
                .and_then(|_| {
                    write_file(&meta, |w| {
                        let m = serde_json::json!({
                            "version": env!("CARGO_PKG_VERSION"),
                            "config": cfg,
                            "grid": { "T": axes.horizon, "nu": axes.nu, "eps_max": axes.eps_max },
                            "seeds": seeds,
                        });
                        Ok(serde_json::to_writer_pretty(w, &m)?)
                    })
                });
            if let Err(e) = written {
                for p in [&states, &weights, &meta] {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e);
            }
            for p in [states, weights, meta] {
                println!("{}", p.display());
            }
        }
        Command::NuSweep { seeds, scenarios, out } => {
            let list: Vec<Scenario> = if scenarios.is_empty() {
                Scenario::ALL.to_vec()
            } else {
                scenarios.iter().map(|s| s.parse()).collect::<Result<_>>()?
            };
            print_manifest(&scenario::run_nu_sweep(&list, &seeds, &out)?);
        }
        Command::GraphExport { config, overrides, out } => {
            let cfg = load_config(&config, &overrides)?;
            let graph = sim::config_graph(&cfg)?;
            write_file(&out, |w| graph.write_edge_list(w))?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hdd_consensus::config::CONFIG_KEYS;

fn hdd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdd"))
        .args(args)
        .env_remove("HDD_OUT_DIR")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"
seed = 3
steps = 40
horizon = 6
nu = 0.7

[graph]
n_coop = 6
n_noncoop = 2
edge_prob = 0.5

[confidence]
kind = "sorted-uniform"
lower = 0.01
upper = 1.0

[[adversaries.assign]]
agent = 7
kind = "stubborn"
value = 0.9
"#;

fn first_line(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn help_lists_every_config_key() {
    for args in [vec!["--help"], vec!["run", "--help"], vec!["sweep", "--help"]] {
        let out = hdd(&args);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        for (key, _) in CONFIG_KEYS {
            assert!(text.contains(key), "`{}` missing `{key}`", args.join(" "));
        }
    }
}

#[test]
fn run_writes_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = hdd(&["run", "--config", &cfg, "--set", "logging.snapshot_every=10", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["run.states.csv", "run.weights.csv", "run.meta.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert_eq!(first_line(&a.join("run.states.csv")), "t,agent,state");
    assert_eq!(first_line(&a.join("run.weights.csv")), "t,i,j,w");
    let states = fs::read_to_string(a.join("run.states.csv")).unwrap();
    assert_eq!(states.lines().count(), 1 + 41 * 8);
    let weight_steps: std::collections::BTreeSet<String> = fs::read_to_string(a.join("run.weights.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(weight_steps.into_iter().collect::<Vec<_>>(), vec!["0", "10", "20", "30", "40"]);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("run.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["nu"], 0.7);
    assert_eq!(meta["config"]["logging"]["snapshot_every"], 10);
}

#[test]
fn out_dir_defaults_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = Command::new(env!("CARGO_BIN_EXE_hdd"))
        .args(["run", "--config", &cfg])
        .env("HDD_OUT_DIR", dir.path().join("env"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("env/run.states.csv").exists());
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let missing = hdd(&["run", "--config", "/nonexistent/exp.toml", "--out", out]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("not found"));
    assert!(!hdd(&["scenario", "--name", "fig9", "--out", out]).status.success());
    let cfg = write_config(dir.path(), SMALL);
    let bad = hdd(&["run", "--config", &cfg, "--set", "nu=1.5", "--out", out]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("nu"));
    assert!(!hdd(&["run", "--config", &cfg, "--set", "graph.bogus=1", "--out", out]).status.success());
    assert!(!hdd(&["sweep", "--config", &cfg, "--grid", "speed=1,2", "--seeds", "1", "--out", out]).status.success());
    assert!(fs::read_dir(dir.path()).unwrap().all(|e| e.unwrap().file_name() == "exp.toml"));
}

#[test]
fn scenario_writes_one_set_per_nu() {
    let dir = tempfile::tempdir().unwrap();
    let o = hdd(&["scenario", "--name", "fig1d", "--seed", "5", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 9);
    for nu in ["0.05", "0.50", "0.95"] {
        assert!(names.contains(&format!("fig1d_nu{nu}_seed5.states.csv")));
    }
}

#[test]
fn sweep_serial_and_parallel_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["sweep", "--config", &cfg, "--grid", "T=4,6", "--grid", "nu=0.1,0.9", "--seeds", "1,2,3", "--columns", "6,7"];
        args.extend_from_slice(extra);
        let out_s = out.to_str().unwrap().to_string();
        args.extend_from_slice(&["--out", &out_s]);
        assert!(hdd(&args).status.success());
        out
    };
    let p = run("par", &[]);
    let s = run("ser", &["--serial"]);
    for name in ["sweep.csv", "sweep_weights.csv"] {
        assert_eq!(fs::read(p.join(name)).unwrap(), fs::read(s.join(name)).unwrap());
    }
    assert_eq!(first_line(&p.join("sweep.csv")), "T,nu,eps_max,seed,agent,final_state,cluster_id");
    assert_eq!(first_line(&p.join("sweep_weights.csv")), "T,nu,eps_max,seed,i,j,w");
    assert_eq!(fs::read_to_string(p.join("sweep.csv")).unwrap().lines().count(), 1 + 2 * 2 * 3 * 6);
}

#[test]
fn nu_sweep_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = hdd(&["nu-sweep", "--seeds", "1,2", "--scenario", "fig1d", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let states = fs::read_to_string(dir.path().join("fig1d_final_states.csv")).unwrap();
    assert_eq!(states.lines().count(), 1 + 19 * 2 * 10);
    let weights = fs::read_to_string(dir.path().join("fig1d_final_weights.csv")).unwrap();
    assert!(weights.lines().skip(1).all(|l| ["1", "10", "11", "12"].contains(&l.split(',').nth(5).unwrap())));
    let metas: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".json"))
        .collect();
    assert_eq!(metas.len(), 1);
}

#[test]
fn graph_export_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let file = dir.path().join("edges.txt");
    assert!(hdd(&["graph-export", "--config", &cfg, "--out", file.to_str().unwrap()]).status.success());
    let graph = hdd_consensus::sim::config_graph(&hdd_consensus::load_config(Path::new(&cfg), &[]).unwrap()).unwrap();
    let lines: Vec<(usize, usize)> = fs::read_to_string(&file)
        .unwrap()
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace().map(|x| x.parse().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(lines, graph.edges().collect::<Vec<_>>());
    for i in 0..6 {
        assert!(lines.contains(&(i, 6)) && lines.contains(&(i, 7)));
    }
}

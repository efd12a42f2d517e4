use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn skilift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skilift")).args(args).env_remove("SKILIFT_SIM_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn synth_writes_circuits_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let h = data("h4.txt");
    let o = skilift(&["synth", h.to_str().unwrap(), "--mode", "both", "--output-dir", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["optimized.circuit.json", "optimized.circuit.txt", "baseline.circuit.json", "baseline.circuit.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let opt = read_json(&dir.path().join("optimized.metrics.json"));
    let base = read_json(&dir.path().join("baseline.metrics.json"));
    for key in ["schema", "m", "b", "mode", "cost_model", "rotation_depth", "total_depth", "swap_depth", "width", "gate_counts", "ratios"] {
        assert!(opt.get(key).is_some(), "missing {key}");
    }
    assert_eq!(opt["schema"], 1);
    assert_eq!(opt["m"], 4);
    assert!(base["rotation_depth"].as_u64().unwrap() > opt["rotation_depth"].as_u64().unwrap());
    assert!(opt["ratios"]["rotation_depth"].as_f64().unwrap() > 1.0);

    let text = std::fs::read_to_string(dir.path().join("optimized.circuit.txt")).unwrap();
    assert!(text.starts_with("qubits "));
    assert!(text.lines().next().unwrap().contains("precision 1 orbitals 4"));
}

#[test]
fn cost_models_agree_on_rotations() {
    let h = data("h4.txt");
    let run = |model: &str| {
        let o = skilift(&["synth", h.to_str().unwrap(), "--cost-model", model, "--format", "json"]);
        assert!(o.status.success());
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        v["metrics"][0].clone()
    };
    let a = run("circuit");
    let b = run("lattice-surgery");
    assert_eq!(a["rotation_depth"], b["rotation_depth"]);
    assert_eq!(a["cost_model"], "circuit");
    assert_eq!(b["cost_model"], "lattice-surgery");
    assert_ne!(a["total_depth"], b["total_depth"]);
}

#[test]
fn synthesized_circuits_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let h = data("h3.json");
    let h = h.to_str().unwrap();
    let o = skilift(&["synth", h, "--mode", "both", "--t", "0.6", "--output-dir", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["optimized.circuit.json", "baseline.circuit.json"] {
        let c = dir.path().join(f);
        let o = skilift(&["verify", c.to_str().unwrap(), "--hamiltonian", h]);
        assert!(o.status.success(), "{f}: {}", stdout(&o));
        assert!(stdout(&o).contains("PASS"));
    }
    let o = skilift(&["verify", "--hamiltonian", h, "--t", "0.8", "--steps", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn verify_rejects_a_wrong_hamiltonian() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(skilift(&["synth", data("h3.json").to_str().unwrap(), "--output-dir", out]).status.success());
    let other = dir.path().join("other.txt");
    std::fs::write(&other, "m 3\n1b 0 0 1.0\n1b 0 2 0.5\n").unwrap();
    let c = dir.path().join("optimized.circuit.json");
    let o = skilift(&["verify", c.to_str().unwrap(), "--hamiltonian", other.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn schedule_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = skilift(&["schedule", "--m", "8", "--output-dir", out]);
    assert!(o.status.success());
    let path = dir.path().join("schedule.json");
    let o = skilift(&["schedule", "--verify", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = skilift(&["verify", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));

    let mut s = read_json(&path);
    let stages = s["stages"].as_array_mut().unwrap();
    let dup = stages[40].clone();
    stages.insert(41, dup);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&s).unwrap()).unwrap();
    let o = skilift(&["schedule", "--verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL"), "{text}");
    assert!(text.contains("stage 41"), "{text}");
}

#[test]
fn qpe_is_deterministic_per_seed() {
    let h = data("h4.txt");
    let h = h.to_str().unwrap();
    let run = |seed: &str| {
        let o = skilift(&["qpe", h, "--b", "3", "--steps", "8", "--shots", "200", "--seed", seed, "--format", "json"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_str::<Value>(&stdout(&o)).unwrap()
    };
    let a = run("7");
    assert_eq!(a, run("7"));
    assert!(a.get("energy").is_some(), "{a}");
    let d = skilift(&["qpe", h, "--b", "3", "--steps", "8", "--emit", "distribution", "--format", "json"]);
    assert!(d.status.success());
    let v: Value = serde_json::from_str(&stdout(&d)).unwrap();
    let total: f64 = v["distribution"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn sim_cap_from_environment() {
    let h = data("h4.txt");
    let o = Command::new(env!("CARGO_BIN_EXE_skilift"))
        .args(["qpe", h.to_str().unwrap(), "--b", "6", "--steps", "1"])
        .env("SKILIFT_SIM_CAP", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_skilift"))
        .args(["bench", "--m", "8"])
        .env("SKILIFT_SIM_CAP", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "m 4\n2b 0 1 2\n").unwrap();
    let o = skilift(&["synth", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(skilift(&["synth", "/nonexistent/h.txt"]).status.code(), Some(2));
    assert_eq!(skilift(&["synth", data("h4.txt").to_str().unwrap(), "--passes", "fold"]).status.code(), Some(2));
}

#[test]
fn bench_json_and_check() {
    let o = skilift(&["bench", "--m", "10", "--b", "1,2", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert_eq!(runs[0]["factors"]["quad_template"], 8.0);
    assert_eq!(runs[0]["optimized"]["rotation_depth"], runs[1]["optimized"]["rotation_depth"]);
}

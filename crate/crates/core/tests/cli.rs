use std::process::{Command, Output};

fn wavebound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavebound"))
        .args(args)
        .env_remove("WAVEBOUND_JOBS")
        .output()
        .expect("run wavebound")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn bound_reports_scaling_bound() {
    let out = wavebound(&["bound", "--p", "2", "--kappa", "1", "--gamma", "0.01", "--flux", "1e4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let b = v["result"]["scaling_bound"].as_f64().unwrap();
    assert!((b / 7.86e-5 - 1.0).abs() < 5e-3, "{b}");
    assert!(v["result"]["t_star"].as_f64().unwrap() > 0.0);
    assert_eq!(v["config"]["flux"].as_f64(), Some(1e4));
}

#[test]
fn bound_rejects_p_below_one() {
    let out = wavebound(&["bound", "--p", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p > 1"));
}

#[test]
fn bound_regime_violation() {
    let out = wavebound(&["bound", "--p", "2", "--gamma", "10", "--flux", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_rejects_zero_trials() {
    assert_eq!(wavebound(&["simulate", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn simulate_short_record_is_insufficient() {
    let out = wavebound(&["simulate", "--trials", "2", "--truncation", "64", "--pulses", "100"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn simulate_carries_seed_and_is_reproducible() {
    let args = [
        "simulate", "--flux", "1e3", "--trials", "6", "--seed", "42", "--truncation", "64",
    ];
    let a = wavebound(&args);
    assert_eq!(a.status.code(), Some(0));
    let v = json(&a);
    assert_eq!(v["result"]["config"]["seed"].as_u64(), Some(42));
    assert_eq!(v["config"]["seed"].as_u64(), Some(42));
    let b = Command::new(env!("CARGO_BIN_EXE_wavebound"))
        .args(args)
        .env("WAVEBOUND_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let c = wavebound(&[&args[..], &["--seed", "43"]].concat());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bad_jobs_env_is_invalid() {
    let out = Command::new(env!("CARGO_BIN_EXE_wavebound"))
        .args(["simulate", "--trials", "1", "--truncation", "8"])
        .env("WAVEBOUND_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_csv_layout() {
    let out = wavebound(&[
        "sweep", "--fluxes", "1e2,1e3", "--trials", "4", "--truncation", "64", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "flux,lower_bound,predicted_total,simulated_mse,ci");
    assert_eq!(lines.len(), 4);
    for row in &lines[1..3] {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[3] >= f[1], "simulated MSE below the lower bound: {row}");
    }
    assert!(lines[3].starts_with("slope,"));
}

#[test]
fn sweep_needs_two_fluxes() {
    assert_eq!(wavebound(&["sweep", "--fluxes", "1e3"]).status.code(), Some(2));
}

#[test]
fn verify_single_check() {
    let out = wavebound(&["verify", "--only", "wrap_constant"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["name"], "wrap_constant");
    assert_eq!(rows[0]["passed"], true);
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("wavebound-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("b.csv");
    let out = wavebound(&["bound", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("p,kappa,gamma,flux,tau0"));
    std::fs::remove_dir_all(&dir).unwrap();
}

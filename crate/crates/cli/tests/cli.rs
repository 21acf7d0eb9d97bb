use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_meanfield"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

const BOUNDS_CONFIG: &str = r#"{
  "seed": 1,
  "output_dir": "out",
  "bounds": {
    "params": {
      "q": 2.0, "p": 2.0, "d": 1, "sigma": 1.0,
      "lambda_big": 4.0, "c_const": 0.125, "theta_exp": 1.0,
      "k_lp_norm": 1.0, "f0": 1.0, "f_cap": 1.0, "n": 10
    },
    "t": 0.2, "k_max": 5, "picard_steps": 500
  }
}"#;

const SIM_CONFIG: &str = r#"{
  "seed": 3,
  "output_dir": "out",
  "simulate": {
    "sim": {
      "n_particles": 8, "dim": 1, "sigma": 0.5, "dt": 0.01, "t_end": 0.05,
      "order": "second",
      "kernel": {
        "family": { "type": "smooth_fourier", "modes": [ { "wavevector": [1], "amplitude": 0.5 } ] },
        "strength": 1.0, "dim": 1
      },
      "seed": 3, "snapshot_stride": 5
    },
    "replicas": 2,
    "initial_law": { "type": "product_uniform_gaussian", "velocity_std": 1.0 }
  }
}"#;

#[test]
fn bounds_reports_worked_existence_time() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BOUNDS_CONFIG);
    let out = dir.path().join("run");
    let status = bin()
        .args(["bounds", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(report["existence_time"].as_f64().unwrap(), 0.25);
    assert_eq!(report["growth_constant"].as_f64().unwrap(), 1.0);
    assert!(report["recursion_holds"].as_bool().unwrap());
}

#[test]
fn simulate_is_bit_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SIM_CONFIG);
    let mut manifests = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = bin()
            .args(["simulate", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        manifests.push(std::fs::read_to_string(out.join("manifest.json")).unwrap());
    }
    assert_eq!(manifests[0], manifests[1]);
}

#[test]
fn selftest_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BOUNDS_CONFIG);
    let out = dir.path().join("run");
    assert!(bin()
        .args(["bounds", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap()
        .success());
    assert!(bin().args(["selftest", "--dir"]).arg(&out).status().unwrap().success());
    std::fs::write(out.join("bounds.csv"), "tampered").unwrap();
    let status = bin().args(["selftest", "--dir"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn missing_section_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BOUNDS_CONFIG);
    let output = bin()
        .args(["simulate", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_slice(&output.stderr).expect("machine-readable stderr");
    assert_eq!(err["error"], "config");
}

#[test]
fn cfl_violation_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
  "seed": 1,
  "output_dir": "out",
  "solve_pde": {
    "kind": "kinetic_d1",
    "kernel": { "family": { "type": "zero" }, "strength": 0.0, "dim": 1 },
    "sigma": 0.0, "t_end": 0.1, "dt": 0.1,
    "nx": 32, "nv": 32, "v_max": 4.0, "perturbation": 0.0, "velocity_std": 1.0
  }
}"#,
    );
    let output = bin()
        .args(["solve-pde", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(err["error"], "numerical");
}

#[test]
fn plots_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SIM_CONFIG);
    let out = dir.path().join("run");
    assert!(bin()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .arg("--plots")
        .status()
        .unwrap()
        .success());
    let first = std::fs::read(out.join("energy.svg")).unwrap();
    assert!(bin()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .arg("--plots")
        .status()
        .unwrap()
        .success());
    let second = std::fs::read(out.join("energy.svg")).unwrap();
    assert_eq!(first, second);
}

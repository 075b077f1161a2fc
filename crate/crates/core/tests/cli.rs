use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use jmlift::cli::{read_trajectory_csv, Table};
use jmlift::dynamics::Parameter;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn scenario_text(name: &str) -> String {
    std::fs::read_to_string(scenario(name)).unwrap()
}

fn jmlift(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jmlift"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn run_with(text: &str, command: &str, dir: &Path) -> Output {
    let cfg = dir.join("scenario.toml");
    std::fs::write(&cfg, text).unwrap();
    jmlift(&[command, "--config", cfg.to_str().unwrap()], &dir.join("out"))
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn circular_orbit_stays_on_the_unit_circle() {
    let dir = tempfile::tempdir().unwrap();
    let o = jmlift(&["integrate", "--config", scenario("circular.toml").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let traj = read_trajectory_csv(&text, Parameter::Time).unwrap().trajectory;
    assert!(traj.len() > 100);
    for s in &traj.samples {
        assert!((s.x.norm() - 1.0).abs() < 1e-8);
    }
    let diag = json(&dir.path().join("diagnostics.json"));
    let names: Vec<&str> = diag["quantities"].as_array().unwrap().iter().map(|q| q["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["H", "L", "A"]);
    for q in diag["quantities"].as_array().unwrap() {
        for key in ["name", "initial", "max_drift", "rel_drift", "verdict"] {
            assert!(q.get(key).is_some(), "missing {key}");
        }
        assert_eq!(q["verdict"], "pass");
    }
}

#[test]
fn hill_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = scenario_text("circular.toml")
        .replace("energy = -0.5", "energy = -1.5")
        .replace("method = \"rk4\"", "method = \"implicit-midpoint\"")
        .replace("periods = 1.0", "span = 1.0\nparameter = \"sigma\"");
    let o = run_with(&text, "integrate", dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Hill boundary"), "{}", stderr(&o));
}

#[test]
fn missing_and_unknown_fields_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with(&scenario_text("circular.toml").replace("mass = 1.0\n", ""), "integrate", dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mass"), "{}", stderr(&o));

    let o = run_with(&scenario_text("circular.toml").replace("step = 1e-3", "step = 1e-3\nsteps = 5"), "integrate", dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("steps"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(jmlift(&["integrate"], dir.path()).status.code(), Some(1));
    let o = jmlift(&["integrate", "--config", scenario("circular.toml").to_str().unwrap(), "--format", "xml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn failed_drift_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // at σ-step 1e-4 the H̃ drift is about 2e-8, above its 1e-8 tolerance
    let text = scenario_text("ellipse-geodesic.toml").replace("step = 2e-5", "step = 1e-4");
    let o = run_with(&text, "integrate", dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let diag = json(&dir.path().join("out/diagnostics.json"));
    let h = diag["quantities"].as_array().unwrap().iter().find(|q| q["name"] == "Htilde").unwrap();
    assert_eq!(h["verdict"], "fail");
}

#[test]
fn ellipse_compare_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = jmlift(&["compare", "--config", scenario("ellipse-compare.toml").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let eq = json(&dir.path().join("equivalence.json"));
    assert!(eq["max_position_deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(eq["verdict"], "pass");
}

#[test]
fn circular_compare_is_tighter() {
    let dir = tempfile::tempdir().unwrap();
    let text = scenario_text("ellipse-compare.toml").replace("eccentricity = 0.5", "eccentricity = 0.0");
    let o = run_with(&text, "compare", dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let eq = json(&dir.path().join("out/equivalence.json"));
    assert!(eq["max_position_deviation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn unbound_compare_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let text = scenario_text("circular.toml")
        .replace("energy = -0.5", "energy = 0.5")
        .replace("p = [0.0, 1.0]", "p = [0.0, 1.7320508075688772]");
    let o = run_with(&text, "compare", dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bound orbit required"), "{}", stderr(&o));
}

#[test]
fn reingested_csv_reproduces_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let text = scenario_text("circular.toml").replace("stride = 10", "stride = 1");
    let cfg = dir.path().join("integrate.toml");
    std::fs::write(&cfg, &text).unwrap();
    let o = jmlift(&["integrate", "--config", cfg.to_str().unwrap()], &first);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let reference = first.join("trajectory.csv");
    let compare = format!(
        "{}\n[compare]\nreference = {:?}\n",
        text.replace("[output]\npath = \"out/circular\"\nstride = 1\n", ""),
        reference.to_str().unwrap()
    );
    let second = dir.path().join("second");
    let cfg = dir.path().join("compare.toml");
    std::fs::write(&cfg, compare).unwrap();
    let o = jmlift(&["compare", "--config", cfg.to_str().unwrap()], &second);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let a = json(&first.join("diagnostics.json"));
    let b = json(&second.join("newtonian-diagnostics.json"));
    assert_eq!(a["quantities"], b["quantities"]);
    assert_eq!(a["samples"], b["samples"]);

    // the re-emitted positions and momenta are bit-identical
    let cols = |p: &Path| {
        let (h, rows) = Table::parse_numeric_csv(&std::fs::read_to_string(p).unwrap()).unwrap();
        let keep: Vec<usize> = (0..h.len()).filter(|&i| h[i].starts_with('x') || h[i].starts_with('p') && h[i] != "param").collect();
        rows.iter().map(|r| keep.iter().map(|&i| r[i]).collect::<Vec<_>>()).collect::<Vec<_>>()
    };
    assert_eq!(cols(&reference), cols(&second.join("newtonian.csv")));
}

#[test]
fn transforms_pass_on_their_scenarios() {
    for (name, max) in [("bohlin.toml", 1e-8), ("moser.toml", 1e-10), ("milnor.toml", 1e-5), ("anomaly.toml", 1e-5), ("houri.toml", 1e-8)] {
        let dir = tempfile::tempdir().unwrap();
        let o = jmlift(&["transform", "--config", scenario(name).to_str().unwrap(), "--seed", "3"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        let rep = json(&dir.path().join("residuals.json"));
        assert!(rep["max_residual"].as_f64().unwrap() < max, "{name}");
        assert!(dir.path().join("transformed.csv").exists());
    }
}

#[test]
fn sweep_seed_is_reproducible() {
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let o = jmlift(&["transform", "--config", scenario("moser.toml").to_str().unwrap(), "--seed", seed], dir.path());
        assert_eq!(o.status.code(), Some(0));
        json(&dir.path().join("residuals.json"))["sweeps"].clone()
    };
    assert_eq!(run("11"), run("11"));
}

#[test]
fn curvature_table_values_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = jmlift(&["curvature", "--config", scenario("curvature.toml").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("curvature.csv")).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let k: Vec<f64> = rows.iter().take(3).map(|r| r[1].parse().unwrap()).collect();
    for (got, want) in k.iter().zip([0.5 / (2.0 * 0.421875), 2.0, 16.0]) {
        assert!((got - want).abs() < 1e-12 * want);
    }
    assert!(rows.iter().all(|r| r[2] == "ellipse"));
    assert_eq!(rows[3][1], "");
    assert_eq!(rows[3][3], "beyond-hill");

    for (energy, expected_class) in [("0.0", "parabola"), ("0.5", "hyperbola")] {
        let dir = tempfile::tempdir().unwrap();
        let text = scenario_text("curvature.toml").replace("energy = -0.5", &format!("energy = {energy}"));
        let o = run_with(&text, "curvature", dir.path());
        assert_eq!(o.status.code(), Some(0));
        let text = std::fs::read_to_string(dir.path().join("out/curvature.csv")).unwrap();
        for line in text.lines().skip(1) {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells[2], expected_class);
            let k: f64 = cells[1].parse().unwrap();
            if energy == "0.0" {
                assert_eq!(k, 0.0);
            } else if cells[0].parse::<f64>().unwrap() == 1.0 {
                assert!((k + 0.5 / (2.0 * 1.5f64.powi(3))).abs() < 1e-15);
                assert!((k + 0.074074).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn json_format_writes_columns_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = jmlift(&["integrate", "--config", scenario("circular.toml").to_str().unwrap(), "--format", "json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let t = json(&dir.path().join("trajectory.json"));
    assert_eq!(t["columns"][0], "param");
    assert!(t["rows"][0][2].is_null());
}

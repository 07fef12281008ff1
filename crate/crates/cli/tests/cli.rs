use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use zb_core::dynamics::Trajectory;

struct Run {
    out: Output,
    dir: PathBuf,
}

impl Run {
    fn code(&self) -> i32 {
        self.out.status.code().unwrap()
    }

    fn stdout(&self) -> String {
        String::from_utf8(self.out.stdout.clone()).unwrap()
    }

    fn file(&self, name: &str) -> String {
        std::fs::read_to_string(self.dir.join(name)).unwrap()
    }
}

fn zb(tmp: &Path, cmd: &str, config: &str, extra: &[&str], env: &[(&str, &str)]) -> Run {
    let cfg = tmp.join(format!("{cmd}.json"));
    std::fs::write(&cfg, config).unwrap();
    let dir = tmp.join(format!("out-{cmd}-{}", extra.join("")));
    let mut c = Command::new(env!("CARGO_BIN_EXE_zb"));
    c.arg(cmd).arg("--config").arg(&cfg).arg("--out").arg(&dir).args(extra).env_remove("ZB_SEED");
    for (k, v) in env {
        c.env(k, v);
    }
    Run {
        out: c.output().unwrap(),
        dir,
    }
}

fn packet_config(big_m: f64) -> String {
    format!(
        r#"{{"model": "maxwell", "params": {{"t_h": 1, "M": {big_m}}},
            "dynamics": {{"k": [0, 0], "spinor": [1, 1, 0], "packet": {{"width": 20}}, "periods": 8}}}}"#
    )
}

#[test]
fn zb_prints_rotation_sense() {
    let tmp = tempfile::tempdir().unwrap();
    for (big_m, expected) in [(1.0, "-1"), (3.0, "1")] {
        let r = zb(tmp.path(), "zb", &packet_config(big_m), &[], &[]);
        assert_eq!(r.code(), 0, "{:?}", r.out);
        assert_eq!(r.stdout().trim(), expected);
        let traj = Trajectory::read_csv(&r.file("trajectory.csv")).unwrap();
        assert!(traj.len() > 100);
        assert!(r.file("spectrum.csv").starts_with("omega,px,py,pz\n"));
    }
}

#[test]
fn eigenstate_does_not_rotate() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"model": "maxwell", "params": {"M": 1}, "dynamics": {"k": [0.3, -0.2], "band": 2}}"#;
    let r = zb(tmp.path(), "zb", cfg, &[], &[]);
    assert_eq!(r.code(), 0, "{:?}", r.out);
    assert_eq!(r.stdout().trim(), "0");
}

#[test]
fn invariant_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let r = zb(tmp.path(), "invariants", r#"{"model": "maxwell", "params": {"t_h": 1, "M": 1}}"#, &[], &[]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout()).unwrap();
    assert_eq!(v["chern_hsp"], serde_json::json!([-2, 0, 2]));
    assert_eq!(v["chern_plaquette"], serde_json::json!([-2, 0, 2]));
    assert_eq!(r.file("invariants.json"), r.stdout());

    let r = zb(tmp.path(), "invariants", r#"{"model": "chiral_ti", "params": {"M": 4}}"#, &[], &[]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout()).unwrap();
    assert_eq!(v["winding"], 0);
    assert_eq!(v["hsp"].as_array().unwrap().len(), 8);

    let cfg = r#"{"model": "kane_mele", "params": {"lambda_so": 0.01, "lambda_v": 1.0}}"#;
    let r = zb(tmp.path(), "invariants", cfg, &[], &[]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout()).unwrap();
    assert_eq!(v["z2"], 0);
    assert_eq!(v["params"]["lambda_so"], 0.01);
}

#[test]
fn band_structure_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let r = zb(tmp.path(), "bands", r#"{"model": "maxwell", "params": {"M": 2}}"#, &[], &[]);
    assert_eq!(r.code(), 0);
    let rows: Vec<Vec<f64>> = r
        .file("bands.csv")
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(rows[0][3..].iter().all(|e| e.abs() < 1e-12));
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));

    let r = zb(tmp.path(), "bands", r#"{"model": "maxwell", "params": {"M": 3}}"#, &[], &[]);
    let csv = r.file("bands.csv");
    let gamma: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((gamma[4] - gamma[3] - 2.0).abs() < 1e-12);

    let r = zb(tmp.path(), "bands", r#"{"model": "chiral_ti", "params": {"M": 2}, "bands": {"points_per_segment": 4}}"#, &[], &[]);
    assert!(r.file("bands.csv").starts_with("s,k1,k2,k3,E1,E2,E3\n"));
    assert_eq!(r.file("bands.csv").lines().count(), 1 + 5 * 4 + 1);
}

#[test]
fn phase_diagram_reproduces_the_four_phases() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"model": "maxwell", "params": {"t_h": 1}, "sweep": {"param": "M", "start": -3, "stop": 3, "step": 0.25}}"#;
    let r = zb(tmp.path(), "phase-diagram", cfg, &["--jobs", "3"], &[]);
    assert_eq!(r.code(), 0);
    let csv = r.file("phase_diagram.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("M,chern,nu_0_0,nu_0_pi,nu_pi_0,nu_pi_pi"));
    let rows: Vec<(f64, String)> = lines
        .map(|l| {
            let (m, rest) = l.split_once(',').unwrap();
            (m.parse().unwrap(), rest.to_string())
        })
        .collect();
    assert_eq!(rows.len(), 25 - 3);
    let phase = |m: f64| match m {
        m if m < -2.0 => "0,-1,1,1,-1",
        m if m < 0.0 => "2,-1,1,1,1",
        m if m < 2.0 => "-2,-1,-1,-1,1",
        _ => "0,1,-1,-1,1",
    };
    for (m, rest) in &rows {
        assert_eq!(rest, phase(*m), "M = {m}");
    }

    let serial = zb(tmp.path(), "phase-diagram", cfg, &["--jobs", "1"], &[]);
    assert_eq!(serial.file("phase_diagram.csv"), csv);
}

#[test]
fn critical_points_need_explicit_permission() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"model": "maxwell", "params": {"t_h": 1}, "sweep": {"param": "M", "start": 1.5, "stop": 2.5, "step": 0.5}}"#;
    let r = zb(tmp.path(), "phase-diagram", cfg, &[], &[]);
    assert_eq!(r.code(), 0);
    assert_eq!(r.file("phase_diagram.csv").lines().count(), 3);
    let r = zb(tmp.path(), "phase-diagram", cfg, &["--allow-critical"], &[]);
    assert_eq!(r.code(), 1);
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("bands", r#"{"model": "maxwell", "params": {"M": 1}, "extra": true}"#),
        ("bands", r#"{"model": "maxwell", "params": {"M": 1, "B": 2}}"#),
        ("zb", r#"{"model": "maxwell", "params": {"M": 1}, "dynamics": {"k": [0, 0]}}"#),
        ("phase-diagram", r#"{"model": "maxwell", "sweep": {"param": "M", "start": 1, "stop": 0, "step": 0.1}}"#),
        ("invariants", r#"{"command": "bands", "model": "maxwell", "params": {"M": 1}}"#),
        ("verify", r#"{}"#),
        ("bands", "not json"),
    ];
    for (cmd, cfg) in cases {
        let r = zb(tmp.path(), cmd, cfg, &[], &[]);
        assert_eq!(r.code(), 2, "{cmd} {cfg}: {:?}", r.out);
    }
    let r = zb(tmp.path(), "verify", "{}", &[], &[("ZB_SEED", "many")]);
    assert_eq!(r.code(), 2);
}

#[test]
fn gapless_point_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let r = zb(tmp.path(), "invariants", r#"{"model": "maxwell", "params": {"M": 2}}"#, &[], &[]);
    assert_eq!(r.code(), 1);
    assert!(String::from_utf8_lossy(&r.out.stderr).contains("gap"));
}

#[test]
fn seed_from_environment_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"seed": 1, "verify": {"trials": 4, "z2_samples": 2}}"#;
    let a = zb(tmp.path(), "verify", cfg, &[], &[("ZB_SEED", "99")]);
    assert_eq!(a.code(), 0, "{:?}", a.out);
    let v: serde_json::Value = serde_json::from_str(&a.file("verify.json")).unwrap();
    assert_eq!(v["seed"], 99);
    assert_eq!(a.stdout().lines().filter(|l| l.starts_with("PASS")).count(), 7);
}

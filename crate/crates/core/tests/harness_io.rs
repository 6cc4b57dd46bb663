use std::process::Command;

use iobt_activation::harness::{
    emit_csv, emit_plot, read_csv, sweep_pe, ExperimentConfig, MetricStats, SweepPoint, SweepResult, CSV_HEADER,
};
use iobt_activation::Error;

fn small() -> ExperimentConfig {
    ExperimentConfig {
        side_length: 15.0,
        runs: 3,
        ..Default::default()
    }
}

#[test]
fn real_sweep_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pe.csv");
    let result = sweep_pe(&small(), &[0.0, 0.5, 1.0], &[40, 80]).unwrap();
    emit_csv(&result, &path).unwrap();
    let rows = read_csv(&path).unwrap();
    assert_eq!(rows.len(), 6);
    for (row, point) in rows.iter().zip(&result.points) {
        assert_eq!(row.axis1, point.axis1);
        assert_eq!(row.axis2, point.axis2);
        assert_eq!(row.activated_mean, point.activated.mean);
        assert_eq!(row.active_joint_entropy_mean, point.active_joint_entropy.mean);
        assert_eq!(row.energy_reduction_pct_mean, point.energy_reduction_pct.mean);
        assert_eq!(row.messages_mean, point.messages.mean);
    }
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
}

#[test]
fn csv_write_failure_names_path() {
    let r = SweepResult {
        axis1_name: "p_e".into(),
        axis2_name: "m".into(),
        points: vec![],
    };
    let path = std::path::Path::new("/nonexistent-dir/for/sure/out.csv");
    match emit_csv(&r, path) {
        Err(Error::Io { path: p, .. }) => assert_eq!(p, path),
        other => panic!("{other:?}"),
    }
}

fn polyline_coords(svg: &str) -> Vec<Vec<(f64, f64)>> {
    svg.lines()
        .filter(|l| l.starts_with("<polyline"))
        .map(|l| {
            let start = l.find("points=\"").unwrap() + 8;
            let end = start + l[start..].find('"').unwrap();
            l[start..end]
                .split(' ')
                .map(|pair| {
                    let (x, y) = pair.split_once(',').unwrap();
                    (x.parse().unwrap(), y.parse().unwrap())
                })
                .collect()
        })
        .collect()
}

#[test]
fn monotone_series_render_monotone() {
    let stats = |v: f64| MetricStats { mean: v, min: v, max: v };
    let point = |x: f64, s: f64, y: f64| SweepPoint {
        axis1: x,
        axis2: s,
        runs: 1,
        activated: stats(y),
        activation_fraction: stats(0.0),
        energy_reduction_pct: stats(100.0 - y),
        active_joint_entropy: stats(0.0),
        entropy_floored_fraction: 0.0,
        realized_secrecy_sum: stats(0.0),
        passes: stats(2.0),
        messages: stats(0.0),
        converged_fraction: 1.0,
    };
    let mut points = Vec::new();
    for s in [1000.0, 3000.0] {
        for k in 0..6 {
            let x = k as f64 / 5.0;
            points.push(point(x, s, s / 100.0 - 5.0 * x * x));
        }
    }
    let r = SweepResult {
        axis1_name: "p_e".into(),
        axis2_name: "m".into(),
        points,
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.svg");
    emit_plot(&r, "activated_mean", &path).unwrap();
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.contains("p_e") && svg.contains("activated_mean"));
    let lines = polyline_coords(&svg);
    assert_eq!(lines.len(), 2);
    for line in lines {
        assert_eq!(line.len(), 6);
        for w in line.windows(2) {
            assert!(w[1].0 > w[0].0);
            // decreasing data, SVG y grows downwards
            assert!(w[1].1 > w[0].1);
        }
    }
    assert!(matches!(emit_plot(&r, "nope", &path), Err(Error::InvalidArgument(_))));
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iobt-sim"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = cli()
        .args(["simulate", "--runs", "1", "--set", "m=20", "--set", "side_length=10"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let line = String::from_utf8(ok.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["m"], 20);

    let bad = cli().args(["simulate", "--set", "p_e=3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let bad = cli().args(["simulate", "--set", "bogus=3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let bad = cli().args(["simulate", "--frobnicate"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));

    let missing = cli()
        .args(["simulate", "--config"])
        .arg(dir.path().join("missing.json"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3));

    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"m": 15, "side_length": 8.0, "runs": 2}"#).unwrap();
    let out = dir.path().join("out");
    let sweep = cli()
        .args(["sweep-m", "--m", "10,15", "--pe", "0.2", "--plots", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(sweep.status.code(), Some(0), "{}", String::from_utf8_lossy(&sweep.stderr));
    let rows = read_csv(&out.join("sweep_m.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.runs == 2));
    assert!(out.join("sweep_m_activated_mean.svg").exists());

    let verify = cli()
        .args(["verify", "--audit-instances", "20", "--secrecy-sensors", "20", "--containment-instances", "10"])
        .output()
        .unwrap();
    assert_eq!(verify.status.code(), Some(0));
    assert_eq!(String::from_utf8(verify.stdout).unwrap().matches("PASS").count(), 3);
}

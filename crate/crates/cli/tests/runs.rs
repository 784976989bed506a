use std::path::Path;
use std::process::Command;

use biphoton_cli::config::{OutputKind, ScenarioSpec, SweepParam, SweepSpec};
use biphoton_cli::runner::{run_scenario, run_sweep, RunError};
use biphoton_cli::snapshot;
use biphoton_core::{ExperimentParams, ScenarioKind};

fn spec(scenario: ScenarioKind, outputs: &[OutputKind]) -> ScenarioSpec {
    ScenarioSpec {
        scenario,
        outputs: outputs.to_vec(),
        ..Default::default()
    }
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn default_run_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let s = spec(
        ScenarioKind::BiphotonCoincidence,
        &[OutputKind::Csv, OutputKind::Svg, OutputKind::Report, OutputKind::Snapshot],
    );
    let (report, files) = run_scenario(&s, dir.path()).unwrap();
    assert_eq!(files.len(), 4);

    let csv = String::from_utf8(read(dir.path(), "biphoton_coincidence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,density_analytic,density_numeric"));
    assert_eq!(lines.count(), report.plan.screen.len());

    let json: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "biphoton_coincidence.report.json")).unwrap();
    assert_eq!(json["kind"], "biphoton_coincidence");
    assert!(json["uncertainty"]["dx_ratio"].as_f64().is_some());
    assert!(json["comparison_central"]["l2_err"].as_f64().unwrap() < 0.05);
    assert!(json["regime"]["checks"].as_array().unwrap().len() >= 3);

    let svg = String::from_utf8(read(dir.path(), "biphoton_coincidence.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);

    let (header, field) = snapshot::read(read(dir.path(), "biphoton_coincidence.field.bin").as_slice()).unwrap();
    assert_eq!(header.grid1, report.plan.screen);
    assert_eq!(field.grid2(), &report.plan.screen);

    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn nonlocal_csv_is_byte_identical_to_colocated() {
    let dir = tempfile::tempdir().unwrap();
    run_scenario(&spec(ScenarioKind::BiphotonCoincidence, &[OutputKind::Csv]), dir.path()).unwrap();
    let (nonlocal, _) =
        run_scenario(&spec(ScenarioKind::NonlocalCoincidence, &[OutputKind::Csv, OutputKind::Report]), dir.path())
            .unwrap();
    assert_eq!(
        read(dir.path(), "biphoton_coincidence.csv"),
        read(dir.path(), "nonlocal_coincidence.csv")
    );
    assert_eq!(nonlocal.layout.slit_planes.len(), 2);
    let json = String::from_utf8(read(dir.path(), "nonlocal_coincidence.report.json")).unwrap();
    assert!(json.contains("synchrony"));
}

fn light_sweep() -> ScenarioSpec {
    ScenarioSpec {
        params: ExperimentParams {
            omega_big: 20.0,
            ..Default::default()
        },
        sweep: Some(SweepSpec {
            param: SweepParam::Sigma,
            values: vec![1.0, 2.0, 5.0],
        }),
        outputs: vec![OutputKind::Csv],
        ..Default::default()
    }
}

#[test]
fn sweeps_are_deterministic_across_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let s = light_sweep();
    let ra = run_sweep(&s, a.path(), 1).unwrap();
    let rb = run_sweep(&s, b.path(), 3).unwrap();
    assert_eq!(ra.rows, rb.rows);
    for i in 0..3 {
        let name = format!("biphoton_coincidence_sigma_{i:02}.csv");
        assert_eq!(read(a.path(), &name), read(b.path(), &name));
    }
    let summary = "biphoton_coincidence_sweep_sigma.csv";
    assert_eq!(read(a.path(), summary), read(b.path(), summary));
    let values: Vec<f64> = ra.rows.iter().map(|r| r.value).collect();
    assert_eq!(values, vec![1.0, 2.0, 5.0]);
}

#[test]
fn slit_separation_sweep_scales_spacing() {
    let dir = tempfile::tempdir().unwrap();
    let s = ScenarioSpec {
        sweep: Some(SweepSpec {
            param: SweepParam::SlitSep,
            values: vec![2.0, 5.0, 10.0],
        }),
        outputs: vec![],
        ..Default::default()
    };
    let r = run_sweep(&s, dir.path(), 3).unwrap();
    assert_eq!(r.failures(), 0);
    for row in &r.rows {
        let expected = 1000.0 / (2.0 * row.value);
        for spacing in [row.spacing_analytic.unwrap(), row.spacing_numeric.unwrap()] {
            assert!((spacing / expected - 1.0).abs() < 0.02, "d = {}: {spacing}", row.value);
        }
    }
}

#[test]
fn sigma_sweep_orders_case_b_weights() {
    let dir = tempfile::tempdir().unwrap();
    let s = ScenarioSpec {
        sweep: Some(SweepSpec {
            param: SweepParam::Sigma,
            values: vec![0.1, 0.5, 1.0, 5.0, 50.0],
        }),
        outputs: vec![OutputKind::Report],
        ..Default::default()
    };
    let r = run_sweep(&s, dir.path(), 4).unwrap();
    assert_eq!(r.failures(), 0);
    assert!(r.rows[0].oracle_skipped.is_some());
    let p_diff: Vec<f64> = r.rows.iter().map(|row| row.p_diff.unwrap()).collect();
    let ratio: Vec<f64> = r
        .rows
        .iter()
        .map(|row| row.p_diff.unwrap() / row.p_same.unwrap())
        .collect();
    assert!(ratio.windows(2).all(|w| w[1] >= w[0]), "{ratio:?}");
    assert!(ratio[0] < 1e-3);
    assert!(p_diff[0] < p_diff[1]);
    assert!(dir.path().join("biphoton_coincidence_sweep_sigma.json").exists());
}

#[test]
fn single_value_sweep_is_a_config_error() {
    let mut s = light_sweep();
    s.sweep.as_mut().unwrap().values.truncate(1);
    let err = run_sweep(&s, Path::new("unused"), 1).unwrap_err();
    assert!(matches!(err, RunError::Config(_)));
    assert_eq!(err.exit_code(), 1);
}

fn simulate(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_simulate")).args(args).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_owned()
    };
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let typo = write("typo.json", r#"{"schema_version": 1, "params": {"lamda": 1}}"#);
    assert_eq!(simulate(&["--config", &typo, "--out", out]).0, 1);
    assert_eq!(simulate(&["--config", "/nonexistent.json", "--out", out]).0, 1);

    let ok = write("ok.json", r#"{"schema_version": 1, "outputs": ["csv"]}"#);
    assert_eq!(simulate(&["--config", &ok, "--scenario", "young", "--out", out]).0, 1);
    assert_eq!(simulate(&["--config", &ok, "--sweep", "sigma=1", "--out", out]).0, 1);

    let tight = write(
        "tight.json",
        r#"{"schema_version": 1, "params": {"sigma": 0.1}, "outputs": ["csv"]}"#,
    );
    let (code, text) = simulate(&["--config", &tight, "--out", out]);
    assert_eq!(code, 2, "{text}");
    assert!(text.contains("oracle skipped"));
    assert!(Path::new(out).join("biphoton_coincidence.csv").exists());

    let (code, text) = simulate(&["--config", &ok, "--scenario", "conditional_single", "--out", out]);
    assert_eq!(code, 0, "{text}");
    assert!(Path::new(out).join("conditional_single.csv").exists());
}

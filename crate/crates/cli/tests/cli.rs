use std::path::PathBuf;
use std::process::{Command, Output};

fn weakpps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakpps"))
        .args(args)
        .output()
        .expect("failed to run weakpps")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("weakpps-cli-{}-{name}", std::process::id()))
}

#[test]
fn lists_presets() {
    let out = weakpps(&["--list-presets"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in [
        "fig1",
        "fig2",
        "fig3",
        "fig4",
        "fig5",
        "fig7",
        "threebox",
        "interferometer",
    ] {
        assert!(
            text.lines().any(|l| l.starts_with(name)),
            "missing preset {name}"
        );
    }
}

#[test]
fn threebox_table() {
    let out = weakpps(&["threebox", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let expected = [(1.0, 1.0), (1.0, 1.0), (0.2, -1.0)];
    for (row, (single, weak)) in rows.iter().zip(expected) {
        assert!((row["single_box"].as_f64().unwrap() - single).abs() < 1e-12);
        assert!((row["all_boxes"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((row["weak"].as_f64().unwrap() - weak).abs() < 1e-12);
    }
}

#[test]
fn scans_are_reproducible() {
    let args = [
        "deflection-scan",
        "--steps",
        "5",
        "--methods",
        "linear,nonlinear,exact,mc",
        "--mc-trials",
        "2000",
    ];
    let a = weakpps(&args);
    let b = weakpps(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "index,gamma,meter,regime,linear,nonlinear,exact,mc,error"
    );
    assert_eq!(lines.count(), 5 * 4);

    let other_seed = weakpps(&[&args[..], &["--seed", "2"]].concat());
    assert!(other_seed.status.success());
    assert_ne!(other_seed.stdout, a.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_weakpps"))
            .args([
                "theta-scan",
                "--steps",
                "7",
                "--methods",
                "nonlinear,exact,mc",
                "--mc-trials",
                "1000",
            ])
            .env("WEAKPPS_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("4").stdout);
}

#[test]
fn writes_json_to_file() {
    let path = temp_path("scan.json");
    let out = weakpps(&[
        "resonance-scan",
        "--steps",
        "3",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3 * 3);
    assert!(rows
        .iter()
        .all(|r| r.get("resonance").is_some() && r.get("exact").is_some()));
}

#[test]
fn runs_scenario_file() {
    let path = temp_path("scenario.json");
    std::fs::write(
        &path,
        r#"{
            "name": "custom",
            "system": {"type": "qubit", "kappa": 0.1, "nu": 0.5},
            "meters": [{"type": "gaussian", "pointer": "q", "p_bar": 1, "b": 1}],
            "sweep": {"parameter": "gamma", "start": -0.01, "end": 0.01, "steps": 3},
            "methods": ["linear", "nonlinear", "exact", "oracle"]
        }"#,
    )
    .unwrap();
    let out = weakpps(&[
        "deflection-scan",
        "--scenario",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    std::fs::remove_file(&path).unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let exact = row["exact"].as_f64().unwrap();
        let oracle = row["oracle"].as_f64().unwrap();
        assert!(
            (exact - oracle).abs() <= 1e-6 * exact.abs() + 1e-12,
            "{row}"
        );
    }
}

#[test]
fn weakvalue_of_standard_system() {
    let out = weakpps(&["weakvalue", "--kappa", "0.5", "--nu", "0.3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "a_w_re,a_w_im,a_w_11,a_w_abs,a_w_arg,post_prob"
    );
    let fields: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|f| f.parse().unwrap())
        .collect();
    let cot = 1.0 / (0.25f64).tan();
    assert!((fields[0] - cot * 0.3f64.cos()).abs() < 1e-12);
    assert!((fields[1] + cot * 0.3f64.sin()).abs() < 1e-12);
}

#[test]
fn interferometer_reports_rows_with_errors() {
    let out = weakpps(&["interferometer", "--steps", "3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[1]["error"]
        .as_str()
        .unwrap()
        .contains("post-selection"));
    assert!(
        (rows[0]["snr_split"].as_f64().unwrap() / rows[0]["snr_homodyne"].as_f64().unwrap()
            - (2.0 / std::f64::consts::PI).sqrt())
        .abs()
            < 1e-12
    );
}

#[test]
fn verify_passes() {
    let out = weakpps(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).lines().skip(1).all(|l| l.contains(",true,")));
}

#[test]
fn bad_input_exits_with_status_one() {
    assert_eq!(
        weakpps(&["deflection-scan", "--preset", "nope"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        weakpps(&["deflection-scan", "--steps", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        weakpps(&["theta-scan", "--preset", "fig1"]).status.code(),
        Some(1)
    );
    assert_eq!(weakpps(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(weakpps(&[]).status.code(), Some(1));
    let missing = temp_path("missing.json");
    assert_eq!(
        weakpps(&["regimes", "--scenario", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(weakpps(&["--help"]).status.code(), Some(0));
}

use std::fs;
use std::process::Command;

fn perclab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_perclab"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = perclab(&["no-such-suite", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-suite"));
}

#[test]
fn malformed_arguments_are_usage_errors() {
    for args in [
        &["curve", "--rect", "12by3"][..],
        &["curve", "--model", "hexagonal"],
        &["curve", "--p", "1.5", "--out", "/dev/null/x"],
    ] {
        assert_eq!(perclab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn curve_is_replayable() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: &str, workers: &str| {
        let d = tmp.path().join(dir);
        let out = perclab(&[
            "curve",
            "--model",
            "site-sq",
            "--rect",
            "9x8",
            "--samples",
            "400",
            "--seed",
            "7",
            "--workers",
            workers,
            "--out",
            d.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        d
    };
    let (a, b) = (run("a", "1"), run("b", "3"));
    for f in ["curve.csv", "meta.json", "fit.json"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let csv = fs::read_to_string(a.join("curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("series,x,estimate,ci_halfwidth,samples"));
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 51);
    let est: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(est.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!((est[0], est[50]), (0.0, 1.0));
    let meta: serde_json::Value =
        serde_json::from_slice(&fs::read(a.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["ci_method"], "clopper-pearson");
    assert!(meta.get("build").is_some());
}

#[test]
fn dependent_model_reads_weight_file() {
    let tmp = tempfile::tempdir().unwrap();
    let w = tmp.path().join("w.json");
    fs::write(&w, "[[0, 0, 1], [1, 0, 2]]").unwrap();
    let out = perclab(&[
        "curve",
        "--model",
        "depbond",
        "--w",
        w.to_str().unwrap(),
        "--p",
        "0.5",
        "--rect",
        "9x8",
        "--samples",
        "2000",
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("o/curve.csv")).unwrap();
    let est: f64 = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!((est - 0.5).abs() < 0.05, "{est}");

    // odd weight away from the origin is rejected
    fs::write(&w, "[[0, 0, 1], [1, 0, 3]]").unwrap();
    let out = perclab(&[
        "curve",
        "--model",
        "depbond",
        "--w",
        w.to_str().unwrap(),
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quick_suite_passes_and_writes_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = perclab(&[
        "duality-exhaustive",
        "--budget",
        "quick",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let fit: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit["passed"], true);
    assert_eq!(fit["checks"].as_array().unwrap().len(), 3);
}

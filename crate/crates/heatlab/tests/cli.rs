use std::path::Path;
use std::process::{Command, Output};

use heatlab::output::read_radial_csv;
use serde_json::Value;

fn heatlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const FAST: [&str; 4] = ["--grid-M", "256", "--steps", "60"];

#[test]
fn classify_exit_codes_and_labels() {
    let base = [
        "classify",
        "--N",
        "3",
        "--r",
        "1",
        "--f",
        "power:q=3",
        "--h",
        "one",
    ];
    let run = |extra: &[&str]| heatlab(&[&base[..], extra].concat());

    let upper = run(&["--rho", "0.5", "--side", "upper"]);
    assert_eq!(code(&upper), 0);
    let report = json(&upper);
    assert_eq!(report["command"], "classify");
    assert_eq!(report["result"]["theorem"], "unweighted-existence");
    assert!(report["certificates"]
        .as_array()
        .is_some_and(|c| !c.is_empty()));
    for key in ["spec", "timings"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }

    let lower = run(&["--rho", "1.5", "--side", "lower"]);
    assert_eq!(code(&lower), 1);
    assert_eq!(json(&lower)["result"]["theorem"], "unweighted-nonexistence");

    assert_eq!(code(&run(&["--rho", "1.0"])), 2);
}

#[test]
fn invalid_input_exits_three() {
    for args in [
        &["classify", "--rho", "abc"][..],
        &["classify", "--rho", "3.5"],
        &["classify", "--f", "cube"],
        &["classify", "--bogus"],
        &["verify", "--only", "nothing"],
        &["solve", "--method", "rk4"],
    ] {
        let out = heatlab(args);
        assert_eq!(code(&out), 3, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# experiment\nrho = 1.5\nf = power:q=2\nA=3\n").unwrap();
    let path = path.to_str().unwrap();
    let out = heatlab(&[
        "classify",
        "--config",
        path,
        "--rho",
        "0.25",
        "--print-config",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rho=0.25\n"));
    assert!(text.contains("f=power:q=2\n"));
    assert!(text.contains("A=3\n"));

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "rho 1.5\n").unwrap();
    assert_eq!(
        code(&heatlab(&["classify", "--config", bad.to_str().unwrap()])),
        3
    );
}

#[test]
fn output_is_reproducible() {
    let args = ["classify", "--rho", "0.75", "--grid-M", "256"];
    let (a, b) = (heatlab(&args), heatlab(&args));
    assert_eq!(a.stdout, b.stdout);
    let args = ["probe", "--rho", "1.25", "--grid-M", "256"];
    assert_eq!(heatlab(&args).stdout, heatlab(&args).stdout);
}

#[test]
fn sweep_rows_follow_the_dichotomy() {
    let empty = heatlab(&["sweep-rho", "--rho-list", ""]);
    assert_eq!(code(&empty), 0);
    let text = String::from_utf8(empty.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("rho,verdict,status,t_star,escape_time,phi_max"));

    let out = heatlab(&[&["sweep-rho", "--rho-list", "0.5,1.5"][..], &FAST].concat());
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][1], "predicted");
    assert_eq!(&rows[0][2], "converged");
    assert!(rows[0][7].parse::<f64>().unwrap() > 0.0);
    assert_eq!(&rows[1][1], "excluded");
    assert!(rows[1][5].parse::<f64>().unwrap() > 1.0);
}

#[test]
fn probe_exit_codes() {
    assert_eq!(
        code(&heatlab(&["probe", "--rho", "1.5", "--grid-M", "256"])),
        1
    );
    assert_eq!(
        code(&heatlab(&["probe", "--rho", "0.5", "--grid-M", "256"])),
        0
    );
    let linear = heatlab(&["probe", "--f", "linear:c=1", "--grid-M", "256"]);
    assert_eq!(code(&linear), 2);
    assert_eq!(json(&linear)["result"]["status"], "inapplicable");
}

#[test]
fn verify_filters_and_reports_faults() {
    let out = heatlab(&["verify", "--only", "smoothing", "--cases", "10"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let records = report["result"]["records"].as_array().unwrap();
    assert_eq!(records.len(), 11);
    assert!(records
        .iter()
        .all(|r| r["check"].as_str().unwrap().starts_with("smoothing")));
    for key in ["check", "params", "lhs", "rhs", "ratio", "pass"] {
        assert!(records[0].get(key).is_some(), "missing {key}");
    }

    let broken = heatlab(&[
        "verify",
        "--only",
        "smoothing",
        "--cases",
        "10",
        "--inject-fault",
        "kernel-constant",
    ]);
    assert_eq!(code(&broken), 1);
    let failed = json(&broken)["result"]["failed"].clone();
    assert!(failed
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f == "smoothing-saturation"));
}

#[test]
fn solve_writes_trace_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = heatlab(
        &[
            &["solve", "--rho", "0.5", "--out", out_dir.to_str().unwrap()][..],
            &FAST,
        ]
        .concat(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["report.json", "trace.csv", "trace.json", "profile.csv"] {
        assert!(Path::new(&out_dir).join(name).exists(), "{name}");
    }
    let trace = std::fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,sup_norm,lr_norm,scaled_sup\n"));
    let header: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("trace.json")).unwrap())
            .unwrap();
    assert_eq!(header["status"], "converged");
    assert_eq!(
        trace.lines().count() - 1,
        header["snapshots"].as_u64().unwrap() as usize
    );
    let profile =
        read_radial_csv(&std::fs::read_to_string(out_dir.join("profile.csv")).unwrap()).unwrap();
    assert_eq!(profile.len(), 256);
    assert!(profile.iter().all(|&(_, u)| u.is_finite() && u >= 0.0));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["result"]["decay"]["pass"], true);
    assert_eq!(report["result"]["uniqueness"]["pass"], true);
}

#[test]
fn solve_outside_the_existence_regime() {
    let none = heatlab(&[&["solve", "--rho", "1.5"][..], &FAST].concat());
    assert_eq!(code(&none), 1);
    assert_eq!(json(&none)["result"]["status"], "no_admissible_time");
    let direct = heatlab(&[&["solve", "--rho", "1.5", "--method", "direct"][..], &FAST].concat());
    assert_eq!(code(&direct), 1);
    assert_eq!(json(&direct)["result"]["trace"]["status"], "blown_up");
}

#[test]
fn criteria_reports_critical_values() {
    let out = heatlab(&["criteria", "--h", "t", "--grid-M", "256"]);
    assert_eq!(code(&out), 0);
    let result = json(&out)["result"].clone();
    assert_eq!(result["rho_star"], 1.0);
    assert_eq!(result["rho_star_weighted"], 2.0);
    assert_eq!(result["growth"]["method"], "exact");
}

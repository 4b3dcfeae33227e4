//! End-to-end command-line behavior: envelope shape, precedence, determinism,
//! precision round-trips, exit codes, and the spawned release binary.

use serde_json::Value;
use std::f64::consts::{LN_2, PI};
use std::path::PathBuf;
use std::process::Command;

fn run_vec(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = lyaprod::cli::run(args.iter().copied(), &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn parse(out: &str) -> Value {
    serde_json::from_str(out).expect("report must be valid JSON")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("lyaprod-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn envelope_carries_config_seed_and_version() {
    let (code, out, _) = run_vec(&[
        "lyaprod",
        "closed-form",
        "--dist",
        "uniform",
        "--lo",
        "0",
        "--hi",
        "1",
        "--seed",
        "5",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["command"], "closed-form");
    assert_eq!(v["seed"], 5);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["dist"]["kind"], "uniform");
    let lam = v["result"]["lambda"].as_f64().unwrap();
    assert!((lam - (2.0 * LN_2 - 0.5)).abs() <= 1e-15);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let argv = [
        "lyaprod",
        "estimate-lambda",
        "--dist",
        "binary",
        "--a",
        "1",
        "--b",
        "2",
        "--p",
        "0.5",
        "--n",
        "2000",
        "--seed",
        "42",
    ];
    let (c1, o1, _) = run_vec(&argv);
    let (c2, o2, _) = run_vec(&argv);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(o1, o2);

    let mut reseeded = argv;
    reseeded[13] = "43";
    let (c3, o3, _) = run_vec(&reseeded);
    assert_eq!(c3, 0);
    assert_ne!(o1, o3, "a fresh seed must move the estimate");
}

#[test]
fn numbers_round_trip_without_precision_loss() {
    let (code, out, _) = run_vec(&[
        "lyaprod",
        "estimate-sigma2",
        "--dist",
        "exponential",
        "--rate",
        "1",
        "--n",
        "30000",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    let first = parse(&out);
    let reserialized = serde_json::to_string(&first).unwrap();
    let second = parse(&reserialized);
    assert_eq!(first, second, "re-emission must not move any number");

    fn walk(v: &Value, count: &mut usize) {
        match v {
            Value::Number(n) => {
                if let Some(x) = n.as_f64() {
                    let reparsed: f64 = n.to_string().parse().unwrap();
                    assert!(
                        reparsed == x || (reparsed.is_nan() && x.is_nan()),
                        "{n} reparses to {reparsed}"
                    );
                    *count += 1;
                }
            }
            Value::Array(a) => a.iter().for_each(|v| walk(v, count)),
            Value::Object(o) => o.values().for_each(|v| walk(v, count)),
            _ => {}
        }
    }
    let mut numbers = 0;
    walk(&first, &mut numbers);
    assert!(numbers >= 8, "expected a numeric report, saw {numbers}");
}

#[test]
fn flags_override_file_config() {
    let path = temp_path("config.json");
    std::fs::write(
        &path,
        r#"{"dist": {"kind": "binary", "a": 1.0, "b": 2.0, "p": 0.5}, "n": 500, "seed": 9}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let (code, out, _) = run_vec(&[
        "lyaprod",
        "estimate-lambda",
        "--config",
        cfg,
        "--n",
        "1000",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["seed"], 9, "file seed applies when no flag is given");
    assert_eq!(v["config"]["n"], 1000, "flag n overrides file n");
    assert_eq!(v["config"]["dist"]["kind"], "binary");
    assert_eq!(v["result"]["n_samples"], 1000);
}

#[test]
fn missing_seed_is_defaulted_and_echoed() {
    let (code, out, _) = run_vec(&[
        "lyaprod",
        "closed-form",
        "--dist",
        "exponential",
        "--rate",
        "1",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert!(v["seed"].is_u64(), "default seed must be recorded: {v}");
}

#[test]
fn exit_codes_cover_the_documented_failures() {
    // unknown flag: argument parsing, code 2
    let (code, _, err) = run_vec(&["lyaprod", "closed-form", "--no-such-flag"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());

    // incomplete family spec: config error, code 2
    let (code, _, err) = run_vec(&["lyaprod", "closed-form", "--dist", "binary", "--a", "1"]);
    assert_eq!(code, 2, "{err}");
    let e = parse(&err);
    assert_eq!(e["error"]["exit_code"], 2);
    assert_eq!(e["error"]["kind"], "config");

    // cancelling atoms: validation error, code 3
    let (code, _, err) = run_vec(&[
        "lyaprod",
        "closed-form",
        "--dist",
        "binary",
        "--a",
        "1",
        "--b",
        "-1",
        "--p",
        "0.5",
    ]);
    assert_eq!(code, 3);
    let e = parse(&err);
    assert_eq!(e["error"]["kind"], "validation");

    // starved quadrature budget: nonconvergence, code 4
    let (code, _, err) = run_vec(&[
        "lyaprod",
        "oracle",
        "--dist",
        "uniform",
        "--lo",
        "-1",
        "--hi",
        "2",
        "--max-subdivisions",
        "1",
    ]);
    assert_eq!(code, 4, "{err}");
    let e = parse(&err);
    assert_eq!(e["error"]["kind"], "nonconvergence");
}

#[test]
fn csv_dumps_have_one_row_per_replication() {
    let (code, out, _) = run_vec(&[
        "lyaprod",
        "clt-test",
        "--dist",
        "exponential",
        "--rate",
        "1",
        "--n",
        "50",
        "--reps",
        "20",
        "--seed",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.trim_end().lines().collect();
    assert_eq!(lines[0], "rep,score");
    assert_eq!(lines.len(), 21);

    let (code, out, _) = run_vec(&[
        "lyaprod",
        "cancellation",
        "--dist",
        "binary",
        "--a",
        "1",
        "--b",
        "2",
        "--p",
        "0.5",
        "--n",
        "50",
        "--reps",
        "10",
        "--seed",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.trim_end().lines().collect();
    assert_eq!(lines[0], "rep,s_total,s_even,s_odd");
    assert_eq!(lines.len(), 11);
}

#[test]
fn out_flag_writes_the_report_to_disk() {
    let path = temp_path("report.json");
    let out_arg = path.to_str().unwrap();
    let (code, out, _) = run_vec(&[
        "lyaprod",
        "closed-form",
        "--dist",
        "laplace",
        "--scale",
        "2",
        "--seed",
        "8",
        "--out",
        out_arg,
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty(), "report goes to the file, not stdout");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let v = parse(&text);
    let lam = v["result"]["lambda"].as_f64().unwrap();
    assert_eq!(lam, 0.5);
}

#[test]
fn classify_reports_the_form_and_flat_constants() {
    let (code, out, _) = run_vec(&[
        "lyaprod",
        "classify",
        "--atoms",
        "1,-5.82842712474619",
        "--weights",
        "0.4,0.6",
        "--seed",
        "1",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["result"]["verdict"]["form"], "FormII");
    let lam = v["result"]["lambda"].as_f64().unwrap();
    assert!((lam - LN_2).abs() <= 1e-12);
    assert!(v["result"]["sigma2"].as_f64().unwrap().abs() <= 1e-12);
}

#[test]
fn paper_table_reports_three_routes_for_five_families() {
    let (code, out, _) = run_vec(&["lyaprod", "paper-table", "--n", "20000", "--seed", "4"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let closed = row["lambda_closed"].as_f64().unwrap();
        let oracle = row["lambda_oracle"].as_f64().unwrap();
        let mc = row["lambda_mc"].as_f64().unwrap();
        let se = row["lambda_stderr"].as_f64().unwrap();
        assert!((closed - oracle).abs() <= 1e-6, "{row}");
        assert!((mc - closed).abs() <= 6.0 * se, "{row}");
        if let Some(sig_closed) = row["sigma2_closed"].as_f64() {
            let sig_oracle = row["sigma2_oracle"].as_f64().unwrap();
            assert!((sig_closed - sig_oracle).abs() <= 1e-6, "{row}");
        }
    }
}

#[test]
fn hill_demo_reports_both_rates() {
    let (code, out, _) = run_vec(&[
        "lyaprod", "hill-demo", "--h", "50", "--n", "400", "--reps", "2", "--seed", "1",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    let exact = v["result"]["rate_exact"].as_f64().unwrap();
    let approx = v["result"]["rate_approx"].as_f64().unwrap();
    let gap = v["result"]["gap"].as_f64().unwrap();
    assert!((exact - approx).abs() - gap <= 1e-15);
    assert!(gap < 1e-2, "constant h=50 leaves a tiny defect: {gap}");
}

#[test]
fn oracle_reports_quadrature_with_error_bounds() {
    let (code, out, _) = run_vec(&[
        "lyaprod", "oracle", "--dist", "exponential", "--rate", "1", "--seed", "1",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["result"]["method"], "quadrature");
    let lam = v["result"]["lambda"]["value"].as_f64().unwrap();
    assert!((lam - 1.0).abs() <= 1e-8);
    assert!(v["result"]["lambda"]["error_bound"].as_f64().unwrap() > 0.0);
    let sig = v["result"]["sigma2"]["value"].as_f64().unwrap();
    assert!((sig - (PI * PI - 9.0) / 3.0).abs() <= 1e-6);
}

#[test]
fn help_documents_exit_codes_and_config_schema() {
    let (code, out, _) = run_vec(&["lyaprod", "--help"]);
    assert_eq!(code, 0);
    for needle in [
        "EXIT CODES",
        "CONFIG FILE",
        "closed-form",
        "estimate-lambda",
        "estimate-sigma2",
        "oracle",
        "clt-test",
        "cancellation",
        "classify",
        "hill-demo",
        "paper-table",
    ] {
        assert!(out.contains(needle), "help must mention {needle}");
    }
}

#[test]
fn spawned_binary_agrees_with_in_process_runs() {
    let exe = env!("CARGO_BIN_EXE_lyaprod");
    let argv = [
        "closed-form",
        "--dist",
        "laplace",
        "--scale",
        "1",
        "--seed",
        "2",
    ];
    let first = Command::new(exe).args(argv).output().unwrap();
    let second = Command::new(exe).args(argv).output().unwrap();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["result"]["lambda"].as_f64().unwrap(), 0.5);
    let want = (8.0 * PI * PI - 27.0) / 36.0;
    let sig = v["result"]["sigma2"].as_f64().unwrap();
    assert!((sig - want).abs() <= 1e-15);

    let (_, in_process, _) = run_vec(&[
        "lyaprod",
        "closed-form",
        "--dist",
        "laplace",
        "--scale",
        "1",
        "--seed",
        "2",
    ]);
    assert_eq!(String::from_utf8(first.stdout).unwrap(), in_process);
}

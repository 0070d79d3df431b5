use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_l4moment"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let o = run(&all);
    (o.status.code().unwrap(), serde_json::from_str(&stdout(&o)).expect("json report"))
}

fn assert_schema(v: &Value, command: &str) {
    assert_eq!(v["command"], command);
    assert!(v["passed"].is_boolean());
    assert!(v["values"].is_object());
    for c in v["checks"].as_array().unwrap() {
        assert!(c["name"].is_string());
        assert!(c["residual"].is_number());
        assert!(c["tolerance"].is_number() || c["tolerance"].is_null());
        assert!(c["passed"].is_boolean());
    }
}

#[test]
fn gauss_prints_phi_of_square() {
    let o = run(&["gauss", "--n", "9", "--k", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "value 6"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("gauss_n=9_k=0 ") && l.ends_with(" PASS")));
}

#[test]
fn invalid_flags_exit_2() {
    assert_eq!(run(&["sweep", "--xmax", "0"]).status.code(), Some(2));
    assert_eq!(run(&["gauss", "--n", "4", "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(&["gauss", "--n", "9", "--k", "0", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["lvalue", "--d", "9"]).status.code(), Some(2));
    assert_eq!(run(&["poisson", "--n", "3", "--z", "10", "--profile", "wide"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_1() {
    // a truncation too short for the certified tail
    assert_eq!(run(&["poisson", "--n", "15", "--z", "10", "--kmax", "1"]).status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_3() {
    let o = run(&["sweep", "--xmax", "20", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_identities_reports_residuals() {
    let o = run(&["verify-identities", "--plimit", "100000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["z1_half_half_eq_4a4", "z4_half_half_0_eq_32a4_over_pi2", "leading_1/181440", "afe_identity"] {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap_or_else(|| panic!("{name} missing"));
        let fields: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(fields.len(), 4, "{line}");
        fields[1].parse::<f64>().unwrap();
    }
}

#[test]
fn json_schema_for_every_subcommand() {
    let cases: [(&str, &[&str]); 6] = [
        ("verify-identities", &["verify-identities", "--plimit", "2000", "--afe-dmax", "30"]),
        ("gauss", &["gauss", "--n", "15", "--k", "-7"]),
        ("poisson", &["poisson", "--n", "5", "--z", "30"]),
        ("sweep", &["sweep", "--xmax", "64", "--k", "2,4"]),
        ("euler", &["euler", "--which", "z1", "--plimit", "5000"]),
        ("lvalue", &["lvalue", "--d", "7"]),
    ];
    for (name, args) in cases {
        let (code, v) = json(args);
        assert_schema(&v, name);
        if name != "verify-identities" {
            assert_eq!(code, 0, "{name}: {v}");
        }
    }
}

#[test]
fn poisson_passes_default_kmax() {
    let (code, v) = json(&["poisson", "--n", "9", "--z", "30"]);
    assert_eq!(code, 0);
    assert!(v["checks"][0]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn euler_a4_value() {
    let (code, v) = json(&["euler", "--which", "a4", "--plimit", "100000"]);
    assert_eq!(code, 0);
    let a4 = v["values"]["extrapolated"]["re"].as_f64().unwrap();
    assert!((a4 - 8.3654920e-6).abs() < 1e-12, "{a4}");
    // outside the region of absolute convergence
    assert_eq!(run(&["euler", "--which", "z4", "--gamma", "0.5"]).status.code(), Some(2));
}

#[test]
fn lvalue_matches_afe() {
    let (code, v) = json(&["lvalue", "--d", "5", "--s", "0.5"]);
    assert_eq!(code, 0);
    assert!(v["checks"][0]["passed"].as_bool().unwrap());
}

fn sweep_file(dir: &Path, threads: &str, name: &str) -> String {
    let path = dir.join(name);
    let o = run(&["--threads", threads, "sweep", "--xmax", "300", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn sweep_csv_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let one = sweep_file(dir.path(), "1", "a.csv");
    let four = sweep_file(dir.path(), "4", "b.csv");
    assert_eq!(one, four);
    assert!(one.starts_with("X,k,sharp_sum,smooth_sum,predicted,ratio,warnings\n"));
}

#[test]
fn sweep_uses_output_dir_env() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["sweep", "--xmax", "40", "--data-format", "json"])
        .env("L4MOMENT_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(doc["config"]["x_max"], 40);
    assert!(!doc["records"].as_array().unwrap().is_empty());
}

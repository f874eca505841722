use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn syncap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syncap"))
        .args(args)
        .env_remove("SYNCAP_SERIES_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn assert_valid(schema_file: &str, instance: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(schema_file);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:#?}");
}

#[test]
fn bound_deletion_trivial_anchor() {
    let out = syncap(&["bound", "--channel", "deletion", "--d", "0", "--json"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_valid("bound.schema.json", &v);
    assert!((v["bound"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((v["gamma_star"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert_eq!(v["optimised"], true);
}

#[test]
fn bound_insertion_reports_both_bounds_and_max() {
    let out = syncap(&["bound", "--channel", "insertion", "--i", "0.1", "--alpha", "1", "--json"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_valid("bound.schema.json", &v);
    let results = v["results"].as_array().unwrap();
    let kinds: Vec<&str> = results.iter().map(|r| r["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["insertion_lb1", "insertion_lb2"]);
    let best = results.iter().map(|r| r["bound_bits"].as_f64().unwrap()).fold(f64::MIN, f64::max);
    assert_eq!(v["bound"].as_f64().unwrap(), best);

    let text = syncap(&["bound", "--channel", "insertion", "--i", "0.1", "--alpha", "1"]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("insertion_lb1") && text.contains("insertion_lb2"));
}

#[test]
fn bound_delins_full_term_table() {
    let out = syncap(&["bound", "--channel", "delins", "--d", "0.1", "--i", "0.1", "--alpha", "0.8", "--json"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_valid("bound.schema.json", &v);
    let b = v["bound"].as_f64().unwrap();
    assert!(b > 0.0 && b < 1.0, "{b}");
    let r = &v["results"][0];
    let names: Vec<&str> = r["terms"].as_array().unwrap().iter().map(|t| t["term"]["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["h(gamma)", "h_T(i',q)", "H(S|YYT)", "H(LX|LY')"]);
    let sum: f64 = r["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let c = t["weight"].as_f64().unwrap() * t["term"]["value"].as_f64().unwrap();
            if t["role"] == "penalty" { -c } else { c }
        })
        .sum();
    assert!((sum - b).abs() < 1e-12);
    assert!(!r["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn fixed_gamma_and_printed_closed_form() {
    let out = syncap(&["bound", "--channel", "deletion", "--d", "0.3", "--gamma", "0.5", "--paper-closed-forms", "--json"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_valid("bound.schema.json", &v);
    assert_eq!(v["optimised"], false);
    assert_eq!(v["gamma_star"], 0.5);
    let names: Vec<&str> =
        v["results"][0]["terms"].as_array().unwrap().iter().map(|t| t["term"]["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"H(S2|Y1Y2)[printed]"), "{names:?}");
}

#[test]
fn incoherent_flags_are_usage_errors() {
    for args in [
        &["bound", "--channel", "deletion", "--d", "0.1", "--i", "0.1"][..],
        &["bound", "--channel", "insertion", "--i", "0.1"][..],
        &["bound", "--channel", "delins", "--d", "0.7", "--i", "0.7", "--alpha", "1"][..],
        &["bound", "--channel", "deletion", "--d", "0.1", "--gamma", "1"][..],
        &["bound", "--channel", "bogus", "--d", "0.1"][..],
        &["bound", "--channel", "deletion", "--d", "0.1", "--tol", "1e-9"][..],
        &["sweep", "--channel", "deletion", "--d", "0:0.9"][..],
        &["verify", "nonsense"][..],
    ] {
        let out = syncap(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn deletion_sweep_is_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = syncap(&["sweep", "--channel", "deletion", "--d", "0:0.9:0.05", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());

    let mut rd = csv::Reader::from_reader(bytes.as_slice());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..6], ["channel", "d", "i", "alpha", "gamma_star", "bound"]);
    assert!(header[6..].iter().all(|h| h.starts_with("term:")));
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 19);
    assert_eq!(&rows[18][1], "0.9");
    let bounds: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!((bounds[0] - 1.0).abs() < 1e-6);
}

#[test]
fn insertion_sweep_has_lb_columns() {
    let out = syncap(&["sweep", "--channel", "insertion", "--i", "0.1:0.9:0.4", "--alpha", "0.8"]);
    assert!(out.status.success());
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[6..9], ["lb1", "lb2", "lb_max"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        let (lb1, lb2, max): (f64, f64, f64) = (r[6].parse().unwrap(), r[7].parse().unwrap(), r[8].parse().unwrap());
        assert_eq!(max, lb1.max(lb2));
        assert_eq!(&r[5], &r[8]);
    }
    let first = &rows[0];
    let last = &rows[2];
    assert!(first[7].parse::<f64>().unwrap() > first[6].parse::<f64>().unwrap());
    assert!(last[6].parse::<f64>().unwrap() > last[7].parse::<f64>().unwrap());
}

#[test]
fn tied_delins_sweep() {
    let out = syncap(&["sweep", "--channel", "delins", "--d", "0.05:0.15:0.05", "--i", "d", "--alpha", "1"]);
    assert!(out.status.success());
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    for r in rd.records().map(Result::unwrap) {
        assert_eq!(&r[1], &r[2]);
    }
}

#[test]
fn unwritable_sweep_path_fails() {
    let out = syncap(&["sweep", "--channel", "deletion", "--d", "0.1", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_structure() {
    let out = syncap(&["simulate", "--channel", "delins", "--d", "0.2", "--i", "0.2", "--alpha", "0.5", "--n", "9", "--seed", "4"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_valid("simulate.schema.json", &v);
    let len = |k: &str| v[k].as_array().map(Vec::len).unwrap_or_else(|| v[k].as_str().unwrap().len());
    assert_eq!(len("x"), 9);
    assert_eq!(len("pattern"), 9);
    assert_eq!(len("I"), len("y"));
    assert_eq!(len("T"), len("y"));
    assert_eq!(len("S"), len("y") + 1);
    assert_eq!(v["y_prime"]["run_lengths"].as_array().unwrap().len(), v["x_runs"]["run_lengths"].as_array().unwrap().len());

    let again = syncap(&["simulate", "--channel", "delins", "--d", "0.2", "--i", "0.2", "--alpha", "0.5", "--n", "9", "--seed", "4"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn simulate_noiseless_is_identity() {
    let out = syncap(&["simulate", "--channel", "delins", "--d", "0", "--i", "0", "--alpha", "1", "--n", "50", "--seed", "1"]);
    let v = stdout_json(&out);
    assert_valid("simulate.schema.json", &v);
    assert_eq!(v["x"], v["y"]);

    let out = syncap(&["simulate", "--channel", "deletion", "--d", "0.5", "--input", "0011101", "--seed", "2"]);
    let v = stdout_json(&out);
    assert_valid("simulate.schema.json", &v);
    assert_eq!(v["x"], "0011101");
    assert_eq!(v["gamma"], Value::Null);
    assert_eq!(v["S"].as_array().unwrap().len(), v["y"].as_str().unwrap().len() + 1);
}

#[test]
fn verify_oracle_passes() {
    let out = syncap(&["verify", "oracle"]);
    let v = stdout_json(&out);
    assert_valid("verify.schema.json", &v);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"][0]["suite"], "oracle");
}

#[test]
fn verify_reductions_reports_the_credit_gap() {
    let out = syncap(&["verify", "reductions"]);
    let v = stdout_json(&out);
    assert_valid("verify.schema.json", &v);
    assert_eq!(out.status.code(), Some(1));
    let checks = v["suites"][0]["checks"].as_array().unwrap();
    let verdict = |name: &str| checks.iter().find(|c| c["name"] == name).unwrap()["passed"].as_bool().unwrap();
    assert!(verdict("combined bound at i=0 equals deletion bound"));
    assert!(!verdict("combined bound at d=0 equals insertion LB2"));
    assert!(verdict("LB2 minus combined bound at d=0 equals the LB2 credit term"));
}

#[test]
fn series_config_from_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("series.cfg");
    std::fs::write(&cfg, "# coarse\ntail_epsilon = 1e-10\nr_max_cap = 5000\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_syncap"))
        .args(["bound", "--channel", "deletion", "--d", "0.2", "--gamma", "0.6", "--json"])
        .env("SYNCAP_SERIES_CONFIG", &cfg)
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["series"]["tail_epsilon"], 1e-10);
    assert_eq!(v["series"]["r_max_cap"], 5000);

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "tail_epsilon = -1\n").unwrap();
    let out = syncap(&["--config", bad.to_str().unwrap(), "bound", "--channel", "deletion", "--d", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

use std::process::Command;

use serde_json::Value;

fn vmvt(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_vmvt")).args(args).output().expect("run vmvt");
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap_or(-1))
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--deterministic"];
    all.extend_from_slice(args);
    let (out, code) = vmvt(&all);
    (serde_json::from_str(&out).unwrap_or_else(|e| panic!("bad json ({e}): {out}")), code)
}

#[test]
fn count_example() {
    let (v, code) = json(&["count", "--k", "2", "--s", "2", "--x", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["results"]["j"], "190");
    assert_eq!(v["results"]["diagonal"]["lower"], "100");
    assert!(v.get("generated_at").is_none());
    assert!(v["inputs"].get("threads").is_none());
}

#[test]
fn count_with_oracle_and_mitm() {
    let (v, code) = json(&["count", "--k", "3", "--s", "3", "--x", "5", "--strategy", "mitm", "--oracle"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["oracle_agrees"], true);
    assert_eq!(v["results"]["j"], v["results"]["oracle"]);
}

#[test]
fn certify_example() {
    let (v, code) = json(&["certify", "--k", "12", "--s", "60"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["covered"], true);
    let (v, code) = json(&["certify", "--k", "12", "--s", "100"]);
    assert_eq!(code, 2);
    assert_eq!(v["results"]["covered"], false);
}

#[test]
fn congruence_example() {
    let (v, code) = json(&["congruence", "--p", "5", "--k", "3", "--m", "1", "--a", "0", "--b", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["within_bound"], true);
    assert_eq!(v["results"]["bound"], "6");
}

#[test]
fn congruence_budget_refusal() {
    let (v, code) = json(&["congruence", "--p", "7", "--k", "3", "--m", "1", "--a", "1", "--b", "2"]);
    assert_eq!(code, 4);
    assert_eq!(v["status"], "resource_refusal");
}

#[test]
fn table_csv() {
    let (out, code) = vmvt(&["table", "--kmin", "4", "--kmax", "20", "--format", "csv"]);
    // k = 6 and others differ from the published table.
    assert_eq!(code, 3);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 17);
    let row = |k: &str| rows.iter().find(|r| &r[col("k")] == k).unwrap().clone();
    assert_eq!(&row("12")[col("d_table")], "68");
    assert_eq!(&row("4")[col("verdict")], "Match");
    assert_eq!(&row("4")[col("d_computed")], "8");
    assert_eq!(&row("6")[col("verdict")], "Discrepancy");
    assert!(!row("6")[col("blocking")].is_empty());
}

#[test]
fn table_without_discrepancy_exits_zero() {
    let (_, code) = json(&["table", "--kmin", "4", "--kmax", "5"]);
    assert_eq!(code, 0);
}

#[test]
fn recurrence_and_refined() {
    let (v, code) = json(&["recurrence", "--k", "4", "--r", "2", "--s", "6", "--R", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["table"]["closed_form_agrees"], true);
    let (v, code) = json(&["recurrence", "--k", "27", "--r", "24", "--s", "273", "--R", "2", "--refined"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["refined"]["k_m_bounds_hold"], true);
}

#[test]
fn waring_and_tarry() {
    let (v, code) = json(&["waring", "--k", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["critical_defect"], "1134");
    assert_eq!(v["results"]["u1"]["w"], "506");
    assert_eq!(v["provenance"]["constants"], "interval");
    let (v, code) = json(&["tarry", "--k", "2000"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["holds"], true);
    assert_eq!(v["results"]["bound"], "2001001");
    let (v, code) = json(&["tarry", "--k", "20"]);
    assert_eq!(code, 2);
    assert_eq!(v["results"]["holds"], false);
}

#[test]
fn gate_is_hypothesis() {
    let (v, code) = json(&["waring", "--k", "10"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("too small"));
    let (_, code) = json(&["--large-k-gate", "8", "tarry", "--k", "10"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        vec!["count", "--k", "2"],
        vec!["frobnicate"],
        vec!["count", "--k", "x", "--s", "2", "--x", "3"],
        vec!["--format", "xml", "tarry", "--k", "30"],
        vec!["--threads", "0", "tarry", "--k", "30"],
    ] {
        assert_eq!(vmvt(&args).1, 64, "{args:?}");
    }
    let (_, code) = json(&["table", "--kmin", "3"]);
    assert_eq!(code, 64);
    let (_, code) = json(&["count", "--k", "2", "--s", "2", "--x", "3", "--strategy", "fast"]);
    assert_eq!(code, 64);
    assert_eq!(vmvt(&["--help"]).1, 0);
}

#[test]
fn memory_budget_refusal() {
    let (v, code) = json(&["--memory-budget", "1000", "count", "--k", "3", "--s", "3", "--x", "20"]);
    assert_eq!(code, 4);
    assert_eq!(v["status"], "resource_refusal");
}

#[test]
fn byte_identical_across_threads() {
    for args in [
        vec!["count", "--k", "2", "--s", "3", "--x", "15"],
        vec!["congruence", "--p", "5", "--k", "3", "--m", "2", "--a", "0", "--b", "1"],
        vec!["waring", "--k", "300"],
        vec!["audit-all", "--format", "csv"],
    ] {
        let run = |t: &str| {
            let mut a = vec!["--deterministic", "--threads", t];
            a.extend_from_slice(&args);
            vmvt(&a)
        };
        assert_eq!(run("1"), run("8"), "{args:?}");
    }
}

#[test]
fn census_cache_round_trip() {
    let dir = std::env::temp_dir().join(format!("vmvt-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cache = dir.join("c.bin");
    let csv_path = dir.join("c.csv");
    let c = cache.to_str().unwrap();
    let (v, code) = json(&["count", "--k", "2", "--s", "3", "--x", "9", "--cache", c, "--census-csv", csv_path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["cache"], "written");
    let (w, _) = json(&["count", "--k", "2", "--s", "3", "--x", "9", "--cache", c]);
    assert_eq!(w["results"]["cache"], "hit");
    assert_eq!(v["results"]["j"], w["results"]["j"]);
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("j1,j2,count\n"));
    let (_, code) = json(&["count", "--k", "2", "--s", "3", "--x", "10", "--cache", c]);
    assert_eq!(code, 64);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn audit_all_quick_passes() {
    let (v, code) = json(&["audit-all"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 7);
}

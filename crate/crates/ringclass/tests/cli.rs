use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use ringclass::output::without_timestamp;
use ringclass::table::{format_table, parse_table};
use ringclass_core::hecke::Eigenform;

fn ringclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringclass")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(ringclass(&["classgroup", "--disc", "-23", "--bogus"]).status.code(), Some(1));
    assert_eq!(ringclass(&[]).status.code(), Some(1));
    assert_eq!(ringclass(&["classgroup", "--disc", "-5"]).status.code(), Some(2));
    assert_eq!(ringclass(&["classgroup", "--disc", "5"]).status.code(), Some(2));
    let o = ringclass(&["central", "--form", "11a", "--disc", "-3", "--pmax", "200000"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(ringclass(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic_up_to_timestamp() {
    let args = ["average", "--form", "delta", "--disc", "-23", "--conductor", "1", "--route", "both"];
    let a = ringclass(&args);
    let b = ringclass(&args);
    assert!(a.status.success());
    let (a, b) = (stdout(&a), stdout(&b));
    assert!(a.contains("generated_unix"));
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
}

#[test]
fn average_routes_agree_and_record_defaults() {
    let o = ringclass(&["average", "--form", "delta", "--disc", "-23", "--conductor", "1", "--route", "both"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let gap = v["result"]["route_gap"].as_f64().unwrap();
    let h = v["result"]["H"].as_f64().unwrap();
    assert!(gap <= 1e-10 * h.abs().max(1.0), "gap {gap}");
    let defaults: Vec<&str> = v["provenance"]["defaults"].as_array().unwrap().iter().filter_map(|d| d.as_str()).collect();
    assert!(defaults.contains(&"trunc-a"));
    assert!(!defaults.contains(&"disc"));
}

#[test]
fn config_file_fills_unset_options_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# panel\ndisc = -7\nconductor = 2\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = ringclass(&["--config", cfg, "classgroup"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["disc"].as_i64(), Some(-28));
    let o = ringclass(&["--config", cfg, "classgroup", "--conductor", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["disc"].as_i64(), Some(-63));
    std::fs::write(dir.path().join("bad.conf"), "flavour = strange\n").unwrap();
    let o = ringclass(&["--config", dir.path().join("bad.conf").to_str().unwrap(), "classgroup", "--disc", "-4"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn csv_output_writes_provenance_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let o = ringclass(&["--format", "csv", "--output", out.to_str().unwrap(), "classgroup", "--disc", "-23"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().count() >= 2);
    assert!(dir.path().join("h.provenance.json").exists());
}

#[test]
fn selftest_passes() {
    let o = ringclass(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn table_text_round_trips(values in proptest::collection::vec(-2.0f64..2.0, 1..40)) {
        let primes: Vec<u64> = (2u64..).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).take(values.len()).collect();
        let pairs: Vec<(u64, f64)> = primes.into_iter().zip(values).collect();
        let f = Eigenform::from_prime_values("t", 12, 1, Some(1), &pairs).unwrap();
        let text = format_table(&f);
        let g = parse_table(&text, Path::new("mem")).unwrap();
        prop_assert_eq!(format_table(&g), text);
    }
}

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn agcal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agcal")).args(args).output().expect("spawn agcal")
}

fn temp_scenario(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("agcal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn lines(o: &Output) -> Vec<Value> {
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn compare_record_carries_relation_and_witness() {
    let p = temp_scenario("cmp.scn", "scenario: cmp\ncommand: compare\n  x: eps^-2\n  y: eps^-3\n  expect: XbigOofY\n");
    let o = agcal(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let recs = lines(&o);
    assert_eq!(recs.len(), 2);
    let r = &recs[1];
    assert_eq!(r["data"]["relation"], "XbigOofY");
    assert_eq!(r["mode"], "Exact");
    assert_eq!(r["witness"]["h"], 1.0);
    assert_eq!(r["witness"]["eps0"], 1.0);
    assert_eq!(r["id"], "compare-1");
}

#[test]
fn empty_scenario_emits_header_only() {
    let p = temp_scenario("empty.scn", "scenario: nothing\n");
    let o = agcal(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let recs = lines(&o);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["record"], "header");
    assert_eq!(recs[0]["commands"], 0);
    assert_eq!(recs[0]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn malformed_gauge_is_a_schema_error_before_execution() {
    let text = "scenario: bad\ncommand: laws\n  suite: big-o\ncommand: moderate\n  net: eps^-1\n  gauge: powers(eps^-1\n";
    let p = temp_scenario("bad.scn", text);
    let o = agcal(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty(), "nothing may run");
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains(":6:"), "{err}");
}

#[test]
fn schema_errors_report_line_and_column() {
    let p = temp_scenario("col.scn", "scenario: s\ncommand: compare\n  x: eps^-2 +\n  y: 1\n");
    let o = agcal(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains(":3:"), "{err}");
    let p = temp_scenario("key.scn", "scenario: s\ncommand: compare\n  x: 1\n  y: 1\n  z: 1\n");
    let err = String::from_utf8(agcal(&["run", p.to_str().unwrap()]).stderr).unwrap();
    assert!(err.contains(":5:3:") && err.contains("'z'"), "{err}");
}

#[test]
fn mismatch_and_io_exit_codes() {
    let p = temp_scenario("mm.scn", "scenario: mm\ncommand: compare\n  x: eps^-3\n  y: eps^-2\n");
    let o = agcal(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = &lines(&o)[1];
    assert_eq!(r["matched"], false);
    assert_eq!(r["status"], "Fails");
    let o = agcal(&["run", "/nonexistent/agcal.scn"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn engine_errors_are_recorded_per_command() {
    let text = "scenario: e\ncommand: embed\n  check: pairing\n  distribution: delta(0)\n  test: gauss\n  expect: error\ncommand: compare\n  x: 1\n  y: 1\n";
    let p = temp_scenario("err.scn", text);
    let o = agcal(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let recs = lines(&o);
    assert_eq!(recs.len(), 3);
    assert_eq!(recs[1]["status"], "error");
    assert!(recs[1]["error"].as_str().unwrap().contains("compactly supported"));
    assert_eq!(recs[2]["status"], "Holds");
}

#[test]
fn grid_override_reaches_records_and_hash() {
    let p = temp_scenario("grid.scn", "scenario: g\ncommand: moderate\n  net: eps^-1 * log(1/eps)\n  gauge: powers(eps^-1)\n");
    let a = lines(&agcal(&["run", p.to_str().unwrap()]));
    let b = lines(&agcal(&["run", p.to_str().unwrap(), "--grid", "0.05,0.5,30"]));
    assert_ne!(a[0]["config_hash"], b[0]["config_hash"]);
    assert_eq!(b[1]["grid"]["eps0"], 0.05);
    assert_eq!(b[1]["grid"]["count"], 30);
    assert_eq!(a[1]["grid"]["count"], 40);
    let o = agcal(&["run", p.to_str().unwrap(), "--grid", "0.05,2,30"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn table_format_is_fixed_width() {
    let p = temp_scenario("tbl.scn", "scenario: t\ncommand: compare\n  x: eps^-2\n  y: eps^-3\n  expect: XbigOofY\n");
    let o = agcal(&["run", p.to_str().unwrap(), "--format", "table"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let header = text.lines().find(|l| l.starts_with("#    id")).unwrap();
    let row = text.lines().find(|l| l.starts_with("1 ")).unwrap();
    assert_eq!(header.len(), row.len());
    assert!(text.contains("1/1 commands matched"));
}

#[test]
fn parse_compare_and_version_subcommands() {
    let o = agcal(&["parse", "eps^-2*log(1/eps)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("canonical: "));
    let o = agcal(&["parse", "eps^"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains('^'));
    let o = agcal(&["compare", "exp(1/eps)", "eps^-100"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "YbigOofX");
    let o = agcal(&["version"]);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("agcal "));
}

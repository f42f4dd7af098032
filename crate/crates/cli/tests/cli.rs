use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn comixer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_comixer"))
        .args(args)
        .env_remove("METRIC_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_examples() {
    let o = comixer(&["eval", "--op", "incenter", "--p", "2", "0,0;3,0;0,4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1,1\n");

    let o = comixer(&["eval", "--op", "nagel", "--p", "2", "0,0;3,0;0,4"]);
    assert_eq!(stdout(&o), "1,2\n");

    let o = comixer(&["eval", "--op", "setcomix", "0-0.5;0.25-0.75;0.5-1"]);
    assert_eq!(stdout(&o), "0-0.25,0.75-1\n");

    // each triple is evaluated on its own
    let o = comixer(&["eval", "--op", "median", "--p", "inf", "0,5;1,-2;2,3", "-1;4;2"]);
    assert_eq!(stdout(&o), "1,3\n2\n");

    let o = comixer(&["eval", "--op", "group1d", "-1;4;2"]);
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn eval_input_errors_exit_2() {
    for args in [
        &["eval", "--op", "incenter", "0,0;3,0"][..],
        &["eval", "--op", "incenter", "0,0;3,0;0"],
        &["eval", "--op", "incenter", "0,0;x,0;0,4"],
        &["eval", "--op", "group1d", "0,0;3,0;0,4"],
        &["eval", "--op", "incenter", "--p", "0.5", "0,0;3,0;0,4"],
        &["eval", "--op", "setmix", "0-2;0-1;0-1"],
        &["eval", "--op", "bogus", "0;1;2"],
    ] {
        assert_eq!(comixer(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn measure_algebra_and_retract() {
    assert_eq!(stdout(&comixer(&["measure-algebra", "comix", "0-0.5", "0.25-0.75", "0.5-1"])), "0-0.25,0.75-1\n");
    assert_eq!(stdout(&comixer(&["measure-algebra", "complement", "empty"])), "0-1\n");
    assert_eq!(stdout(&comixer(&["measure-algebra", "measure", "empty"])), "0\n");
    assert_eq!(stdout(&comixer(&["measure-algebra", "quotient-dist", "0-0.3", "0.3-1"])), "0\n");
    assert_eq!(stdout(&comixer(&["measure-algebra", "rho", "0-0.5", "0.25-0.75"])), "0.5\n");

    // collinear triple: incenter and Nagel point of (0, 1, 5) on the line
    let o = comixer(&["retract", "--p", "2", "--set", "0|1|5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 | 4\n");

    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.txt");
    fs::write(&pairs, "0|1 ; 0|1.5\n# comment\n0,0|1,0|0,1 ; 0,0|1,0|0,1\n").unwrap();
    let o = comixer(&["retract", "--input", pairs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][3], "1.0");
    assert_eq!(&rows[1][1], "0.0");
    assert_eq!(&rows[1][3], "");
}

#[test]
fn gap_probe_table() {
    let o = comixer(&["gap-probe", "--x-max", "100", "--step", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 199);
    assert_eq!(text.lines().nth(1).unwrap(), "1.0,-1.0,-1.0,2.0");
    assert_eq!(comixer(&["gap-probe", "--step", "0"]).status.code(), Some(2));
}

#[test]
fn lipschitz_report_fields() {
    let o = comixer(&["lipschitz", "--op", "nagel", "--arg", "2", "--p", "1", "--dim", "3", "--samples", "2000", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["op", "arg_index", "norm", "dim", "seed", "samples", "estimate", "claimed_bound", "pass", "witness"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["norm"], "p1");
    assert_eq!(v["pass"], true);

    let o = comixer(&["lipschitz", "--op", "setcomix", "--samples", "500", "--bound", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(comixer(&["lipschitz", "--op", "nagel", "--arg", "4"]).status.code(), Some(2));
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn certify_wrong_bound_exits_1_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "cfg.json",
        r#"{"dims": [2], "norms": ["p2"], "ops": ["nagel"], "samples": 300, "bound_overrides": {"nagel": 0.5}}"#,
    );
    let out = dir.path().join("report.json");
    let o = comixer(&["certify", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["all_pass"], false);
    let failing: Vec<&Value> = v["lipschitz"].as_array().unwrap().iter().filter(|r| r["pass"] == false).collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|r| r["witness"].is_object()));
}

#[test]
fn certify_input_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(&dir, "empty.json", r#"{"ops": []}"#);
    assert_eq!(comixer(&["certify", "--config", &empty]).status.code(), Some(2));
    let bad = write_config(&dir, "bad.json", "{not json");
    assert_eq!(comixer(&["certify", "--config", &bad]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(comixer(&["certify", "--config", missing.to_str().unwrap()]).status.code(), Some(3));

    let small = write_config(&dir, "small.json", r#"{"dims": [1], "norms": ["p2"], "ops": ["median"], "samples": 50}"#);
    let unwritable = dir.path().join("no/such/dir/report.json");
    let o = comixer(&["certify", "--config", &small, "--output", unwritable.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn certify_is_deterministic_apart_from_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "cfg.json",
        r#"{"dims": [1, 2], "ops": ["incenter", "median", "retraction", "setcomix", "quotcomix"], "samples": 300, "seed": 42}"#,
    );
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let o = comixer(&["certify", "--config", &cfg, "--output", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let mut v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert!(v.as_object_mut().unwrap().remove("generated_at").is_some());
        reports.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(reports[0], reports[1]);

    let out = dir.path().join("c.json");
    let o = Command::new(env!("CARGO_BIN_EXE_comixer"))
        .args(["certify", "--config", &cfg, "--output", out.to_str().unwrap()])
        .env("METRIC_LAB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn certify_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "cfg.json", r#"{"dims": [1], "norms": ["pinf"], "ops": ["median"], "samples": 100, "format": "csv"}"#);
    let o = comixer(&["certify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("kind,name,op,arg_index,norm,dim,samples,value,bound,pass\n"));
    // three per-argument rows, one joint row, one absorption check
    assert_eq!(text.lines().count(), 1 + 5);
}

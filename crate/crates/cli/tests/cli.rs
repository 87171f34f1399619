use std::process::{Command, Output};

use wkron::kronstate::{from_table, khat, normalized, KronTable};

fn wkron(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wkron")).args(args).env_remove("WKRON_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn prob_rows_for_two_copies() {
    let o = wkron(&["--parties", "3", "--copies", "2", "prob", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    let p = |l: &str| rows.iter().find(|r| &r[0] == l).unwrap()[1].to_string();
    assert_eq!(p("2,0;2,0;2,0"), "2/3");
    assert_eq!(p("2,0;1,1;1,1"), "1/9");
    assert_eq!(p("1,1;1,1;1,1"), "0");
    assert_eq!(&rows.last().unwrap()[3], "1");
}

#[test]
fn kron_json_round_trips() {
    let o = wkron(&["--parties", "3", "--lambda", "2,1;2,1;2,1", "kron"]);
    assert_eq!(o.status.code(), Some(0));
    let table: KronTable = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(table.entries.len(), 4);
    assert_eq!(table.kron_coeff, 1);
    assert!(table.entries.iter().all(|e| e.value.square() == wkron::exact::rat(1, 4)));
    let k = khat(&"2,1;2,1;2,1".parse().unwrap());
    assert_eq!(from_table(&table).unwrap(), normalized(&k).unwrap());
}

#[test]
fn kron_csv_has_one_row_per_entry() {
    let o = wkron(&["--parties", "3", "--lambda", "3,1;3,1;3,1;3,1", "--format", "csv", "kron"]);
    assert_eq!(o.status.code(), Some(2), "tuple has four parties but --parties says three");
    let o = wkron(&["--parties", "4", "--lambda", "3,1;3,1;3,1;3,1", "--format", "csv", "kron"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("q1,q2,q3,q4,sign,num,den,value"));
    assert_eq!(text.lines().count(), 1 + 29);
}

#[test]
fn exit_codes() {
    assert_eq!(wkron(&["--parties", "3", "--lambda", "1,1;1,1;1,1", "kron"]).status.code(), Some(2));
    assert_eq!(wkron(&["--parties", "3", "--bogus"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.json");
    let o = wkron(&["--parties", "3", "--copies", "2", "--out", missing.to_str().unwrap(), "prob"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(wkron(&["--parties", "3", "--copies", "3", "verify"]).status.code(), Some(0));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tables.json");
    let o = wkron(&["tables", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, stdout(&wkron(&["tables"])));
    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    let tables = v.as_array().unwrap();
    assert_eq!(tables.len(), 7);
    assert!(tables.iter().all(|t| t["comparison"]["multiset_match"] == true));
}

#[test]
fn sampling_is_reproducible() {
    let args = ["--parties", "3", "--copies", "6", "--runs", "50", "--seed", "42", "sample"];
    let a = stdout(&wkron(&args));
    assert_eq!(a, stdout(&wkron(&args)));
    let mut other = args;
    other[7] = "43";
    assert_ne!(a, stdout(&wkron(&other)));
}

#[test]
fn worker_count_does_not_change_results() {
    let args = ["--parties", "3", "--copies", "4", "--state", "ghz:1/3", "prob", "--format", "csv"];
    let serial = Command::new(env!("CARGO_BIN_EXE_wkron")).args(args).env("WKRON_WORKERS", "1").output().unwrap();
    let parallel = Command::new(env!("CARGO_BIN_EXE_wkron")).args(args).env("WKRON_WORKERS", "4").output().unwrap();
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(serial.stdout, parallel.stdout);
}

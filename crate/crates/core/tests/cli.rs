use std::path::Path;
use std::process::{Command, Output};

fn pivotal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pivotal"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn full_population_is_selected() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.csv", "x,y\n0,0\n1,0\n0,1\n1,1\n");
    let o = pivotal(&["sample", &f, "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n1\n2\n3\n");
}

#[test]
fn probability_column_fixes_the_size() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.csv", "x,prob\n0,0.5\n1,0.5\n2,0.5\n3,0.5\n");
    for seed in 0..20 {
        let o = pivotal(&["--seed", &seed.to_string(), "sample", &f]);
        assert_eq!(stdout(&o).lines().count(), 2);
    }
}

#[test]
fn generated_balance_is_the_default() {
    let o = pivotal(&["balance", "--n", "10", "--N", "200", "--replicates", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["summary"]["replicates"], 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_prob = write(dir.path(), "a.csv", "x,prob\n0,1.5\n1,0.5\n");
    let no_prob = write(dir.path(), "b.csv", "x\n0\n1\n");
    let ragged = write(dir.path(), "c.csv", "x,prob\n0\n1,0.5\n");
    let text = write(dir.path(), "d.csv", "x,prob\nabc,0.5\n1,0.5\n");
    assert_eq!(pivotal(&["sample", &bad_prob]).status.code(), Some(3));
    assert_eq!(pivotal(&["sample", &no_prob]).status.code(), Some(2));
    assert_eq!(pivotal(&["sample", &ragged]).status.code(), Some(2));
    assert_eq!(pivotal(&["sample", &text]).status.code(), Some(2));
    assert_eq!(
        pivotal(&["sample", "/nonexistent/file.csv", "--n", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pivotal(&["demo", "--experiment", "weather"]).status.code(),
        Some(2)
    );
    assert_eq!(pivotal(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pivotal(&["--help"]).status.code(), Some(0));
}

#[test]
fn estimate_needs_coordinates_for_local_variance() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.csv", "y,prob\n1,0.5\n2,0.5\n3,0.5\n");
    let o = pivotal(&["estimate", &f, "--nprime", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("coordinate"));
    // n' = n needs no neighbours
    let o = pivotal(&["estimate", &f, "--nprime", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["point"], 2.0);
    // s^2 / n = 1 / 3
    assert!((v["variance"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let zero = write(dir.path(), "z.csv", "y,prob\n1,0\n2,0.5\n");
    assert_eq!(pivotal(&["estimate", &zero]).status.code(), Some(3));
}

#[test]
fn discretize_sample_estimate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.csv");
    let o = pivotal(&[
        "--seed",
        "7",
        "--output",
        pop.to_str().unwrap(),
        "discretize",
        "--dist",
        "uniform",
        "--q",
        "2",
        "--N",
        "2000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = pivotal(&[
        "--seed",
        "7",
        "sample",
        pop.to_str().unwrap(),
        "--n",
        "100",
        "--with-rows",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = stdout(&o);
    let mut lines = rows.lines();
    assert_eq!(lines.next(), Some("index,x0,x1,weight"));
    // append y = x0 and pi = n / N
    let mut body = String::from("index,x0,x1,y,prob\n");
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        body.push_str(&format!("{},{},{},{},0.05\n", f[0], f[1], f[2], f[1]));
    }
    let s = write(dir.path(), "s.csv", &body);
    let o = pivotal(&["estimate", &s, "--nprime", "4", "--N", "2000"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["point"].as_f64().unwrap() - 0.5).abs() < 0.05);
    assert_eq!(v["n"], 100);
    assert!(v["variance"].as_f64().unwrap() < 1.0 / 12.0 / 100.0);
}

#[test]
fn balance_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.csv", "index,x\n0,0.25\n1,0.75\n");
    let r: String = std::iter::once("x\n".to_string())
        .chain((0..1000).map(|i| format!("{}\n", (i as f64 + 0.5) / 1000.0)))
        .collect();
    let r = write(dir.path(), "r.csv", &r);
    let o = pivotal(&["balance", "--sample", &s, "--reference", &r]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["balance"], 0.0);
    let one = write(dir.path(), "one.csv", "x\n0.3\n");
    let o = pivotal(&["balance", "--sample", &one, "--reference", &r]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["balance"], 0.0);
    let r2 = write(dir.path(), "r2.csv", "x,y\n0,0\n");
    assert_eq!(
        pivotal(&["balance", "--sample", &s, "--reference", &r2])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn demo_csv_and_impossible_forest() {
    let o = pivotal(&[
        "--format",
        "csv",
        "demo",
        "--experiment",
        "rainforest",
        "--xcrit",
        "0.9",
        "--m",
        "10",
        "--N",
        "500",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("method,n,N,m,mean,sd,x_crit"));
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f[4], "0.0", "{l}");
    }
}

#[test]
fn seeds_change_output() {
    let a = pivotal(&[
        "--seed",
        "1",
        "demo",
        "--experiment",
        "integral",
        "--m",
        "20",
        "--N",
        "500",
    ]);
    let b = pivotal(&[
        "--seed",
        "2",
        "demo",
        "--experiment",
        "integral",
        "--m",
        "20",
        "--N",
        "500",
    ]);
    assert_ne!(a.stdout, b.stdout);
}

//! End-to-end tests driving the built binary: output formats, exit codes,
//! exact-value round-trips, and determinism across reruns.

use std::path::Path;
use std::process::{Command, Output};
use std::str::FromStr;

use coded_caching::{exact, Exact};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coded-caching"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf8 stderr")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).expect("csv opens");
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.expect("csv record").iter().map(str::to_string).collect());
    }
    rows
}

#[test]
fn tradeoff_csv_has_exact_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t33.csv");
    let o = run(&["tradeoff", "--n", "3", "--k", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));

    let rows = read_csv(&out);
    assert_eq!(rows.len(), 7);
    let at_one = rows.iter().find(|r| r[0] == "1").expect("row M=1");
    assert_eq!(&at_one[..5], ["1", "1", "2/3", "1", "1"]);
    let at_full = rows.iter().find(|r| r[0] == "3").expect("row M=3");
    assert_eq!(&at_full[..5], ["3", "0", "0", "0", "0"]);

    // every exact cell parses back to the value the library computes
    for row in &rows {
        let m = Exact::from_str(&row[0]).unwrap();
        let man = Exact::from_str(&row[1]).unwrap();
        let cut = Exact::from_str(&row[2]).unwrap();
        let lower = Exact::from_str(&row[3]).unwrap();
        let lp = Exact::from_str(&row[4]).unwrap();
        assert_eq!(man, coded_caching::schemes::man_load(3, 3, &m));
        assert_eq!(cut, coded_caching::schemes::cut_set_bound(3, 3, &m));
        assert_eq!(lower, coded_caching::converse::lower_bound(3, 3, &m).unwrap());
        assert_eq!(lp, coded_caching::converse::lp_oracle(3, 3, &m).unwrap());
    }
}

#[test]
fn tradeoff_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t43.json");
    let o = run(&[
        "tradeoff", "--n", "4", "--k", "3", "--grid", "3", "--out",
        out.to_str().unwrap(), "--format", "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["n"], 4);
    assert_eq!(v["grid"], 3);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    for row in rows {
        let m = Exact::from_str(row["memory"].as_str().unwrap()).unwrap();
        let man = Exact::from_str(row["man_load"].as_str().unwrap()).unwrap();
        assert_eq!(man, coded_caching::schemes::man_load(4, 3, &m));
        let lp = Exact::from_str(row["lp_oracle"].as_str().unwrap()).unwrap();
        assert_eq!(lp, man);
    }
}

#[test]
fn tradeoff_without_converse_leaves_columns_empty() {
    let dir = tempfile::tempdir().unwrap();
    let csv_out = dir.path().join("t23.csv");
    let o = run(&["tradeoff", "--n", "2", "--k", "3", "--out", csv_out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = read_csv(&csv_out);
    assert!(rows.iter().all(|r| r[3].is_empty() && r[4].is_empty()));
    assert!(rows.iter().all(|r| !r[1].is_empty() && !r[2].is_empty()));

    let json_out = dir.path().join("t23.json");
    run(&[
        "tradeoff", "--n", "2", "--k", "3", "--out", json_out.to_str().unwrap(),
        "--format", "json",
    ]);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert!(v["rows"][0]["lower_bound"].is_null());
    assert!(v["rows"][0]["lp_oracle"].is_null());
}

#[test]
fn tradeoff_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let oa = run(&["tradeoff", "--n", "5", "--k", "4", "--out", a.to_str().unwrap()]);
    let ob = run(&["tradeoff", "--n", "5", "--k", "4", "--out", b.to_str().unwrap()]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(stdout(&oa).replace("a.csv", ""), stdout(&ob).replace("b.csv", ""));
}

#[test]
fn verify_passes_and_reports_json() {
    let o = run(&["verify", "--n", "3", "--k", "3"]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["permutation_sets"]["status"], "checked");
    assert_eq!(v["permutation_sets"]["pairs"], 36);
    assert_eq!(v["aggregate"]["closed_form"][1], "1/3");
    assert_eq!(v["aggregate"]["matches"], true);
    let grid = v["grid"].as_array().unwrap();
    assert!(grid.iter().all(|g| g["pass"] == true));
}

#[test]
fn verify_refuses_more_users_than_files() {
    let o = run(&["verify", "--n", "2", "--k", "3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("N < K unsupported for converse"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn simulate_man_reports_exact_load() {
    let o = run(&[
        "simulate", "--scheme", "man", "--n", "3", "--k", "3", "--t", "1",
        "--demands", "1,2,3",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("transmissions 3 load 1 (1.000000) decode ok"));
    assert!(text.contains("decoded 1 of 1 runs"));

    // full caches need no transmissions at all
    let o = run(&[
        "simulate", "--scheme", "man", "--n", "3", "--k", "3", "--t", "3",
        "--demands", "2,3,1",
    ]);
    assert!(stdout(&o).contains("transmissions 0 load 0 (0.000000) decode ok"));
}

#[test]
fn simulate_json_and_duplicate_demands() {
    let o = run(&[
        "simulate", "--scheme", "coded-small", "--n", "2", "--k", "3",
        "--demands", "1,1,2", "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scheme"], "coded-small");
    assert_eq!(v["memory"], "1/3");
    assert_eq!(v["runs"][0]["load"], "5/3");
    assert_eq!(v["all_ok"], true);
    assert!(v["t"].is_null());

    // the single-file chain meets the N(1 - M) target exactly
    let o = run(&[
        "simulate", "--scheme", "coded-small", "--n", "1", "--k", "2",
        "--demands", "1,1", "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["runs"][0]["load"], "1/2");
}

#[test]
fn simulate_all_demands_sweep() {
    let o = run(&[
        "simulate", "--scheme", "man", "--n", "2", "--k", "2", "--t", "1",
        "--all-demands",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("decoded 4 of 4 runs"));
    assert_eq!(text.matches("decode ok").count(), 4);
}

#[test]
fn simulate_seed_is_deterministic() {
    let args = ["simulate", "--scheme", "man", "--n", "4", "--k", "4", "--t", "2",
        "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));

    let c = run(&["simulate", "--scheme", "man", "--n", "4", "--k", "4", "--t", "2",
        "--seed", "12"]);
    assert_eq!(code(&c), 0);
}

#[test]
fn simulate_usage_errors_exit_two() {
    let o = run(&["simulate", "--scheme", "man", "--n", "3", "--k", "3",
        "--demands", "1,2,3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--t is required"));

    let o = run(&["simulate", "--scheme", "coded-small", "--n", "3", "--k", "3",
        "--t", "1", "--demands", "1,2,3"]);
    assert_eq!(code(&o), 2);

    let o = run(&["simulate", "--scheme", "man", "--n", "3", "--k", "3", "--t", "1",
        "--demands", "1,2,9"]);
    assert_eq!(code(&o), 2);

    // coded-small needs K >= N
    let o = run(&["simulate", "--scheme", "coded-small", "--n", "4", "--k", "2",
        "--demands", "1,2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn graph_export_format_and_sets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    let o = run(&["graph", "--n", "3", "--k", "3", "--demands", "1,2,3",
        "--out", out.to_str().unwrap(), "--sets"]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("graph N=3 K=3 d=(1,2,3) split=uniform\nnodes 12\n"));
    assert!(text.contains("node 0 file=1 mask=0 set={} requester=1 length=1/8 empty\n"));
    assert!(text.contains("\nedges 48\n"));
    assert!(text.contains("sets 6\n"));
    // the worked example: levels 1, 3, 2 pick seven subfiles worth 7/8
    assert!(text.contains("u=(1,3,2) size=7 bound=7/8 nodes=0,1,2,3,8,10,4"));
}

#[test]
fn graph_edge_count_ignores_demand_relabeling() {
    let dir = tempfile::tempdir().unwrap();
    let mut counts = Vec::new();
    for (name, d) in [("a", "1,2,3"), ("b", "3,1,2")] {
        let out = dir.path().join(name);
        run(&["graph", "--n", "3", "--k", "3", "--demands", d,
            "--out", out.to_str().unwrap()]);
        let text = std::fs::read_to_string(&out).unwrap();
        let edges = text.lines().find(|l| l.starts_with("edges ")).unwrap().to_string();
        counts.push(edges);
    }
    assert_eq!(counts[0], counts[1]);
}

#[test]
fn graph_man_split_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    run(&["graph", "--n", "3", "--k", "3", "--demands", "1,2,3", "--t", "1",
        "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("graph N=3 K=3 d=(1,2,3) split=man-t1\n"));
    assert!(text.contains("node 1 file=1 mask=2 set={2} requester=1 length=1/3\n"));
    assert!(text.contains("node 0 file=1 mask=0 set={} requester=1 length=0 empty\n"));
}

#[test]
fn graph_usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    // duplicate demands have no index-coding counterpart
    let o = run(&["graph", "--n", "3", "--k", "3", "--demands", "1,1,2",
        "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    // wrong demand count
    let o = run(&["graph", "--n", "3", "--k", "3", "--demands", "1,2",
        "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_invocations_exit_two() {
    let o = run(&[]);
    assert_eq!(code(&o), 2);
    let o = run(&["tradeoff", "--n", "3"]);
    assert_eq!(code(&o), 2);
    let o = run(&["tradeoff", "--n", "0", "--k", "3", "--out", "/tmp/x.csv"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn library_exact_type_matches_cli_strings() {
    // "p/q" strings in every output are plain num-rational renderings
    assert_eq!(exact(2, 3).to_string(), "2/3");
    assert_eq!(exact(3, 1).to_string(), "3");
    assert_eq!(Exact::from_str("7/8").unwrap(), exact(7, 8));
}

use std::process::{Command, Output};

use serde_json::Value;

fn cubeset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubeset"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

#[test]
fn count_d4() {
    let out = cubeset(&["count", "--d", "4", "--method", "exact", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &json_lines(&out)[0];
    assert_eq!(rec["outputs"]["count"], "743");
    assert_eq!(rec["schema_version"], 1);
    assert_eq!(rec["subcommand"], "count");
    assert!(rec["elapsed_ms"].is_number());
}

#[test]
fn count_methods_and_csv() {
    for m in ["split", "pairs", "branch"] {
        let out = cubeset(&["count", "--d", "5", "--method", m, "--format", "csv"]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text, format!("d,method,count\n5,{m},254475\n"));
    }
}

#[test]
fn sum_d3() {
    let out = cubeset(&["sum", "--d", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &json_lines(&out)[0];
    assert_eq!(rec["outputs"]["sum"], "3/2^1");
    assert_eq!(rec["outputs"]["sandwich"]["upper"], "48/2^0");
    assert_eq!(rec["inputs"]["seed"], 0);
}

#[test]
fn verify_containers_d3() {
    let out = cubeset(&["verify", "--suite", "containers", "--d", "3", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &json_lines(&out)[0];
    assert_eq!(rec["outputs"]["passed"], true);
    assert_eq!(rec["outputs"]["coverage"], 1.0);
    assert_eq!(rec["outputs"]["seed"], 7);
}

#[test]
fn verify_suites_d4() {
    for suite in [
        "structure",
        "combinatorics",
        "iso",
        "containers",
        "census",
        "all",
    ] {
        let out = cubeset(&["verify", "--suite", suite, "--d", "4", "--no-timing"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{suite}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        cubeset(&["count", "--d", "3", "--frobnicate"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cubeset(&["launch"]).status.code(), Some(2));
    assert_eq!(
        cubeset(&["verify", "--suite", "everything", "--d", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cubeset(&["verify", "--d", "3"]).status.code(), Some(2));
    assert_eq!(cubeset(&["count"]).status.code(), Some(2));
    assert_eq!(cubeset(&["count", "--d", "6"]).status.code(), Some(2));
    assert_eq!(
        cubeset(&["sum", "--d", "3", "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
    let out = cubeset(&["containers", "--d", "3", "--a", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(cubeset(&["--help"]).status.code(), Some(0));
}

#[test]
fn budget_errors_exit_3() {
    let out = cubeset(&["sum", "--d", "5", "--budget", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let out = cubeset(&["containers", "--d", "4", "--budget", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "containers",
        "--d",
        "5",
        "--samples",
        "40",
        "--seed",
        "99",
        "--no-timing",
    ];
    let first = cubeset(&args);
    let second = cubeset(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let mut parallel = args.to_vec();
    parallel.extend(["--parallelism", "4"]);
    let third = cubeset(&parallel);
    let strip = |o: &Output| -> Vec<Value> {
        json_lines(o)
            .into_iter()
            .map(|mut v| {
                v["inputs"].as_object_mut().unwrap().remove("parallelism");
                v
            })
            .collect()
    };
    assert_eq!(strip(&first), strip(&third));
}

#[test]
fn containers_stream_for_a_class() {
    let out = cubeset(&[
        "containers",
        "--d",
        "3",
        "--a",
        "1",
        "--g",
        "3",
        "--v",
        "001",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 4);
    for rec in &lines[..3] {
        let o = &rec["outputs"];
        assert_eq!(o["kind"], "set");
        assert_eq!(o["reconstructed"], true);
        assert!(
            o["A"].is_array() && o["Fprime"].is_array() && o["F"].is_array() && o["S"].is_array()
        );
    }
    let summary = &lines[3]["outputs"];
    assert_eq!(summary["kind"], "summary");
    assert_eq!(summary["family_size"], 3);
    assert_eq!(summary["coverage"], 1.0);
}

#[test]
fn bounds_ratio_table_csv() {
    let out = cubeset(&["bounds", "--d", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "d,count,asymptote_log2,ratio");
    assert_eq!(rows.len(), 6);
    assert!(rows[4].starts_with("4,743,"));
    let ratio: f64 = rows[5].rsplit(',').next().unwrap().parse().unwrap();
    assert!((ratio - 1.1776).abs() < 1e-3);
}

#[test]
fn bounds_json_lower_bound() {
    let out = cubeset(&["bounds", "--d", "3", "--no-timing"]);
    let o = &json_lines(&out)[0]["outputs"];
    assert_eq!(o["lower_bound"]["negative"], true);
    assert_eq!(o["lower_bound"]["correction_dominates"], true);
    assert_eq!(o["ratio_table"][2]["count"], "35");
}

#[test]
fn iso_and_cover_and_text() {
    let out = cubeset(&["iso", "--d", "4", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["outputs"]["passed"], true);
    let out = cubeset(&["cover", "--d", "5", "--format", "text", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("within_bound: true"));
    assert!(text.contains("p_count: 16"));
}

#[test]
fn loaded_graphs() {
    let dir = tempfile::tempdir().unwrap();
    // K_{3,3}: every same-side pair shares all three neighbors.
    let k33 = dir.path().join("k33.txt");
    let mut text = String::from("# complete bipartite\nbipartite 3 3 3\n");
    for x in 0..3 {
        for y in 3..6 {
            text.push_str(&format!("{x} {y}\n"));
        }
    }
    std::fs::write(&k33, text).unwrap();
    let path = k33.to_str().unwrap();
    let out = cubeset(&["graph-check", "--graph", path, "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let o = &json_lines(&out)[0]["outputs"];
    assert_eq!(
        (
            o["degree"].as_u64(),
            o["co_degree"].as_u64(),
            o["edges"].as_u64()
        ),
        (Some(3), Some(3), Some(9))
    );
    let out = cubeset(&["cover", "--graph", path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["outputs"]["size"], 1);
    let out = cubeset(&["verify", "--suite", "structure", "--graph", path]);
    assert_eq!(out.status.code(), Some(0));

    let broken = dir.path().join("broken.txt");
    std::fs::write(&broken, "bipartite 2 2 2\n0 2\n0 3\n1 2\n").unwrap();
    let out = cubeset(&["graph-check", "--graph", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_lines(&out)[0]["outputs"]["valid"], false);
}

#[test]
fn writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("count.json");
    let out = cubeset(&[
        "count",
        "--d",
        "3",
        "--out",
        path.to_str().unwrap(),
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rec: Value = serde_json::from_str(std::fs::read_to_string(&path).unwrap().trim()).unwrap();
    assert_eq!(rec["outputs"]["count"], "35");
    assert!(rec.get("elapsed_ms").is_none());
}

#[test]
fn run_in_process() {
    assert_eq!(
        cubeset::cli::run(["cubeset", "graph-check", "--d", "3", "--out", "/dev/null"]),
        0
    );
    assert_eq!(cubeset::cli::run(["cubeset", "bogus"]), 2);
}

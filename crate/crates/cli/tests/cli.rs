use std::fs;
use std::process::{Command, Output};

use growthlab::io::{parse_histogram_csv, parse_parents_binary, parse_parents_csv};
use serde_json::Value;

fn growthlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_growthlab"))
        .args(args)
        .env_remove("GROWTHLAB_WORKERS")
        .output()
        .expect("spawn growthlab")
}

fn ok(args: &[&str]) -> String {
    let out = growthlab(args);
    assert!(
        out.status.success(),
        "growthlab {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_lines(s: &str) -> Vec<Value> {
    s.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn grow_emits_one_line_per_replica_plus_aggregate() {
    let out = ok(&["grow", "--family", "qpa", "--alpha", "1", "--n-target", "10000", "--replicas", "10", "--seed", "1"]);
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 11);
    for (k, l) in lines[..10].iter().enumerate() {
        assert_eq!(l["replica"], k);
        assert_eq!(l["n"], 10000);
        assert_eq!(l["model"], "qpa");
    }
    assert_eq!(lines[10]["aggregate"], true);
    assert_eq!(lines[10]["replicas"], 10);
}

#[test]
fn grow_is_byte_identical_across_runs_and_worker_counts() {
    let args = ["grow", "--family", "cr", "--alpha", "2", "--r", "0.5", "--n-target", "3000", "--replicas", "6", "--seed", "99"];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    let mut one = args.to_vec();
    one.extend(["--workers", "1"]);
    let mut three = args.to_vec();
    three.extend(["--workers", "3"]);
    assert_eq!(a, ok(&one));
    assert_eq!(a, ok(&three));
    let env = Command::new(env!("CARGO_BIN_EXE_growthlab"))
        .args(args)
        .env("GROWTHLAB_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(a.as_bytes(), env.stdout.as_slice());
}

#[test]
fn different_seeds_differ() {
    let base = ["grow", "--family", "qpa", "--alpha", "0", "--n-target", "2000", "--replicas", "2"];
    let mut a = base.to_vec();
    a.extend(["--seed", "1"]);
    let mut b = base.to_vec();
    b.extend(["--seed", "2"]);
    assert_ne!(ok(&a), ok(&b));
}

#[test]
fn rich_get_richer_limit_grows_a_star() {
    let out = ok(&["grow", "--family", "cr", "--alpha", "inf", "--r", "0", "--n-target", "100", "--replicas", "5"]);
    for l in &json_lines(&out)[..5] {
        assert_eq!(l["d1"], 99);
        assert_eq!(l["diameter"], 2);
        assert_eq!(l["alpha"], "inf");
    }
}

#[test]
fn negative_infinity_token_is_accepted() {
    let out = ok(&["grow", "--family", "cr", "--alpha", "-inf", "--r", "0", "--n-target", "100", "--replicas", "1"]);
    let lines = json_lines(&out);
    assert_eq!(lines[0]["diameter"], 99);
    assert_eq!(lines[0]["alpha"], "-inf");
}

#[test]
fn flags_override_config_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"family":"qpa","alpha":"-inf","n_target":500,"replicas":3,"seed":4}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = json_lines(&ok(&["grow", "--config", cfg]));
    assert_eq!(from_file.len(), 4);
    assert_eq!(from_file[0]["n"], 500);
    let overridden = json_lines(&ok(&["grow", "--config", cfg, "--replicas", "1", "--n-target", "300"]));
    assert_eq!(overridden.len(), 2);
    assert_eq!(overridden[0]["n"], 300);
    assert_eq!(overridden[0]["alpha"], "-inf");
}

#[test]
fn invalid_configs_exit_nonzero() {
    let bad: [&[&str]; 4] = [
        &["grow", "--family", "cr", "--alpha", "1", "--r", "1.5", "--n-target", "10"],
        &["grow", "--family", "qpa", "--alpha", "1", "--n-target", "1"],
        &["grow", "--family", "qpa", "--alpha", "1", "--n-target", "100", "--replicas", "0"],
        &["grow", "--family", "qpa", "--alpha", "1", "--n-target", "100", "--snapshots", "50,20"],
    ];
    for args in bad {
        let out = growthlab(args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn grow_writes_parent_arrays_and_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let edges = format!("{d}/edges_{{replica}}.csv");
    let bin = format!("{d}/edges_{{replica}}.bin");
    let hist = format!("{d}/hist_{{replica}}.csv");
    let summary = format!("{d}/summary.jsonl");
    let base = ["grow", "--family", "cr", "--alpha", "1.5", "--r", "0.5", "--n-target", "400", "--replicas", "2", "--seed", "8"];
    let mut a = base.to_vec();
    a.extend(["--edges-out", &edges, "--histogram-out", &hist, "--summary-out", &summary]);
    assert_eq!(ok(&a), "");
    let mut b = base.to_vec();
    b.extend(["--edges-out", &bin, "--edges-format", "binary"]);
    ok(&b);

    let lines = json_lines(&fs::read_to_string(&summary).unwrap());
    for k in 0..2 {
        let csv = parse_parents_csv(&fs::read_to_string(format!("{d}/edges_{k}.csv")).unwrap()).unwrap();
        let binary = parse_parents_binary(&fs::read(format!("{d}/edges_{k}.bin")).unwrap()).unwrap();
        assert_eq!(csv, binary);
        assert_eq!(csv.len(), 400);
        let h = parse_histogram_csv(&fs::read_to_string(format!("{d}/hist_{k}.csv")).unwrap()).unwrap();
        assert_eq!(h.n(), 400);
        assert_eq!(u64::from(h.max_degree()), lines[k]["d1"].as_u64().unwrap());
    }
}

#[test]
fn several_replicas_need_a_replica_placeholder() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.csv");
    let out = growthlab(&[
        "grow", "--family", "qpa", "--alpha", "1", "--n-target", "50", "--replicas", "2",
        "--edges-out", edges.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
}

#[test]
fn single_point_sweep_matches_grow_aggregate() {
    let grow = json_lines(&ok(&[
        "grow", "--family", "cr", "--alpha", "0", "--r", "0.5", "--n-target", "2000", "--replicas", "4", "--seed", "11",
        "--snapshots", "1000,2000",
    ]));
    let csv = ok(&[
        "sweep", "--point", "cr:0:0.5", "--n-target", "2000", "--replicas", "4", "--seed", "11", "--snapshots", "1000,2000",
    ]);
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("family,alpha,r,n,metric,mean,stddev"));
    let aggs: Vec<&Value> = grow.iter().filter(|l| l["aggregate"] == true).collect();
    assert_eq!(aggs.len(), 2);
    let mut compared = 0;
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(&f[..3], ["cr", "0", "0.5"]);
        if f[4] == "d1_exponent" {
            continue;
        }
        let agg = aggs.iter().find(|a| a["n"].to_string() == f[3]).unwrap();
        let m = &agg["metrics"][f[4]];
        let mean: f64 = f[5].parse().unwrap();
        let sd: f64 = f[6].parse().unwrap();
        assert!((m["mean"].as_f64().unwrap() - mean).abs() <= 1e-8 * mean.abs().max(1.0), "{row}");
        assert!((m["stddev"].as_f64().unwrap() - sd).abs() <= 1e-8 * sd.abs().max(1.0), "{row}");
        compared += 1;
    }
    assert!(compared >= 10);
}

#[test]
fn sweep_with_one_replica_has_zero_stddev() {
    let csv = ok(&["sweep", "--point", "qpa:2", "--point", "cr:inf:1", "--n-target", "1000", "--replicas", "1"]);
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().any(|r| r[0] == "qpa") && rows.iter().any(|r| r[0] == "cr"));
    for r in rows.iter().filter(|r| r[4] != "d1_exponent") {
        assert_eq!(r[6].parse::<f64>().unwrap(), 0.0, "{r:?}");
    }
}

#[test]
fn sweep_config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    let out = dir.path().join("sweep.csv");
    fs::write(
        &cfg,
        r#"{"points":[{"family":"qpa","alpha":"-inf"},{"family":"cr","alpha":2,"r":1}],"n_target":1000,"replicas":2,"seed":5}"#,
    )
    .unwrap();
    assert_eq!(ok(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), "");
    let csv = fs::read_to_string(out).unwrap();
    let sizes: std::collections::BTreeSet<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(sizes.into_iter().collect::<Vec<_>>(), ["100", "1000", "316"]);
    assert_eq!(csv.lines().filter(|l| l.contains("d1_exponent")).count(), 2);
}

#[test]
fn mastereq_defaults() {
    let out = growthlab(&["mastereq"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("x,p_x"));
    assert_eq!(rows.next(), Some("1,0.500000000"));
    assert_eq!(rows.count(), 399);
    let err = String::from_utf8(out.stderr).unwrap();
    let mass: f64 = err.trim().strip_prefix("truncation_mass,").unwrap().parse().unwrap();
    assert!(mass < 1e-6, "{mass}");
}

#[test]
fn mastereq_tiny_bounds_and_grid_output() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let out = growthlab(&["mastereq", "--kmax", "2", "--lmax", "1", "--grid-out", grid.to_str().unwrap()]);
    assert!(out.status.success());
    // q01 + q11 + q21 = 1/2 + 1/6 + 1/30
    let err = String::from_utf8(out.stderr).unwrap();
    let mass: f64 = err.trim().strip_prefix("truncation_mass,").unwrap().parse().unwrap();
    assert!((mass - 0.3).abs() < 1e-9);
    let g = fs::read_to_string(grid).unwrap();
    assert_eq!(g.lines().collect::<Vec<_>>(), ["k,l,q", "0,1,0.500000000", "1,1,0.166666667", "2,1,0.0333333333"]);
}

#[test]
fn predictions_table() {
    let csv = ok(&["predictions", "--alphas=-inf,0,1,2,inf", "--rs", "0,0.5,1"]);
    assert!(csv.starts_with("family,alpha,r,quantity,value,source\n"));
    assert!(csv.contains("cr,0,0.5,leaf_fraction,0.585786438,"));
    assert!(csv.contains("cr,inf,0.5,leaf_fraction,0.750000000,"));
    assert!(csv.contains("cr,2,1,dmax_exponent,0.666666667,"));
    assert!(csv.contains("cr,2,1,second_layer_exponent,0.333333333,"));
    assert!(csv.contains("qpa,1,0,leaf_fraction_upper_bound,0.631578947,"));
}

#[test]
fn validate_passes_on_a_fresh_build() {
    let out = growthlab(&["validate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 6);
}

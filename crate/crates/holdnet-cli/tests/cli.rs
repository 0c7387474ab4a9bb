//! End-to-end subcommand tests against the built binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn holdnet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holdnet"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

const HOLDINGS: &str = "\
fund_class_id,report_date,asset_id,market_value
C1a,2006-05-15,A1,600
C1a,2006-05-15,A2,400
C1b,2006-05-15,A1,200
C2,2006-06-20,A2,1000
C2,2006-04-01,A9,555
C3,2006-06-01,A3,300
";

const CLASS_MAP: &str = "\
fund_class_id,fund_id
C1a,F1
C1b,F1
";

fn write(dir: &Path, name: &str, content: &str) {
    fs::write(dir.join(name), content).unwrap();
}

fn ingest_sample(dir: &Path) {
    write(dir, "holdings.csv", HOLDINGS);
    write(dir, "classes.csv", CLASS_MAP);
    let out = holdnet(
        &[
            "ingest",
            "--holdings",
            "holdings.csv",
            "--class-map",
            "classes.csv",
            "--quarter",
            "2006Q2",
            "--out-dir",
            "snap",
        ],
        dir,
    );
    assert_exit(&out, 0);
}

#[test]
fn ingest_writes_hand_checked_stats() {
    let tmp = TempDir::new().unwrap();
    ingest_sample(tmp.path());
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("snap/snapshot.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["quarter"], "2006Q2");
    assert_eq!(sidecar["n_funds"], 3);
    assert_eq!(sidecar["n_assets"], 3);
    assert_eq!(sidecar["e"], 4);
    assert_eq!(sidecar["s_tot"], 2500.0);
    // Duplicate class rows consolidated: F1 holds A1 at 600 + 200.
    let edges = fs::read_to_string(tmp.path().join("snap/snapshot.csv")).unwrap();
    assert!(edges.contains("F1,A1,800"), "edges: {edges}");
    assert!(tmp.path().join("snap/manifest.json").exists());
}

#[test]
fn ingest_empty_quarter_exits_2() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "holdings.csv", HOLDINGS);
    let out = holdnet(
        &[
            "ingest",
            "--holdings",
            "holdings.csv",
            "--quarter",
            "2007Q3",
            "--out-dir",
            "snap",
        ],
        tmp.path(),
    );
    assert_exit(&out, 2);
}

#[test]
fn metrics_three_fund_toy_matches_hand_mean() {
    let tmp = TempDir::new().unwrap();
    write(
        tmp.path(),
        "snap.csv",
        "fund_id,asset_id,market_value\nF1,A1,10\nF2,A1,20\nF3,A2,30\n",
    );
    let out = holdnet(
        &[
            "metrics",
            "--snapshot",
            "snap.csv",
            "--quarter",
            "2006Q2",
            "--out-dir",
            "met",
        ],
        tmp.path(),
    );
    assert_exit(&out, 0);
    let means: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("met/means.json")).unwrap())
            .unwrap();
    let jbar = means["jbar"].as_f64().unwrap();
    assert!((jbar - 1.0 / 3.0).abs() < 1e-12, "jbar {jbar}");
    assert!(tmp.path().join("met/fund_degree_ccdf.csv").exists());
    assert!(tmp.path().join("met/herfindahl_ccdf.csv").exists());
    // The O(N^2) table only appears with --pairs.
    assert!(!tmp.path().join("met/pairwise.csv").exists());
}

#[test]
fn metrics_single_fund_refused() {
    let tmp = TempDir::new().unwrap();
    write(
        tmp.path(),
        "snap.csv",
        "fund_id,asset_id,market_value\nF1,A1,10\n",
    );
    let out = holdnet(
        &[
            "metrics",
            "--snapshot",
            "snap.csv",
            "--quarter",
            "2006Q2",
            "--out-dir",
            "met",
        ],
        tmp.path(),
    );
    assert_exit(&out, 2);
}

#[test]
fn metrics_identical_funds_sbar_one() {
    let tmp = TempDir::new().unwrap();
    write(
        tmp.path(),
        "snap.csv",
        "fund_id,asset_id,market_value\nF1,A1,60\nF1,A2,40\nF2,A1,30\nF2,A2,20\n",
    );
    let out = holdnet(
        &[
            "metrics",
            "--snapshot",
            "snap.csv",
            "--quarter",
            "2006Q2",
            "--pairs",
            "--out-dir",
            "met",
        ],
        tmp.path(),
    );
    assert_exit(&out, 0);
    let means: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("met/means.json")).unwrap())
            .unwrap();
    let sbar = means["sbar"].as_f64().unwrap();
    assert!((sbar - 1.0).abs() < 1e-12, "sbar {sbar}");
    assert!(tmp.path().join("met/pairwise.csv").exists());
    assert!(tmp.path().join("met/similarity_ccdf.csv").exists());
}

#[test]
fn randomize_is_byte_reproducible_and_verifies() {
    let tmp = TempDir::new().unwrap();
    ingest_sample(tmp.path());
    for dir in ["r1", "r2"] {
        let out = holdnet(
            &[
                "randomize",
                "--snapshot",
                "snap/snapshot.csv",
                "--model",
                "rnd2:42",
                "--out-dir",
                dir,
            ],
            tmp.path(),
        );
        assert_exit(&out, 0);
    }
    let a = fs::read(tmp.path().join("r1/randomized.csv")).unwrap();
    let b = fs::read(tmp.path().join("r2/randomized.csv")).unwrap();
    assert_eq!(a, b, "same seed must produce byte-identical snapshots");

    let out = holdnet(
        &[
            "randomize",
            "--snapshot",
            "snap/snapshot.csv",
            "--model",
            "rnd1:7",
            "--out-dir",
            "r3",
        ],
        tmp.path(),
    );
    assert_exit(&out, 0);
    let out = holdnet(
        &[
            "verify",
            "--original",
            "snap/snapshot.csv",
            "--randomized",
            "r3/randomized.csv",
            "--model",
            "rnd1",
        ],
        tmp.path(),
    );
    assert_exit(&out, 0);
    let out = holdnet(
        &[
            "verify",
            "--original",
            "snap/snapshot.csv",
            "--randomized",
            "r1/randomized.csv",
            "--model",
            "rnd2",
        ],
        tmp.path(),
    );
    assert_exit(&out, 0);
}

#[test]
fn randomize_invalid_spec_exits_2() {
    let tmp = TempDir::new().unwrap();
    ingest_sample(tmp.path());
    let out = holdnet(
        &[
            "randomize",
            "--snapshot",
            "snap/snapshot.csv",
            "--model",
            "rnd9:1",
            "--out-dir",
            "r",
        ],
        tmp.path(),
    );
    assert_exit(&out, 2);
}

#[test]
fn shock_single_fund_toy_reproduces_worked_example() {
    let tmp = TempDir::new().unwrap();
    write(
        tmp.path(),
        "snap.csv",
        "fund_id,asset_id,market_value\nF,A,100\n",
    );
    let out = holdnet(
        &[
            "shock",
            "--snapshot",
            "snap.csv",
            "--quarter",
            "2006Q2",
            "--asset",
            "A",
            "--delta0",
            "0.5",
            "--steps",
            "2",
            "--out-dir",
            "shk",
        ],
        tmp.path(),
    );
    assert_exit(&out, 0);
    let table = fs::read_to_string(tmp.path().join("shk/trajectory.csv")).unwrap();
    assert_eq!(table, "t,damage\n1,0.75\n2,0.9375\n");
}

#[test]
fn shock_zero_delta_gives_zero_trajectory() {
    let tmp = TempDir::new().unwrap();
    write(
        tmp.path(),
        "snap.csv",
        "fund_id,asset_id,market_value\nF,A,100\nF,B,50\n",
    );
    let out = holdnet(
        &[
            "shock",
            "--snapshot",
            "snap.csv",
            "--quarter",
            "2006Q2",
            "--asset",
            "A",
            "--delta0",
            "0",
            "--steps",
            "3",
            "--out-dir",
            "shk",
        ],
        tmp.path(),
    );
    assert_exit(&out, 0);
    let table = fs::read_to_string(tmp.path().join("shk/trajectory.csv")).unwrap();
    assert_eq!(table, "t,damage\n1,0\n2,0\n3,0\n");
}

#[test]
fn shock_high_quantile_on_small_net_advises() {
    let tmp = TempDir::new().unwrap();
    let mut edges = String::from("fund_id,asset_id,market_value\n");
    for a in 0..8 {
        edges.push_str(&format!("F,A{a},{}\n", a + 1));
    }
    edges.push_str("F,A8,9\nF,A9,9\n");
    write(tmp.path(), "snap.csv", &edges);
    let out = holdnet(
        &[
            "shock",
            "--snapshot",
            "snap.csv",
            "--quarter",
            "2006Q2",
            "--quantile",
            "0.999",
            "--out-dir",
            "shk",
        ],
        tmp.path(),
    );
    // On a 10-asset net with a tied maximum the 0.999 quantile equals the
    // top value, which no asset strictly exceeds: the set comes up empty.
    assert_exit(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("lower the quantile"), "stderr: {stderr}");
}

#[test]
fn compare_single_seed_emits_three_variants() {
    let tmp = TempDir::new().unwrap();
    ingest_sample(tmp.path());
    let out = holdnet(
        &[
            "compare",
            "--snapshot",
            "snap/snapshot.csv",
            "--seeds",
            "5",
            "--steps",
            "2",
            "--quantile",
            "0.5",
            "--out-dir",
            "cmp",
        ],
        tmp.path(),
    );
    assert_exit(&out, 0);
    let table = fs::read_to_string(tmp.path().join("cmp/compare.csv")).unwrap();
    for variant in ["original", "rnd1", "rnd2"] {
        assert!(table.contains(variant), "missing {variant}: {table}");
    }
}

#[test]
fn compare_without_seeds_exits_2() {
    let tmp = TempDir::new().unwrap();
    ingest_sample(tmp.path());
    let out = holdnet(
        &[
            "compare",
            "--snapshot",
            "snap/snapshot.csv",
            "--steps",
            "2",
            "--quantile",
            "0.5",
            "--out-dir",
            "cmp",
        ],
        tmp.path(),
    );
    assert_exit(&out, 2);
}

#[test]
fn synth_outputs_are_deterministic_and_manifest_reproduces() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "synth",
        "--n-funds",
        "40",
        "--n-assets",
        "90",
        "--mean-degree",
        "6",
        "--styles",
        "3",
        "--kappa",
        "0.5",
        "--seed",
        "11",
        "--out-dir",
        "syn",
    ];
    assert_exit(&holdnet(&args, tmp.path()), 0);
    let first_csv = fs::read(tmp.path().join("syn/synthetic.csv")).unwrap();
    let first_manifest = fs::read(tmp.path().join("syn/manifest.json")).unwrap();
    assert_exit(&holdnet(&args, tmp.path()), 0);
    let second_csv = fs::read(tmp.path().join("syn/synthetic.csv")).unwrap();
    let second_manifest = fs::read(tmp.path().join("syn/manifest.json")).unwrap();
    assert_eq!(first_csv, second_csv);
    assert_eq!(
        first_manifest, second_manifest,
        "manifest (including checksums) must be reproducible"
    );
    let manifest: serde_json::Value = serde_json::from_slice(&first_manifest).unwrap();
    assert_eq!(manifest["command"], "synth");
    assert_eq!(manifest["config"]["seed"], 11);
    assert!(manifest["outputs"].as_array().unwrap().len() >= 2);
}

#[test]
fn stats_reads_quarter_from_sidecar() {
    let tmp = TempDir::new().unwrap();
    ingest_sample(tmp.path());
    let out = holdnet(
        &["stats", "--snapshot", "snap/snapshot.csv", "--out-dir", "st"],
        tmp.path(),
    );
    assert_exit(&out, 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"quarter\":\"2006Q2\""), "stdout: {stdout}");
    // Without a sidecar and without --quarter the load is refused.
    fs::copy(
        tmp.path().join("snap/snapshot.csv"),
        tmp.path().join("bare.csv"),
    )
    .unwrap();
    let out = holdnet(
        &["stats", "--snapshot", "bare.csv", "--out-dir", "st2"],
        tmp.path(),
    );
    assert_exit(&out, 2);
}

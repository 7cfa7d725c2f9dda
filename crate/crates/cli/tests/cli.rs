use std::fs;
use std::path::PathBuf;

use assert_cmd::Command;
use serde_json::Value;

fn gup() -> Command {
    let mut cmd = Command::cargo_bin("gup").unwrap();
    cmd.env_remove("GUP_OUTPUT_DIR");
    cmd
}

fn run(args: &[&str]) -> String {
    let out = gup().args(args).assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

fn run_json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&run(&all)).unwrap()
}

/// Parses a CSV body into its header and numeric rows.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (header, rows) = parse_csv(text);
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i]).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gup-cli-test-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn surface_minimum_on_symmetric_line() {
    let csv = run(&["surface", "--beta", "0.5", "--n-lambda", "11", "--n-eta", "13"]);
    let (header, rows) = parse_csv(&csv);
    assert_eq!(header, ["lambda", "eta", "delta_x"]);
    assert_eq!(rows.len(), 11 * 13);
    let best = rows.iter().min_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!(best[1].abs() < 1e-12, "argmin eta {}", best[1]);
}

#[test]
fn surface_json_matches_csv() {
    let args = ["surface", "--n-lambda", "4", "--n-eta", "5"];
    let (_, rows) = parse_csv(&run(&args));
    let doc = run_json(&args);
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), rows.len());
    for (r, row) in records.iter().zip(&rows) {
        assert_eq!(r["lambda"].as_f64().unwrap(), row[0]);
        assert_eq!(r["eta"].as_f64().unwrap(), row[1]);
        assert_eq!(r["delta_x"].as_f64().unwrap(), row[2]);
    }
    assert_eq!(doc["meta"]["params"]["n_lambda"], 4);
}

#[test]
fn usage_errors_exit_two() {
    gup().args(["surface", "--n-lambda", "1"]).assert().code(2);
    gup().args(["maxloc", "--p0", "0"]).assert().code(2);
    gup().args(["wavepacket", "--grid", "1,0,5"]).assert().code(2);
    gup().args(["dispersion", "--framework", "compact", "--k-max", "3"]).assert().code(2);
    gup().args(["no-such-command"]).assert().code(2);
    gup().args(["cosmo", "--samples", "abc"]).assert().code(2);
}

#[test]
fn maxloc_summary() {
    let doc = run_json(&["maxloc", "--beta", "0.5", "--p0", "1", "--xi", "2"]);
    let s = &doc["summary"];
    assert!((s["delta_x_min"].as_f64().unwrap() - 1.782_213_978_191_369).abs() < 1e-12);
    assert!((s["delta_x"].as_f64().unwrap() - 1.782_213_978_191_369).abs() < 1e-8);
    assert!((s["mean_x"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert!((s["norm"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn maxloc_summary_written_beside_output() {
    let dir = scratch("maxloc");
    gup()
        .args(["maxloc", "--beta", "0.5", "--output", "m.csv"])
        .env("GUP_OUTPUT_DIR", &dir)
        .assert()
        .success();
    let samples = fs::read_to_string(dir.join("m.csv")).unwrap();
    assert_eq!(column(&samples, "p").len(), 201);
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.join("m.summary.json")).unwrap()).unwrap();
    assert!(summary["delta_x_min"].as_f64().unwrap() > 0.0);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn standard_packet_spreads_as_free_gaussian() {
    let doc = run_json(&["wavepacket", "--framework", "standard", "--times", "0,1,2.5,5"]);
    for r in doc["spreading"].as_array().unwrap() {
        let t = r["t"].as_f64().unwrap();
        let dx = r["delta_x"].as_f64().unwrap();
        // sigma_p = 1, m = 1: Δx² = 1/2 + t²/2
        assert!((dx * dx - 0.5 - 0.5 * t * t).abs() < 1e-5, "t {t}: {dx}");
        assert!((r["mean_p"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn compact_cut_off_orders_spreading() {
    let dir = scratch("packets");
    for p0 in ["5", "3.5"] {
        gup()
            .args(["wavepacket", "--framework", "compact", "--p0", p0, "--times", "0,5"])
            .args(["--output", dir.join(format!("p{p0}.csv")).to_str().unwrap()])
            .assert()
            .success();
    }
    let rel = |p0: &str| {
        let s = fs::read_to_string(dir.join(format!("p{p0}.spreading.csv"))).unwrap();
        *column(&s, "delta_x_rel").last().unwrap()
    };
    assert!(rel("3.5") < rel("5"));
    let frames = fs::read_to_string(dir.join("p5.csv")).unwrap();
    assert_eq!(parse_csv(&frames).0, ["t", "x", "abs2"]);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn cosmology_bracket_and_clamp() {
    let doc = run_json(&["cosmo"]);
    let bracket = doc["meta"]["blowup_bracket"].as_array().unwrap();
    assert!(bracket[0].as_f64().unwrap() <= 0.0 && 0.0 <= bracket[1].as_f64().unwrap());

    let clamped = run(&["cosmo", "--p0-truncate", "1"]);
    let h_max = column(&clamped, "H").into_iter().fold(f64::MIN, f64::max);
    let h1 = 1.0 / (4.0 * std::f64::consts::PI.powi(2)) * (4.0 * std::f64::consts::PI.powi(2) / 3.0) * 3f64.sqrt();
    assert!((h_max - h1).abs() < 1e-15, "{h_max} vs {h1}");

    let out = gup().args(["cosmo", "--t-start", "-0.5"]).assert().code(1).get_output().stderr.clone();
    let msg = String::from_utf8(out).unwrap();
    assert!(msg.contains("singularity bracket ["), "{msg}");
}

#[test]
fn series_bounds_in_length_units() {
    let csv = run(&["series-bounds", "--beta", "0.37", "--units", "paper"]);
    let (_, rows) = parse_csv(&csv);
    assert!((rows[0][0] - 0.7906).abs() < 5e-5);
    assert!((rows[0][1] - 2.520).abs() < 5e-4);
}

#[test]
fn unit_mode_rescales_lengths() {
    let scaled = run_json(&["verify-gup", "--state", "kmm-maxloc", "--beta", "4"]);
    let paper = run_json(&["verify-gup", "--state", "kmm-maxloc", "--beta", "4", "--units", "paper"]);
    let (s, p) = (&scaled["records"][0], &paper["records"][0]);
    assert!((s["delta_x"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert!((p["delta_x"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((p["delta_p"].as_f64().unwrap() - s["delta_p"].as_f64().unwrap() * 2.0).abs() < 1e-8);
}

#[test]
fn verify_gup_states_respect_bound() {
    for state in ["squeezed", "maxloc", "kmm-maxloc", "gaussian", "random-maxloc"] {
        let doc = run_json(&["verify-gup", "--state", state, "--p0", "2"]);
        let slack = doc["records"][0]["gup_slack"].as_f64().unwrap();
        assert!(slack >= -1e-7, "{state}: {slack}");
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let a = run(&["verify-gup", "--state", "random-maxloc", "--seed", "7"]);
    let b = run(&["verify-gup", "--state", "random-maxloc", "--seed", "7"]);
    let c = run(&["verify-gup", "--state", "random-maxloc", "--seed", "8"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    let args = ["overlap", "--n", "50", "--format", "json"];
    assert_eq!(run(&args), run(&args));
}

#[test]
fn overlap_starts_at_one() {
    let csv = run(&["overlap", "--n", "21"]);
    let abs = column(&csv, "abs");
    assert_eq!(abs[0], 1.0);
    assert!(abs.iter().all(|&a| a <= 1.0 + 1e-15));
}

#[test]
fn transform_round_trips() {
    for theory in ["full", "truncated"] {
        let csv = run(&["transform", "--theory", theory, "--round-trip", "--points", "41"]);
        let (re, ex) = (column(&csv, "re_psi"), column(&csv, "re_exact"));
        let err = re.iter().zip(&ex).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-3, "{theory}: {err}");
    }
    let forward = run(&["transform", "--grid", "-10,10,41"]);
    assert_eq!(column(&forward, "x").len(), 41);
}

#[test]
fn dispersion_table() {
    let csv = run(&["dispersion", "--framework", "standard", "--k-max", "2", "--n", "5"]);
    let (k, w) = (column(&csv, "k"), column(&csv, "omega"));
    for (k, w) in k.iter().zip(&w) {
        assert!((w - k * k / 2.0).abs() < 1e-12);
    }
}

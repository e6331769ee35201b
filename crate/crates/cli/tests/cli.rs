use std::process::{Command, Output};

use serde_json::Value;

fn qctf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qctf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Splits CSV output into the metadata object and the remaining lines.
fn split_csv(text: &str) -> (Value, Vec<&str>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().strip_prefix("# ").expect("commented header");
    (serde_json::from_str(header).unwrap(), lines.collect())
}

fn column(rows: &[&str], idx: usize) -> Vec<f64> {
    rows.iter().map(|r| r.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn spectrum_intensities_sum_to_zero() {
    let out = qctf(&["spectrum", "--n", "33", "--q", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let (meta, lines) = split_csv(&text);
    assert_eq!(meta["config"]["n"], 33);
    assert_eq!(lines[0], "omega,intensity,count,class");
    let sum: f64 = column(&lines[1..], 1).iter().sum();
    assert!(sum.abs() <= 1e-9, "sum = {sum}");
    assert!(lines[1..].iter().any(|l| l.ends_with(",dominant")));
    assert!(lines[1..].iter().any(|l| l.ends_with(",suppressed")));
}

#[test]
fn heatmap_layout_and_parity() {
    let out = qctf(&["heatmap", "--n", "33", "--tmax", "40", "--steps", "400"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let (_, lines) = split_csv(&text);
    assert_eq!(lines[0], "t,q,value");
    let rows = &lines[1..];
    assert_eq!(rows.len(), 33 * 400);
    let values = column(rows, 2);
    let qs = column(rows, 1);
    // rows are t-major with q ascending from −16 to 16
    for (block, chunk) in values.chunks(33).enumerate() {
        assert_eq!(qs[block * 33], -16.0);
        for k in 0..33 {
            assert!((chunk[k] - chunk[32 - k]).abs() < 1e-14);
        }
    }
}

#[test]
fn header_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let out = qctf(&[
        "evolve", "--n", "21", "--q", "-3", "--j", "1.7", "--delta", "0.3", "--hbar", "0.9",
        "--tmax", "7.25", "--steps", "50", "--out", first.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&first).unwrap();
    let (meta, lines) = split_csv(&text);

    // feed the recorded configuration back in through a config file
    let mut config = meta["config"].as_object().unwrap().clone();
    config.retain(|k, v| !v.is_null() && k != "command" && k != "out");
    let toml_text = toml::to_string(&config).unwrap();
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(&cfg_path, toml_text).unwrap();
    let again = qctf(&["evolve", "--config", cfg_path.to_str().unwrap()]);
    assert!(again.status.success());
    let again_text = stdout(&again);
    let (meta2, lines2) = split_csv(&again_text);
    assert_eq!(lines, lines2);
    let mut a = meta["config"].clone();
    let mut b = meta2["config"].clone();
    a["out"] = Value::Null;
    b["out"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "n = 9\nq = 2\nsteps = 5\n").unwrap();
    let out = qctf(&["evolve", "--config", cfg.to_str().unwrap(), "--q", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let (meta, lines) = split_csv(&text);
    assert_eq!(meta["config"]["n"], 9);
    assert_eq!(meta["config"]["q"], 1);
    assert_eq!(lines.len(), 6);

    std::fs::write(&cfg, "sites = 9\n").unwrap();
    assert_eq!(qctf(&["evolve", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn worker_count_does_not_change_data() {
    let data = |workers: &str| {
        let out = qctf(&["spectrum", "--n", "25", "--q", "3", "--workers", workers]);
        assert!(out.status.success());
        stdout(&out).lines().skip(1).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(data("1"), data("4"));
}

#[test]
fn numbers_round_trip() {
    let out = qctf(&["spectrum", "--n", "9", "--q", "1", "--format", "json"]);
    let text = stdout(&out);
    let json_lines: Vec<&str> = text.lines().collect();
    assert_eq!(json_lines.len(), 2);
    let body: Value = serde_json::from_str(json_lines[1]).unwrap();
    let csv = stdout(&qctf(&["spectrum", "--n", "9", "--q", "1"]));
    let (_, lines) = split_csv(&csv);
    let omegas = column(&lines[1..], 0);
    let poles = body["poles"].as_array().unwrap();
    assert_eq!(poles.len(), omegas.len());
    for (p, w) in poles.iter().zip(&omegas) {
        assert_eq!(p["omega"].as_f64().unwrap().to_bits(), w.to_bits());
    }
}

#[test]
fn derivative_and_transient_tables() {
    let out = qctf(&["derivatives", "--n", "33", "--q-min", "1", "--q-max", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let (_, lines) = split_csv(&text);
    assert_eq!(lines[0], "q,kbar,order,exact_value,moment_value,exactness_flag");
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        if cells[5] == "true" {
            let exact: f64 = cells[3].parse().unwrap();
            let moment: f64 = cells[4].parse().unwrap();
            assert!(((moment - exact) / exact).abs() < 1e-6, "{row}");
        }
    }

    let out = qctf(&["transient", "--n", "201", "--q", "3", "--tmax", "1", "--steps", "11"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let (_, lines) = split_csv(&text);
    assert_eq!(lines[0], "t,exact,bessel_approx");
    assert_eq!(lines.len(), 12);
}

#[test]
fn edge_footer() {
    let out = qctf(&["edge", "--n", "201"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let (_, lines) = split_csv(&text);
    assert_eq!(lines[0], "q,arrival_time");
    assert_eq!(lines.len(), 1 + 15 + 1);
    let footer = lines.last().unwrap().strip_prefix("# fitted_velocity=").unwrap();
    let v: f64 = footer.parse().unwrap();
    assert!(v > 0.0);
}

#[test]
fn exit_codes() {
    assert_eq!(qctf(&["spectrum", "--n", "99"]).status.code(), Some(1));
    assert_eq!(qctf(&["evolve", "--n", "9", "--q", "7"]).status.code(), Some(1));
    assert_eq!(qctf(&["nonsense"]).status.code(), Some(1));
    assert_eq!(qctf(&["--help"]).status.code(), Some(0));

    let ok = qctf(&["verify", "--level", "desk", "--only", "11"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("[PASS] 11"));

    // criterion 6 misses its tolerance at q=10
    let failed = qctf(&["verify", "--only", "6"]);
    assert_eq!(failed.status.code(), Some(2));
    assert!(stdout(&failed).contains("[FAIL]  6"));
}

use std::process::Command;

use schwarz_scaling::output::{Cell, Dataset};
use schwarz_scaling::schwarz::observed_contraction;

fn schwarz(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_schwarz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn floats(d: &Dataset, col: &str) -> Vec<f64> {
    d.column(col).unwrap().iter().map(|c| c.as_f64().unwrap()).collect()
}

#[test]
fn fig2left_dataset_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2left.json");
    let st = schwarz(&["fig2left", "--points", "25", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let d = Dataset::read_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(d.columns, vec!["q", "mu1", "nu1", "tau1"]);
    assert_eq!(d.rows.len(), 25);
    let mu = floats(&d, "mu1");
    assert!(mu.windows(2).all(|w| w[1] > w[0]));
    assert!(mu.iter().all(|&m| m > std::f64::consts::FRAC_PI_2 && m < std::f64::consts::PI));
    assert_eq!(d.config["command"], "fig2left");
}

#[test]
fn fig2right_csv_has_config_echo_and_constant_dd() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2right.csv");
    let st = schwarz(&["fig2right", "--points", "10", "--convention", "sqrt", "--out", out.to_str().unwrap()]);
    assert!(st.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().next().unwrap().starts_with('#'));
    let (echo, cols, rows) = Dataset::read_csv(text.as_bytes()).unwrap();
    assert!(echo.iter().any(|(k, v)| k == "convention" && v == "sqrt"));
    let dd = cols.iter().position(|c| c == "rho_DD").unwrap();
    assert!(rows.iter().all(|r| r[dd] == rows[0][dd]));
}

#[test]
fn solve_json_reproduces_its_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.json");
    let st = schwarz(&[
        "solve", "--bc", "DR", "--transmission", "robin", "--N", "3", "--seed", "11", "--format", "json", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let d = Dataset::read_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let norms = floats(&d, "error_norm");
    let window = 10.min(norms.len() - 1);
    let rho = observed_contraction(&norms, window).unwrap();
    assert_eq!(d.config["observed_rho"].as_f64().unwrap(), rho);
    let iters: usize = d.config["iters"].as_str().unwrap().parse().unwrap();
    assert_eq!(iters + 1, norms.len());
    assert_eq!(d.provenance.seed, Some(11));

    // same flags, same bytes
    let again = dir.path().join("again.json");
    let st = schwarz(&[
        "solve", "--bc", "DR", "--transmission", "robin", "--N", "3", "--seed", "11", "--format", "json", "--out",
        again.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn table_marks_the_cap() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let st = schwarz(&[
        "table2", "--n-list", "3", "--columns", "NN", "--max-iter", "20", "--format", "json", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let d = Dataset::read_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(d.rows.len(), 1);
    assert_eq!(d.column("psm_exceeded").unwrap()[0], &Cell::Bool(true));
    assert_eq!(d.column("pair").unwrap()[0], &Cell::Text(">20 - >20".into()));
    assert!(dir.path().join("t.json.reports.json").exists());

    let csv = dir.path().join("t.csv");
    let st = schwarz(&["table2", "--n-list", "3", "--columns", "NN", "--max-iter", "20", "--out", csv.to_str().unwrap()]);
    assert!(st.status.success());
    let (_, cols, rows) = Dataset::read_csv(std::fs::read_to_string(&csv).unwrap().as_bytes()).unwrap();
    assert_eq!(cols, vec!["grid", "N", "NN"]);
    assert_eq!(rows[0][2], Cell::Text(">20 - >20".into()));
}

#[test]
fn exit_codes() {
    assert_eq!(schwarz(&["bounds", "--delta", "0.9"]).status.code(), Some(2));
    assert_eq!(schwarz(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(schwarz(&["solve", "--delta", "0.15", "--h", "0.1"]).status.code(), Some(2));
    assert_eq!(schwarz(&["bounds"]).status.code(), Some(0));
    assert_eq!(schwarz(&["--help"]).status.code(), Some(0));
}

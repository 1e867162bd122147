use std::path::Path;
use std::process::{Command, Output};

use delta_utm::io::{read_field_csv, write_field_csv};
use delta_utm_core::model::{FieldSource, SolutionField, SpaceTimeGrid};
use num_complex::Complex64;
use proptest::prelude::*;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delta-utm")).current_dir(dir).args(args).output().unwrap()
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn free_solve_reproduces_the_datum_at_t0() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        run(dir.path(), &["solve", "--potential.q", "0", "--grid.x", "[-2.0, 0.0, 1.5]", "--grid.t", "[0.0, 0.5]"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.path().join("out/field.csv"));
    assert_eq!(r.len(), 6);
    for row in &r[..3] {
        assert_eq!(row[0], 0.0);
        assert!((row[2] - (-row[1] * row[1]).exp()).abs() < 1e-8);
        assert!(row[3].abs() < 1e-8);
    }
}

#[test]
fn malformed_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[potential]\nq = \"one\"\n").unwrap();
    let out = run(dir.path(), &["solve", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("out").join("field.csv").exists());

    let out = run(dir.path(), &["solve", "--no_such_option", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("out").join("field.csv").exists());
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--potential.q", "-1.5", "--grid.x", "[-1.0, 0.3]", "--grid.t", "[0.2]"]);
    assert!(out.status.success());
    let first = std::fs::read(dir.path().join("out/field.csv")).unwrap();
    let out = run(dir.path(), &["solve", "--config", "out/manifest.toml", "--output.dir", "again"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(first, std::fs::read(dir.path().join("again/field.csv")).unwrap());
}

#[test]
fn comparing_a_file_with_itself_gives_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["solve", "--grid.x", "[0.0, 1.0]", "--grid.t", "[0.5]"]).status.success());
    let out = run(dir.path(), &["--strict", "compare", "out/field.csv", "out/field.csv", "--tolerance", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("compare.json")).unwrap()).unwrap();
    assert_eq!(report["linf_abs"], 0.0);
    assert_eq!(report["l2_rel"], 0.0);
}

#[test]
fn oracle_keeps_the_bound_state_modulus() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "oracle",
            "--profile.kind",
            "bound_state",
            "--profile.q",
            "2",
            "--profile.a",
            "0",
            "--potential.q",
            "2",
            "--grid.x",
            "[-0.5, 0.0, 0.5]",
            "--grid.t",
            "[0.0, 0.1, 0.2]",
            "--fd.half_width",
            "10",
            "--fd.h",
            "0.01",
            "--fd.dt",
            "0.001",
            "--fd.final_time",
            "0.2",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.path().join("out/field.csv"));
    for row in &r {
        let expect = (-2.0 * row[1].abs()).exp();
        assert!((row[4] - expect).abs() < 1e-3, "{row:?}");
    }
    assert!(dir.path().join("out/traces.csv").exists());
}

#[test]
fn small_oracle_domain_reports_the_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "oracle",
            "--grid.t",
            "[0.0, 3.0]",
            "--fd.half_width",
            "25",
            "--fd.h",
            "0.02",
            "--fd.dt",
            "0.002",
            "--fd.final_time",
            "3",
            "--fd.boundary_guard",
            "1e-8",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("domain too small") && err.contains("t = "), "{err}");
    assert!(!dir.path().join("out").join("field.csv").exists());
}

#[test]
fn strict_asymptotics() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["--strict", "asymptotics", "--potential.q", "-1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // free decay is t^{-1/2}, outside the default exponent window
    let out = run(dir.path(), &["--strict", "asymptotics", "--potential.q", "0", "--asymptotics.n_samples", "8"]);
    assert_eq!(out.status.code(), Some(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn field_csv_round_trip(
        xs in proptest::collection::btree_set(-1000i32..1000, 1..5),
        nt in 1usize..4,
        seed in proptest::collection::vec(-1e300..1e300f64, 40),
    ) {
        let x: Vec<f64> = xs.iter().map(|&v| v as f64 * 0.37).collect();
        let t: Vec<f64> = (0..nt).map(|i| i as f64 / 3.0).collect();
        let n = x.len() * t.len();
        let values: Vec<Complex64> = (0..n).map(|i| Complex64::new(seed[2 * i], seed[2 * i + 1] * 1e-300)).collect();
        let field = SolutionField::new(SpaceTimeGrid::new(x, t).unwrap(), values, FieldSource::Utm).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        write_field_csv(&path, &field).unwrap();
        let back = read_field_csv(&path, FieldSource::Utm).unwrap();
        prop_assert_eq!(back.grid(), field.grid());
        prop_assert_eq!(back.values(), field.values());
    }
}

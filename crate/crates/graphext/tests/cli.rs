use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use graphext::report::{CatalogueReport, CertifyReport, ClassifyReport, DeficiencyReportDto, SimulateReport, SCHEMA};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn graphext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphext")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_delta_z_file() {
    let o = graphext(&["classify", "--input", data("delta_z.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: ClassifyReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.schema, SCHEMA);
    assert_eq!(r.classification.verdict, "skew_self_adjoint");
    assert!(r.classification.residual.unwrap() < 1e-12);
    assert_eq!(r.tolerances.unitary, 1e-10);
}

#[test]
fn classify_mixed_tadpole() {
    let o = graphext(&["classify", "--input", data("split.json").to_str().unwrap()]);
    let r: ClassifyReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.classification.verdict, "contraction_generator");
    assert_eq!(r.frame, "derivative_split");
}

#[test]
fn deficiency_of_tadpole() {
    let o = graphext(&["deficiency", "--input", data("tadpole.json").to_str().unwrap()]);
    let r: DeficiencyReportDto = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((r.d_minus, r.d_plus), (5, 4));
    assert_eq!((r.edges[0].d_minus, r.edges[0].d_plus), (2, 1));
    let o = graphext(&["deficiency", "--operator", "schrodinger", "--input", data("tadpole.json").to_str().unwrap()]);
    let r: DeficiencyReportDto = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((r.d_minus, r.d_plus), (3, 3));
}

#[test]
fn catalogue_report_parses_and_flags_mismatches() {
    let o = graphext(&["catalogue"]);
    let r: CatalogueReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.passed + r.failed, r.entries.len());
    let expected = if r.failed == 0 { 0 } else { 2 };
    assert_eq!(o.status.code(), Some(expected));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = graphext(&["catalogue", "--seed", "7", "--output", out.to_str().unwrap()]);
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn malformed_json_exits_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"frame\": even_paired\n}").unwrap();
    let o = graphext(&["classify", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2, column 12"), "{err}");
}

#[test]
fn simulate_writes_series() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s.csv");
    let o = graphext(&[
        "simulate",
        "--input",
        data("dzn.json").to_str().unwrap(),
        "--scenario",
        data("scenario.json").to_str().unwrap(),
        "--series",
        series.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: SimulateReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.evolution.steps, 100);
    assert!(r.evolution.norm_drift < 1e-12);
    let mut rows = csv::Reader::from_path(&series).unwrap();
    assert_eq!(rows.headers().unwrap(), vec!["t", "norm", "boundary_residual", "tail_mass"]);
    assert_eq!(rows.records().count(), 101);
}

#[test]
fn certify_reports_horizon_as_input_error() {
    let o = graphext(&[
        "certify",
        "--input",
        data("dzn.json").to_str().unwrap(),
        "--scenario",
        data("scenario.json").to_str().unwrap(),
    ]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(err.contains("horizon exceeded"), "{err}");
}

#[test]
fn certify_schrodinger_default() {
    let o = graphext(&["certify", "--input", data("dzn.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: CertifyReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.verdict_consistency);
    assert!(r.evolution.norm_drift < 1e-8);
    assert_eq!(r.tolerances.horizon, 1e-10);
}

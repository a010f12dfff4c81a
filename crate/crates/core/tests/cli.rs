use rotweingarten::surface::read_obj_file;
use serde_json::Value;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotweingarten"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn reconstruct_writes_csv() {
    let o = bin(&["reconstruct", "--surface", "sphere:R=1", "--n", "50"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,x,z,theta"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 50);
    for r in &rows {
        assert!((r[1] * r[1] + r[2] * r[2] - 1.0).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn json_report_goes_to_stdout_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let o = bin(&[
        "wdiagram",
        "--surface",
        "catenoid:a=1",
        "--n",
        "20",
        "--json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["label"], "catenoid:a=1");
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 21);
}

#[test]
fn solve_reports_classification() {
    let o = bin(&["solve", "cubic:mu=4", "--c", "0.75", "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classification"]["kind"], "ellipsoid");
    let o = bin(&["solve", "special:a=1,b=0,c=-1", "--d", "0.5", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn prescribe_gauss_json() {
    let o = bin(&["prescribe", "--KG", "const:-1", "--c", "1", "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["residuals"]["K_G"].as_f64().unwrap() < 1e-10);
}

#[test]
fn mesh_with_curvature_csv() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("t.obj");
    let csv = dir.path().join("t.csv");
    let o = bin(&[
        "mesh",
        "--surface",
        "torus:a=2,R=1",
        "--ns",
        "30",
        "--ntheta",
        "16",
        "--triangulate",
        "--out",
        obj.to_str().unwrap(),
        "--curvature-csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_obj_file(&obj).unwrap().len(), 30 * 16);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("f ")).count(),
        2 * 29 * 16
    );
    let csv = std::fs::read_to_string(&csv).unwrap();
    assert!(csv.starts_with("i,j,x,y,z,k_m_est,k_p_est\n"));
    assert_eq!(csv.lines().count(), 30 * 16 + 1);
}

#[test]
fn verify_passes_and_fails_cleanly() {
    let o = bin(&["verify", "--surface", "ellipsoid:a=2,b=1"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
    let o = bin(&["verify", "--surface", "sphere:R=0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
    assert_eq!(bin(&["mesh"]).status.code(), Some(1));
    assert_eq!(bin(&["solve", "cubic:mu=1"]).status.code(), Some(0));
    assert_eq!(bin(&["solve", "linear:p=0"]).status.code(), Some(1));
}

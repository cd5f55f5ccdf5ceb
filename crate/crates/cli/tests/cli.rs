use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn polyaccess(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyaccess")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = polyaccess(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

/// Rows of a CSV with a header, as strings.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polyaccess-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn group_reports() {
    let pauli = ok_json(&["group", "--builtin", "pauli"]);
    assert_eq!(pauli["order"], 4);
    assert_eq!(pauli["subgroup_orders"], serde_json::json!([1, 2, 2, 2, 4]));
    assert_eq!(pauli["affine_dimension"], 3);
    assert_eq!(ok_json(&["group", "--builtin", "weyl-3"])["order"], 9);

    let z3 = ok_json(&["group", "--builtin", "z3"]);
    let d = z3["distances"].as_array().unwrap();
    let d01 = d[0][1].as_f64().unwrap();
    assert!(d01 > 0.0);
    for (a, b) in [(0, 2), (1, 2)] {
        assert!((d[a][b].as_f64().unwrap() - d01).abs() < 1e-12);
    }
}

#[test]
fn z2_trajectory_matches_closed_form() {
    let (header, rows) = csv(&ok(&["trajectory", "--builtin", "z2", "--t-max", "5", "--steps", "50"]));
    assert_eq!(header, ["t", "w_0", "w_1"]);
    assert_eq!(rows.len(), 51);
    for r in &rows {
        let t = num(&r[0]);
        assert!((num(&r[1]) - 0.5 * (1.0 + (-2.0 * t).exp())).abs() < 1e-12);
        assert!((num(&r[2]) - 0.5 * (1.0 - (-2.0 * t).exp())).abs() < 1e-12);
    }
}

#[test]
fn trajectories_start_at_identity_and_reach_centre() {
    for name in ["z3", "noncyclic4", "s3", "weyl-2"] {
        let (_, rows) = csv(&ok(&["trajectory", "--builtin", name, "--t-max", "40", "--steps", "4"]));
        let first: Vec<f64> = rows[0][1..].iter().map(|s| num(s)).collect();
        assert_eq!(first[0], 1.0, "{name}");
        assert!(first[1..].iter().all(|&x| x == 0.0), "{name}");
        let last: Vec<f64> = rows[4][1..].iter().map(|s| num(s)).collect();
        let g = last.len() as f64;
        assert!(last.iter().all(|&x| (x - 1.0 / g).abs() < 1e-10), "{name}: {last:?}");
    }
}

#[test]
fn explicit_rates() {
    let (_, rows) = csv(&ok(&["trajectory", "--builtin", "z3", "--rates", "1,0", "--t-max", "1", "--steps", "1"]));
    let full = csv(&ok(&["trajectory", "--builtin", "z3", "--rates", "0,1,0", "--t-max", "1", "--steps", "1"])).1;
    assert_eq!(rows, full);
    let out = polyaccess(&["trajectory", "--builtin", "z3", "--rates", "1,0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn access_verdicts() {
    assert_eq!(ok_json(&["access", "--builtin", "z2", "--weights", "0.6,0.4"])["accessible"], true);
    assert_eq!(ok_json(&["access", "--builtin", "z2", "--weights", "0.4,0.6"])["accessible"], false);
    assert_eq!(ok_json(&["access", "--builtin", "z3", "--weights", "0.5,0.5,0"])["accessible"], false);
    for name in ["z3", "pauli", "s3", "weyl-3"] {
        let g = ok_json(&["group", "--builtin", name])["order"].as_u64().unwrap() as usize;
        let mut p = vec!["0"; g];
        p[0] = "1";
        assert_eq!(ok_json(&["access", "--builtin", name, "--weights", &p.join(",")])["accessible"], true, "{name}");
    }
}

#[test]
fn access_reads_matrix_files() {
    let id = scratch("identity.json");
    let data: Vec<[f64; 2]> = (0..16).map(|k| [if k % 5 == 0 { 1.0 } else { 0.0 }, 0.0]).collect();
    std::fs::write(&id, serde_json::json!({"rows": 4, "cols": 4, "data": data}).to_string()).unwrap();
    assert_eq!(ok_json(&["access", "--builtin", "z3", "--matrix", id.to_str().unwrap()])["accessible"], true);

    // A map outside the affine hull is an input error.
    let off = scratch("off.csv");
    std::fs::write(&off, "0,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,0\n").unwrap();
    let out = polyaccess(&["access", "--builtin", "z3", "--matrix", off.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "not_in_affine_hull");
}

#[test]
fn volume_matches_polygon_ratio() {
    let v = ok_json(&["volume", "--builtin", "z5", "-n", "100000", "--seed", "7"]);
    assert_eq!(v["n"], 100000);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["matches_reference"], true);
    let f = v["fraction"].as_f64().unwrap();
    let se = v["std_error"].as_f64().unwrap();
    assert!((f - v["reference"]["value"].as_f64().unwrap()).abs() <= 3.0 * se);
}

#[test]
fn commands_are_deterministic() {
    let args = ["volume", "--builtin", "noncyclic4", "-n", "5000", "--seed", "11", "--workers", "3"];
    assert_eq!(ok(&args), ok(&args));
    let spectra = ["spectra", "--builtin", "z4", "-n", "50", "--seed", "2"];
    assert_eq!(ok(&spectra), ok(&spectra));
}

#[test]
fn spectra_lie_in_the_group_polygon() {
    let (header, rows) = csv(&ok(&["spectra", "--builtin", "z3", "-n", "300", "--seed", "1"]));
    assert_eq!(header, ["sample", "re", "im", "accessible"]);
    let omega = [(1.0, 0.0), (-0.5, 3f64.sqrt() / 2.0), (-0.5, -(3f64.sqrt()) / 2.0)];
    for r in &rows {
        let (x, y) = (num(&r[1]), num(&r[2]));
        // Inside the triangle: on the inner side of each edge.
        for k in 0..3 {
            let (a, b) = (omega[k], omega[(k + 1) % 3]);
            let cross = (b.0 - a.0) * (y - a.1) - (b.1 - a.1) * (x - a.0);
            assert!(cross >= -1e-9, "{x},{y}");
        }
    }
    let (_, rows) = csv(&ok(&["spectra", "--builtin", "z4", "-n", "300", "--seed", "1"]));
    assert!(rows.iter().any(|r| r[3] == "1") && rows.iter().any(|r| r[3] == "0"));
    for r in &rows {
        assert!(num(&r[1]).abs() + num(&r[2]).abs() <= 1.0 + 1e-9);
    }
}

#[test]
fn z2_boundary_endpoints() {
    let (_, rows) = csv(&ok(&["boundary", "--builtin", "z2", "--t-max", "50", "--steps", "10"]));
    assert_eq!(&rows[0][2..4], ["1.0", "0.0"]);
    let last = rows.last().unwrap();
    assert!((num(&last[2]) - 0.5).abs() < 1e-12 && (num(&last[3]) - 0.5).abs() < 1e-12);
}

#[test]
fn z3_boundary_spirals_toward_the_centre() {
    let (header, rows) = csv(&ok(&["boundary", "--builtin", "z3", "--t-max", "6", "--steps", "60"]));
    assert_eq!(header.last().unwrap(), "im");
    let radius: Vec<f64> = rows.iter().filter(|r| r[0] == "R").map(|r| num(&r[5]).hypot(num(&r[6]))).collect();
    assert_eq!(radius.len(), 61);
    // |λ(t)| = e^{−3t/2} along a single-generator curve.
    for (k, r) in radius.iter().enumerate() {
        let t = 6.0 * k as f64 / 60.0;
        assert!((r - (-1.5 * t).exp()).abs() < 1e-12);
    }
}

#[test]
fn birkhoff_projection_files() {
    let out = scratch("b3.csv");
    ok(&["boundary", "--builtin", "birkhoff3", "-n", "500", "--out", out.to_str().unwrap()]);
    for plane in ["even", "odd"] {
        let text = std::fs::read_to_string(scratch(&format!("b3-{plane}.csv"))).unwrap();
        let (header, rows) = csv(&text);
        assert_eq!(header, ["x", "y", "accessible"]);
        assert_eq!(rows.len(), 500);
    }
}

#[test]
fn odd_section_has_no_accessible_points() {
    let (_, rows) = csv(&ok(&["boundary", "--builtin", "birkhoff3", "--section", "odd", "-n", "5000", "--seed", "4"]));
    assert_eq!(rows.len(), 5000);
    assert!(rows.iter().all(|r| r[2] == "0"));
    let (_, even) = csv(&ok(&["boundary", "--builtin", "birkhoff3", "--section", "even", "-n", "2000", "--seed", "4"]));
    assert!(even.iter().any(|r| r[2] == "1"));
}

#[test]
fn group_files() {
    let path = scratch("klein.json");
    std::fs::write(
        &path,
        r#"{"generators": [{"kind": "diagonal-unitary", "phases": ["0", "0", "1/2"]}, {"kind": "diagonal-unitary", "phases": ["0", "1/2", "0"]}]}"#,
    )
    .unwrap();
    let g = ok_json(&["group", "--group-file", path.to_str().unwrap()]);
    assert_eq!(g["order"], 4);
    assert_eq!(g["affine_dimension"], 3);
}

#[test]
fn error_contract() {
    let out = polyaccess(&["group", "--builtin", "z99"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_argument");

    let out = polyaccess(&["volume", "--builtin", "z3", "-n", "10"]);
    assert_eq!(out.status.code(), Some(2));

    let out = polyaccess(&["volume"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "usage");

    let out = polyaccess(&["access", "--builtin", "z2", "--weights", "0.5,0.5", "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));

    // The trivial group has a zero-dimensional polytope: a numeric failure.
    let trivial = scratch("trivial.json");
    std::fs::write(&trivial, r#"{"generators": []}"#).unwrap();
    let out = polyaccess(&["volume", "--group-file", trivial.to_str().unwrap(), "-n", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "degenerate_polytope");
}

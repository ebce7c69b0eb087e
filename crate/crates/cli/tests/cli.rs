use std::fs;
use std::path::{Path, PathBuf};

use convproj_cli::dispatch;
use serde_json::Value;
use tempfile::TempDir;

const DISK: &str = r#"{"chart":[0,0,1],"backend":{"type":"ellipsoid","center":[0,0],"shape":[[1,0],[0,1]]}}"#;
const HALFPLANE: &str = r#"{"chart":[0,0,1],"backend":{"type":"hpoly","halfspaces":[{"normal":[-1,0],"offset":0}]}}"#;
const SQUARE: &str = r#"{"chart":[0,0,1],"backend":{"type":"vpoly","vertices":[[1,1],[-1,1],[-1,-1],[1,-1]]}}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn json_report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn boost(t: f64, axis: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
    m[axis][axis] = t.cosh();
    m[2][2] = t.cosh();
    m[axis][2] = t.sinh();
    m[2][axis] = t.sinh();
    m
}

fn gens_file(dir: &TempDir, mats: &[Vec<Vec<f64>>]) -> PathBuf {
    let names: Vec<String> = (0..mats.len()).map(|i| format!("g{i}")).collect();
    let text = serde_json::json!({ "generators": names, "terms": [mats] }).to_string();
    write(dir, "gens.json", &text)
}

#[test]
fn hilbert_distance_on_disk() {
    let dir = TempDir::new().unwrap();
    let disk = write(&dir, "disk.json", DISK);
    let r = dispatch(["hilbert", "dist", "--domain", &s(&disk), "--x", "0,0", "--y", "0.5,0"]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.summary, "0.549306");
}

#[test]
fn negative_coordinates_parse() {
    let dir = TempDir::new().unwrap();
    let disk = write(&dir, "disk.json", DISK);
    let r = dispatch(["hilbert", "dist", "--domain", &s(&disk), "--x", "-0.5,0", "--y", "0,0"]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.summary, "0.549306");
}

#[test]
fn halfplane_validation_is_a_computation_error() {
    let dir = TempDir::new().unwrap();
    let hp = write(&dir, "halfplane.json", HALFPLANE);
    let out = dir.path().join("report.json");
    let r = dispatch(["domain", "validate", "--domain", &s(&hp), "--out", &s(&out)]);
    assert_eq!(r.exit_code, 1);
    let rep = json_report(&out);
    assert_eq!(rep["error"]["code"], "not-properly-convex");
    assert!(rep["error"]["witness"].is_array());
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(dispatch(["frobnicate"]).exit_code, 2);
    let bad = write(&dir, "bad.json", "{ not json");
    assert_eq!(dispatch(["domain", "validate", "--domain", &s(&bad)]).exit_code, 2);
    let nan = write(&dir, "nan.json", r#"{"chart":[0,0,1],"backend":{"type":"vpoly","vertices":[[1e999,0],[0,1],[-1,0]]}}"#);
    assert_eq!(dispatch(["domain", "validate", "--domain", &s(&nan)]).exit_code, 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(dispatch(["domain", "validate", "--domain", &s(&missing)]).exit_code, 2);
    let disk = write(&dir, "disk.json", DISK);
    assert_eq!(dispatch(["hilbert", "dist", "--domain", &s(&disk), "--x", "0,0,0", "--y", "0,0"]).exit_code, 2);
}

#[test]
fn square_dual_is_a_diamond() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let out = dir.path().join("dual.json");
    let r = dispatch(["domain", "dual", "--domain", &s(&sq), "--out", &s(&out)]);
    assert_eq!(r.exit_code, 0);
    let rep = json_report(&out);
    assert_eq!(rep["result"]["backend"], "hpoly");
    assert_eq!(rep["result"]["spec"]["backend"]["halfspaces"].as_array().unwrap().len(), 4);
}

#[test]
fn ellipse_sequence_csv_grows_linearly() {
    let dir = TempDir::new().unwrap();
    let mut terms = Vec::new();
    let mut domains = Vec::new();
    for k in 1..=16 {
        let b = 1.0 / k as f64;
        let conj = |m: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            let d = [1.0, b, 1.0];
            (0..3).map(|i| (0..3).map(|j| d[i] * m[i][j] / d[j]).collect()).collect()
        };
        terms.push(vec![conj(boost(0.7, 0)), conj(boost(0.5, 1))]);
        domains.push(serde_json::json!({
            "chart": [0, 0, 1],
            "backend": {"type": "ellipsoid", "center": [0, 0], "shape": [[1, 0], [0, b * b]]}
        }));
    }
    let text = serde_json::json!({ "generators": ["a", "b"], "terms": terms, "domains": domains }).to_string();
    let seq = write(&dir, "squash.json", &text);
    let out = dir.path().join("report.csv");
    let r = dispatch(["normalize", "sequence", "--seq", &s(&seq), "--out", &s(&out)]);
    assert_eq!(r.exit_code, 0, "{}", r.summary);
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "k,d_norm,residual,max_entry");
    let norms: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(norms.len(), 16);
    for (k, d) in norms.iter().enumerate() {
        assert!((d - 2.0 * (k + 1) as f64).abs() < 1e-6, "k={} d={d}", k + 1);
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let disk = write(&dir, "disk.json", DISK);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let r = dispatch([
            "vinberg", "volume", "--domain", &s(&disk), "--v", "0,0,1", "--quadrature", "20000", "--seed", "11", "--out",
            &s(&out),
        ]);
        assert_eq!(r.exit_code, 0);
        fs::read(&out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn threads_flag_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    let disk = write(&dir, "disk.json", DISK);
    let one = dispatch(["--threads", "1", "hilbert", "delta", "--domain", &s(&disk), "--a", "0.5,0", "--b", "-0.4,0.3", "--c", "0,-0.6"]);
    let four = dispatch(["--threads", "4", "hilbert", "delta", "--domain", &s(&disk), "--a", "0.5,0", "--b", "-0.4,0.3", "--c", "0,-0.6"]);
    assert_eq!(one.exit_code, 0);
    assert_eq!(one.report, four.report);
}

#[test]
fn geodesic_writes_csv_and_svg() {
    let dir = TempDir::new().unwrap();
    let disk = write(&dir, "disk.json", DISK);
    let out = dir.path().join("geo.csv");
    let fig = dir.path().join("geo.svg");
    let r = dispatch([
        "hilbert", "geodesic", "--domain", &s(&disk), "--x", "-0.5,0", "--y", "0.5,0.2", "--k", "8", "--out", &s(&out), "--svg",
        &s(&fig),
    ]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 10);
    assert!(fs::read_to_string(&fig).unwrap().starts_with("<svg"));
}

#[test]
fn group_commands() {
    let dir = TempDir::new().unwrap();
    let disk = write(&dir, "disk.json", DISK);
    let gens = gens_file(&dir, &[boost(0.8, 0), boost(0.6, 1)]);
    let r = dispatch(["group", "aut", "--domain", &s(&disk), "--gens", &s(&gens)]);
    assert_eq!(r.exit_code, 0);
    assert!(r.summary.starts_with("2 of 2"));
    let out = dir.path().join("dyn.json");
    let r = dispatch(["group", "dynamics", "--domain", &s(&disk), "--gens", &s(&gens), "--out", &s(&out)]);
    assert_eq!(r.exit_code, 0);
    let rep = json_report(&out);
    assert!((rep["result"]["translation_length"].as_f64().unwrap() - 0.8).abs() < 1e-6);
    let r = dispatch(["group", "orbit", "--gens", &s(&gens), "--point", "0,0,1", "--length", "2"]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.summary, "17 orbit points");
}

#[test]
fn rotation_dynamics_is_not_hyperbolic() {
    let dir = TempDir::new().unwrap();
    let disk = write(&dir, "disk.json", DISK);
    let (c, sn) = (0.4f64.cos(), 0.4f64.sin());
    let gens = gens_file(&dir, &[vec![vec![c, -sn, 0.0], vec![sn, c, 0.0], vec![0.0, 0.0, 1.0]]]);
    let r = dispatch(["group", "dynamics", "--domain", &s(&disk), "--gens", &s(&gens)]);
    assert_eq!(r.exit_code, 1);
    assert!(r.summary.contains("not-hyperbolic"));
}

#[test]
fn plconvex_commands() {
    let dir = TempDir::new().unwrap();
    let mesh = write(&dir, "vee.json", r#"{"vertices":[[-1,2],[0,1],[1,2]],"simplices":[[0,1],[1,2]]}"#);
    let r = dispatch(["plconvex", "certify", "--mesh", &s(&mesh)]);
    assert_eq!(r.exit_code, 0);
    assert!(r.summary.starts_with("certified"));
    let r = dispatch(["plconvex", "outward", "--mesh", &s(&mesh), "--t", "1.5"]);
    assert_eq!(r.summary, "outward true");
    let r = dispatch(["plconvex", "radius", "--mesh", &s(&mesh), "--seed", "3"]);
    assert_eq!(r.exit_code, 0);
    assert!(r.summary.contains("100/100"));
    let radial = write(&dir, "radial.json", r#"{"vertices":[[0,1],[1,1],[2,2]],"simplices":[[0,1],[1,2]]}"#);
    let r = dispatch(["plconvex", "check", "--mesh", &s(&radial)]);
    assert_eq!(r.exit_code, 1);
}

#[test]
fn plconvex_build_on_orthant() {
    let dir = TempDir::new().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let seg = write(
        &dir,
        "seg.json",
        &format!(r#"{{"chart":[{h},{h}],"backend":{{"type":"vpoly","vertices":[[1],[-1]]}}}}"#),
    );
    let mesh = dir.path().join("mesh.json");
    let r = dispatch(["plconvex", "build", "--domain", &s(&seg), "--budget", "16", "--mesh-out", &s(&mesh)]);
    assert_eq!(r.exit_code, 0, "{}", r.summary);
    let m = json_report(&mesh);
    assert_eq!(m["vertices"].as_array().unwrap().len(), 16);
}

#[test]
fn boxcheck_examples() {
    let r = dispatch(["normalize", "boxcheck", "--matrix", "1,0;0,1", "--k", "1"]);
    assert_eq!(r.summary, "hypothesis true, bound holds");
    let r = dispatch(["normalize", "boxcheck", "--matrix", "1,10;0,1", "--k", "1"]);
    assert_eq!(r.summary, "hypothesis false, bound fails");
}

#[test]
fn isotropic_disk_has_k_two() {
    let dir = TempDir::new().unwrap();
    let disk = write(&dir, "disk.json", DISK);
    let r = dispatch(["normalize", "isotropic", "--domain", &s(&disk)]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.summary, "K = 2.000000");
}

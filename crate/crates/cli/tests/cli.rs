use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_helm-bem"))
}

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name)
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn tune_lists_six_and_marks_selection() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("spheres_contrast.json");
    let out = run(&["tune", "--scene", s.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.contains("6 configurations, selected: 32:P3_12"), "{text}");
    let marked: Vec<&str> = text.lines().filter(|l| l.starts_with('*')).collect();
    assert_eq!(marked.len(), 1);
    assert!(marked[0].contains("32:P3_12"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("tune.json")).unwrap()).unwrap();
    assert_eq!(json["selected"], "32:P3_12");
    assert_eq!(json["candidates"].as_array().unwrap().len(), 6);
}

#[test]
fn solve_writes_report_and_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("spheres.json");
    run(&[
        "solve", "--scene", s.to_str().unwrap(), "--subdiv", "1", "--mode", "ppm", "--out", dir.path().to_str().unwrap(),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["mode"], "ppm");
    assert_eq!(report["converged"], true);
    assert!(report["l2_error"].as_f64().unwrap() < 0.5);
    let iterations = report["iterations"].as_u64().unwrap() as usize;
    let residuals = fs::read_to_string(dir.path().join("residuals.csv")).unwrap();
    assert_eq!(residuals.lines().next(), Some("iteration,residual"));
    assert_eq!(residuals.lines().count(), iterations + 2);
}

#[test]
fn force_config_notation_and_json_agree() {
    let s = scene("spheres.json");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let json = r#"{"interfaces":[[2,3]],"patterns":[{"region":2,"pattern":"P3","reference":[1,2]}]}"#;
    for (dir, cfg) in [(&a, "23:P3_12"), (&b, json)] {
        run(&[
            "solve", "--scene", s.to_str().unwrap(), "--subdiv", "0", "--mode", "param", "--force-config", cfg, "--out",
            dir.path().to_str().unwrap(),
        ]);
    }
    let read = |d: &tempfile::TempDir| {
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(d.path().join("report.json")).unwrap()).unwrap();
        (v["config"].clone(), v["iterations"].clone())
    };
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&a).0, "23:P3_12");
}

#[test]
fn force_config_rejected_in_conventional_mode() {
    let s = scene("spheres.json");
    let out = bin()
        .args(["solve", "--scene", s.to_str().unwrap(), "--subdiv", "0", "--mode", "conventional"])
        .args(["--force-config", "32:P1", "--out", tempfile::tempdir().unwrap().path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn bad_force_config_fails() {
    let s = scene("spheres.json");
    let out = bin()
        .args(["solve", "--scene", s.to_str().unwrap(), "--subdiv", "0", "--force-config", "23:P9"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn spectrum_writes_csv_and_predicted_points() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("spheres_low.json");
    run(&["spectrum", "--scene", s.to_str().unwrap(), "--subdiv", "0", "--out", dir.path().to_str().unwrap()]);
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("re,im"));
    // 20 + 20 triangles, two unknowns each
    assert_eq!(csv.lines().count(), 81);
    let clusters: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("clusters.json")).unwrap()).unwrap();
    let mut re: Vec<f64> = clusters["predicted"].as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect();
    re.sort_by(f64::total_cmp);
    assert!((re[0] + 0.75).abs() < 1e-9 && (re[1] + 0.416_666_666_7).abs() < 1e-9, "{re:?}");
}

#[test]
fn jacobi_spectrum_predicts_one() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("spheres_low.json");
    run(&[
        "spectrum", "--scene", s.to_str().unwrap(), "--subdiv", "0", "--mode", "jacobi", "--out", dir.path().to_str().unwrap(),
    ]);
    let clusters: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("clusters.json")).unwrap()).unwrap();
    let pts = clusters["predicted"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    assert!((pts[0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn sweep_csv_rows_and_links() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("spheres.json");
    let out = run(&[
        "sweep", "--scene", s.to_str().unwrap(), "--subdiv", "0", "--param", "eps3", "--from", "2", "--to", "4", "--steps",
        "2", "--link", "2:-1", "--modes", "calderon,ppm", "--out", dir.path().to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4, "{csv}\n{}", stdout(&out));
    assert!(rows[0].starts_with("2,calderon,"));
    assert!(rows[3].starts_with("4,ppm,"));
    assert!(rows.iter().all(|r| r.split(',').nth(3) == Some("true")));
}

#[test]
fn sweep_is_deterministic_apart_from_timing() {
    let s = scene("spheres.json");
    let strip = |csv: String| -> Vec<String> {
        csv.lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(6);
                f.join(",")
            })
            .collect()
    };
    let mut outs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        run(&[
            "sweep", "--scene", s.to_str().unwrap(), "--subdiv", "0", "--param", "omega", "--values", "1,2", "--modes",
            "conventional,jacobi", "--out", dir.path().to_str().unwrap(),
        ]);
        outs.push(strip(fs::read_to_string(dir.path().join("sweep.csv")).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn empty_sweep_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("spheres.json");
    run(&[
        "sweep", "--scene", s.to_str().unwrap(), "--param", "omega", "--from", "1", "--to", "2", "--steps", "0", "--out",
        dir.path().to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn mesh_writes_one_file_per_interface() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("two_cuboids.json");
    run(&["mesh", "--scene", s.to_str().unwrap(), "--subdiv", "0", "--out", dir.path().to_str().unwrap()]);
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["mesh_0_1_2.json", "mesh_1_1_3.json", "mesh_2_3_2.json"]);
    let text = fs::read_to_string(dir.path().join("mesh_0_1_2.json")).unwrap();
    assert!(helm_bem_core::TriangleMesh::from_json_str(&text).is_ok());
}

#[test]
fn oracle_reads_points_file() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    fs::write(&pts, "x,y,z\n0,0,3\n0.7,0,0\n").unwrap();
    let s = scene("spheres.json");
    let out = run(&["oracle", "--scene", s.to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,z,re,im");
    assert_eq!(lines.len(), 3);
    let v: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
    assert!((v[3] * v[3] + v[4] * v[4]).sqrt() < 3.0);
}

#[test]
fn oracle_rejects_non_sphere_scene() {
    let s = scene("two_cuboids.json");
    let out = bin()
        .args(["oracle", "--scene", s.to_str().unwrap()])
        .stdin(std::process::Stdio::null())
        .output()
        .unwrap();
    assert!(!out.status.success());
}

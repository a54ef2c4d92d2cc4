use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn djspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_djspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn circuit(e_c_int: Option<f64>, lambda: f64) -> String {
    let internal = e_c_int.map_or(String::new(), |e| format!("E_C_int = {e}\n"));
    format!("[circuit]\nE_C = 0.2\n{internal}lambda = {lambda}\nE_J_Sigma = 40.0\n")
}

/// Header names and numeric rows of a CSV on standard output.
fn table(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i]).collect()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn excitation(v: &serde_json::Value, i: usize) -> f64 {
    v["excitations"][i].as_f64().unwrap()
}

#[test]
fn thread_count_leaves_files_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &circuit(Some(1.25), 0.9));
    let cfg = cfg.to_str().unwrap();
    for args in [
        vec!["study", "--study", "fig4a"],
        vec![
            "dispersion",
            "--model",
            "bo-numeric",
            "--points",
            "9",
            "--config",
            cfg,
        ],
    ] {
        let mut files = Vec::new();
        for threads in ["1", "2"] {
            let path = dir.path().join(format!("out_{threads}.csv"));
            let mut full = args.clone();
            full.extend(["--threads", threads, "--out", path.to_str().unwrap()]);
            let out = djspec(&full);
            assert!(
                out.status.success(),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
            files.push(std::fs::read(&path).unwrap());
        }
        assert!(!files[0].is_empty());
        assert_eq!(files[0], files[1], "{args:?}");
    }
}

#[test]
fn full_and_classical_qubit_frequencies_differ_by_about_300_mhz() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &circuit(Some(1.25), 1.0));
    let cfg = cfg.to_str().unwrap();
    let full = json(&djspec(&[
        "spectrum", "--config", cfg, "--model", "full", "--levels", "8",
    ]));
    let classical = json(&djspec(&[
        "spectrum",
        "--config",
        cfg,
        "--model",
        "classical",
        "--levels",
        "8",
    ]));
    let gap = excitation(&classical, 1) - excitation(&full, 1);
    assert!((0.2..0.4).contains(&gap), "E01 gap {gap}");
    assert_eq!(full["labels"][1]["kind"], "qubit");
    assert!(full["n_cut_used"].as_u64().unwrap() >= 15);
    assert_eq!(full["params"]["e_c_int"].as_f64().unwrap(), 1.25);
}

#[test]
fn classical_model_needs_no_internal_charging_energy() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &circuit(None, 0.9));
    let cfg = cfg.to_str().unwrap();
    let out = djspec(&[
        "spectrum",
        "--config",
        cfg,
        "--model",
        "classical",
        "--levels",
        "3",
    ]);
    assert_eq!(json(&out)["eigenvalues"].as_array().unwrap().len(), 3);
    let out = djspec(&["spectrum", "--config", cfg, "--model", "bo-analytic"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E_C_int"));
}

#[test]
fn too_many_levels_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &circuit(Some(1.25), 1.0));
    let out = djspec(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--model",
        "classical",
        "--levels",
        "500",
        "--ncut",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_study_lists_the_valid_ids() {
    let out = djspec(&["study", "--study", "fig9z"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for id in ["fig1d", "fig3a", "fig5d", "figA2"] {
        assert!(err.contains(id), "{err}");
    }
}

#[test]
fn bad_inputs_exit_with_code_2() {
    let dir = TempDir::new().unwrap();
    let good = write_config(dir.path(), "good.toml", &circuit(Some(1.25), 1.0));
    let mixed = write_config(dir.path(), "mixed.toml", "[circuit]\nE_C = 0.2\nC = 90.0\n");
    let cases: Vec<Vec<&str>> = vec![
        vec!["spectrum", "--config", mixed.to_str().unwrap()],
        vec![
            "spectrum",
            "--config",
            good.to_str().unwrap(),
            "--tol",
            "0.5",
        ],
        vec![
            "spectrum",
            "--config",
            good.to_str().unwrap(),
            "--model",
            "nope",
        ],
        vec!["spectrum", "--config", "/nonexistent/config.toml"],
        vec!["spectrum"],
        vec!["study", "--study", "fig1d", "--threads", "0"],
        vec![
            "harmonics",
            "--config",
            good.to_str().unwrap(),
            "--model",
            "full",
        ],
        vec![
            "dispersion",
            "--config",
            good.to_str().unwrap(),
            "--points",
            "1",
        ],
    ];
    for args in cases {
        let out = djspec(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn study_csv_follows_the_schema() {
    let (header, rows) = table(&djspec(&["study", "--study", "fig1d"]));
    assert_eq!(header, ["lambda", "U2_ratio", "U3_ratio", "U4_ratio"]);
    assert_eq!(rows.len(), 20);
    let text = String::from_utf8(djspec(&["study", "--study", "fig1d"]).stdout).unwrap();
    let first = text.lines().nth(1).unwrap();
    // 12 significant digits in scientific notation
    assert!(first
        .split(',')
        .all(|v| v.split('e').next().unwrap().len() >= 13));
}

#[test]
fn correction_curve_is_bo_minus_classical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &circuit(Some(1.25), 1.0));
    let (h, rows) = table(&djspec(&[
        "potentials",
        "--config",
        cfg.to_str().unwrap(),
        "--which",
        "classical,bo,corr",
    ]));
    assert_eq!(h, ["phi", "classical", "bo", "corr"]);
    assert_eq!(rows.len(), 256);
    let (c, b, k) = (
        column(&h, &rows, "classical"),
        column(&h, &rows, "bo"),
        column(&h, &rows, "corr"),
    );
    for i in 0..rows.len() {
        assert!((b[i] - c[i] - k[i]).abs() < 1e-10, "row {i}");
    }
}

#[test]
fn extremal_lines_follow_the_classical_potential() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &circuit(Some(1.25), 0.9));
    let (h, rows) = table(&djspec(&[
        "potentials",
        "--config",
        cfg.to_str().unwrap(),
        "--which",
        "u_prime_minmax,classical",
    ]));
    let (c, lo, hi) = (
        column(&h, &rows, "classical"),
        column(&h, &rows, "u_prime_min"),
        column(&h, &rows, "u_prime_max"),
    );
    for i in 0..rows.len() {
        assert!(
            (lo[i] - c[i]).abs() < 1e-9 && (hi[i] + c[i]).abs() < 1e-9,
            "row {i}"
        );
    }
}

#[test]
fn dispersion_potential_shrinks_with_internal_ratio() {
    let dir = TempDir::new().unwrap();
    let curves: Vec<(Vec<f64>, Vec<f64>)> = [8.0, 16.0, 32.0]
        .iter()
        .map(|r| {
            let cfg = write_config(dir.path(), "c.toml", &circuit(Some(40.0 / r), 1.0));
            let (h, rows) = table(&djspec(&[
                "potentials",
                "--config",
                cfg.to_str().unwrap(),
                "--which",
                "u_disp",
            ]));
            (column(&h, &rows, "phi"), column(&h, &rows, "u_disp"))
        })
        .collect();
    let phi = &curves[0].0;
    for i in (0..phi.len()).filter(|&i| phi[i].abs() < std::f64::consts::PI) {
        assert!(
            curves[0].1[i] > curves[1].1[i] && curves[1].1[i] > curves[2].1[i],
            "φ = {}",
            phi[i]
        );
    }
}

#[test]
fn harmonics_and_dispersion_commands() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &circuit(Some(5.0), 1.0));
    let cfg = cfg.to_str().unwrap();
    let (h, rows) = table(&djspec(&[
        "harmonics",
        "--config",
        cfg,
        "--model",
        "classical",
    ]));
    assert_eq!(h, ["m", "U_m", "U_m_over_abs_U1"]);
    let ratio = column(&h, &rows, "U_m_over_abs_U1");
    assert!((ratio[1].abs() - 0.2).abs() < 2e-3);
    let (h, rows) = table(&djspec(&[
        "dispersion",
        "--config",
        cfg,
        "--model",
        "fast-only",
        "--points",
        "5",
    ]));
    assert_eq!(h, ["Ng", "E0"]);
    let e0 = column(&h, &rows, "E0");
    assert!((e0[0] - e0[4]).abs() < 1e-10 && (e0[1] - e0[3]).abs() < 1e-10);
    assert!(e0[2] > e0[0]);
}

#[test]
fn json_format_for_tables() {
    let v = json(&djspec(&["study", "--study", "fig1d", "--format", "json"]));
    assert_eq!(v["id"], "fig1d");
    assert_eq!(v["columns"][0]["name"], "lambda");
    assert_eq!(v["provenance"].as_array().unwrap().len(), 20);
}

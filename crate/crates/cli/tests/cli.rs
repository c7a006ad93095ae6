use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pdm_core::mass::{self, MassKind, MassProfile};
use pdm_core::oracle::GridSpec;
use serde_json::Value;

fn pdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdm")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>, Vec<String>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let mut rows = Vec::new();
    let mut comments = Vec::new();
    for l in lines {
        if l.starts_with('#') {
            comments.push(l.to_string());
        } else {
            rows.push(l.split(',').map(|f| f.parse().unwrap()).collect());
        }
    }
    (header, rows, comments)
}

#[test]
fn families_lists_all_thirteen() {
    let o = pdm(&["families"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,g_map,complex,parameters,reference_params,bound_levels");
    assert_eq!(lines.len(), 14);
    assert!(lines.iter().any(|l| l.starts_with("H_OSC,H_LINEAR,false,omega,")));

    let o = pdm(&["families", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 13);
}

#[test]
fn eval_harmonic_constant_mass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let o = pdm(&[
        "eval",
        "--family",
        "H_OSC",
        "--mass",
        "constant",
        "--omega",
        "1",
        "--levels",
        "0..3",
        "--grid",
        "-12:12:4001",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows, comments) = read_csv(&out);
    assert_eq!(header, ["x", "V", "Vm", "psi0", "psi1", "psi2", "psi3"]);
    assert_eq!(rows.len(), 4001);
    assert!(comments.is_empty());
    // Interior grid points: h = 24/4002.
    let h = GridSpec::new(-12.0, 12.0, 4001).unwrap().h();
    assert!((rows[1][0] - rows[0][0] - h).abs() < 1e-12);
    for r in &rows {
        assert!((r[1] - (-0.5 + 0.5 * r[0] * r[0])).abs() <= 1e-12 * (1.0 + r[1].abs()));
        assert_eq!(r[2], 0.0);
    }
    for k in 3..7 {
        let norm = h * rows.iter().map(|r| r[k] * r[k]).sum::<f64>();
        assert!((norm - 1.0).abs() <= 1e-6, "psi{} norm {norm}", k - 3);
    }
}

#[test]
fn eval_omits_points_outside_the_domain() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o =
        pdm(&["eval", "--family", "L_COULOMB", "--levels", "0", "--grid", "-1:5:61", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows, comments) = read_csv(&out);
    // Points with x ≤ 0 lie outside μ > 0.
    let outside = GridSpec::new(-1.0, 5.0, 61).unwrap().points().iter().filter(|&&x| x <= 0.0).count();
    assert!(outside > 0);
    assert_eq!(rows.len(), 61 - outside);
    assert!(rows.iter().all(|r| r[0] > 0.0));
    assert_eq!(comments, [format!("# omitted {outside} singular rows")]);
    assert!(String::from_utf8_lossy(&o.stderr).contains(&format!("omitted {outside}")));
}

#[test]
fn eval_rejects_unbound_levels() {
    let o = pdm(&["eval", "--family", "J2_ECKART", "--s", "2", "--lambda", "10", "--levels", "0..3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_harmonic_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = pdm(&[
        "verify",
        "--family",
        "H_OSC",
        "--mass",
        "constant",
        "--omega",
        "1",
        "--levels",
        "0..3",
        "--points",
        "4000",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 4);
    let mut expected_keys = vec![
        "family",
        "params_digest",
        "n",
        "e_analytic",
        "e_numeric",
        "abs_err",
        "rel_err",
        "residual_norm",
        "nodes_expected",
        "nodes_found",
        "orthogonality_max",
        "grid",
        "convergence_order",
    ];
    expected_keys.sort();
    for (n, r) in reports.iter().enumerate() {
        let mut keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, expected_keys);
        assert_eq!(r["n"], n);
        assert!(r["rel_err"].as_f64().unwrap() <= 1e-3);
        assert_eq!(r["nodes_found"], n);
    }
}

#[test]
fn verify_reports_level_errors_without_aborting() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = pdm(&[
        "verify",
        "--family",
        "J2_ECKART",
        "--s",
        "2",
        "--lambda",
        "10",
        "--levels",
        "0..3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for n in 0..2 {
        assert!(entries[n].get("e_numeric").is_some(), "{}", entries[n]);
        assert!(entries[n].get("error").is_none());
    }
    for n in 2..4 {
        assert_eq!(entries[n]["n"], n);
        assert!(entries[n]["error"].as_str().unwrap().contains("not a bound level"));
    }
}

#[test]
fn verify_refine_reports_convergence_order() {
    let o = pdm(&["verify", "--family", "H_OSC", "--levels", "0..1", "--points", "1000", "--refine"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for r in v.as_array().unwrap() {
        let p = r["convergence_order"].as_f64().unwrap();
        assert!((p - 2.0).abs() < 0.2, "{p}");
    }
}

#[test]
fn figure_files() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = dir.path().join("f1.csv");
    assert_eq!(code(&pdm(&["figure", "--id", "fig1a", "--out", f1.to_str().unwrap()])), 0);
    let text = fs::read_to_string(&f1).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,Vm_b1,Vm_b2,Vm_b3");
    let (_, rows, _) = read_csv(&f1);
    assert_eq!(rows.len(), 1001);
    let origin = &rows[500];
    assert_eq!(origin[0], 0.0);
    let closed = mass::vm_closed_eval(&MassProfile::new(MassKind::RationalSquare, 0.5).unwrap(), 0.0).unwrap();
    assert!((origin[1] - closed).abs() < 1e-12 * closed.abs());
    assert!((closed - 2.0).abs() < 1e-12);

    let f3 = dir.path().join("f3.csv");
    assert_eq!(code(&pdm(&["figure", "--id", "fig3", "--out", f3.to_str().unwrap()])), 0);
    let (_, rows, _) = read_csv(&f3);
    assert_eq!((rows[0][0], rows[1000][0]), (-10.0, 10.0));
    assert!(rows.iter().all(|r| r[1..].iter().all(|&v| v <= 0.0)));

    assert_eq!(code(&pdm(&["figure", "--id", "fig7"])), 2);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = pdm(&[
            "eval",
            "--family",
            "J1_SCARF2",
            "--mass",
            "rational_square",
            "--b",
            "0.5",
            "--levels",
            "0..2",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"mass":"inverse_quadratic","b":2.0,"range":"-1:1","points":5}"#).unwrap();
    let o = pdm(&["vm", "--config", cfg.to_str().unwrap(), "--b", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    let p = MassProfile::new(MassKind::InverseQuadratic, 4.0).unwrap();
    for r in rows {
        assert!((r[1] - mass::vm_closed_eval(&p, r[0]).unwrap()).abs() < 1e-12);
    }

    fs::write(&cfg, r#"{"mass":"inverse_quadratic","bee":2.0}"#).unwrap();
    assert_eq!(code(&pdm(&["vm", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&pdm(&["vm", "--config", dir.path().join("missing.json").to_str().unwrap()])), 2);
}

#[test]
fn invalid_values_exit_with_config_status() {
    assert_eq!(code(&pdm(&["eval", "--family", "NOT_A_FAMILY"])), 2);
    assert_eq!(code(&pdm(&["vm", "--mass", "rational_square", "--b", "-1"])), 2);
    assert_eq!(code(&pdm(&["vm", "--mass", "exp_abs", "--b", "1", "--range", "1:-1"])), 2);
    assert_eq!(code(&pdm(&["ordering", "--alpha", "0", "--beta", "0", "--gamma", "0", "--mass", "constant"])), 2);
    assert_eq!(code(&pdm(&["verify", "--family", "H_OSC", "--format", "csv"])), 2);
}

#[test]
fn ordering_flags_the_bendaniel_duke_discrepancy() {
    let o = pdm(&[
        "ordering",
        "--alpha",
        "0",
        "--beta",
        "-1",
        "--gamma",
        "0",
        "--mass",
        "inverse_quadratic",
        "--b",
        "2",
        "--range",
        "-2:2",
        "--points",
        "11",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,printed,oracle,expanded,flagged");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert!(r[2].parse::<f64>().unwrap().abs() < 1e-10);
        assert_eq!(r[4], "true");
    }
    assert!(String::from_utf8_lossy(&o.stderr).contains("disagrees"));

    let o =
        pdm(&["ordering", "--alpha", "-0.5", "--beta", "0", "--gamma", "-0.5", "--mass", "constant", "--points", "5"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().lines().skip(1).all(|l| l.ends_with(",false")));
}

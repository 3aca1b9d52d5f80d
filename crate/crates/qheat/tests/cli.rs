//! End-to-end checks of the `qheat` binary: exit codes, output contracts,
//! determinism across worker counts.

use std::process::Command;

fn qheat() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qheat"))
}

const TINY_SWEEP: &str = "\
[qubit]
omega0_ghz = 6.0
g_ghz = 1.0

[drive]
kind = tanh_cosine
a = 8.0
sweep = f_l
f_min_ghz = 6.0
f_max_ghz = 6.3
points = 7

[bath]
kappa = 0.01
t_mk = 70.0
dephasing = off

[integrator]
steps_per_cycle = 1024
tol = 1e-9
max_cycles = 4000
";

fn write_config(dir: &tempfile::TempDir, text: &str) -> std::path::PathBuf {
    let path = dir.path().join("config.ini");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn predict_prints_the_resonance_tables() {
    let out = qheat().args(["predict", "fig1c"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("6.162278"), "{text}");
    assert!(text.contains("3.081139"), "{text}");
    assert!(text.contains("2.054093"), "{text}");
    // asymmetric table with dt2 = pi/omega2
    assert!(text.contains("6.158004"), "{text}");
}

#[test]
fn unknown_flag_exits_1_with_usage() {
    let out = qheat()
        .args(["sweep", "fig1c", "--bogus"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.to_lowercase().contains("usage"), "{err}");
}

#[test]
fn invalid_config_exits_1_with_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, &TINY_SWEEP.replace("kappa = 0.01", "kappa = -1"));
    let out = qheat()
        .args(["sweep", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("kappa"), "{err}");
}

#[test]
fn missing_config_file_exits_1() {
    let out = qheat()
        .args(["predict", "/no/such/file.ini"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_writes_the_exact_csv_and_is_worker_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, TINY_SWEEP);
    let out1 = dir.path().join("w1.csv");
    let out4 = dir.path().join("w4.csv");
    let run = |workers: &str, out: &std::path::Path| {
        let status = qheat()
            .args([
                "sweep",
                path.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--workers",
                workers,
            ])
            .status()
            .unwrap();
        assert!(status.success());
    };
    run("1", &out1);
    run("4", &out4);
    let csv1 = std::fs::read(&out1).unwrap();
    let csv4 = std::fs::read(&out4).unwrap();
    assert_eq!(
        csv1, csv4,
        "CSV must be byte-identical across worker counts"
    );
    let text = String::from_utf8(csv1).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "f_L_GHz,dt1_ns,P_total_fW,P1_fW,P2_fW,P_dimensionless,rho_ee_p,winding,purity_min,converged,cycles"
    );
    assert_eq!(lines.count(), 7);
    assert!(!text.contains("NaN"));
}

#[test]
fn trajectory_at_the_third_resonance_reports_winding_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let status = qheat()
        .args([
            "trajectory",
            "fig1c",
            "--f-ghz",
            "2.054092553389460",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "t_ns,lab_x,lab_y,lab_z,two_r,two_i,two_d,purity,winding"
    );
    let winding_col = header.split(',').position(|c| c == "winding").unwrap();
    for line in lines {
        assert_eq!(line.split(',').nth(winding_col).unwrap(), "3");
    }
}

#[test]
fn analytic_compare_exit_codes() {
    // near-square drive: numeric and map agree within tolerance
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(&dir, &TINY_SWEEP.replace("a = 8.0", "a = 30.0"));
    let out = qheat()
        .args(["analytic-compare", good.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // strong coupling breaks the linearized map: exit 3
    let bad = write_config(
        &dir,
        &TINY_SWEEP
            .replace("a = 8.0", "a = 30.0")
            .replace("kappa = 0.01", "kappa = 0.3"),
    );
    let out = qheat()
        .args(["analytic-compare", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn amplitude_study_runs_a_tiny_study() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{TINY_SWEEP}\n[study]\nvariable = a\nvalues = 8.0\norders = 1\nwindow_pct = 0.5\nwindow_points = 3\n"
    );
    let path = write_config(&dir, &text);
    let out = qheat()
        .args(["amplitude-study", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "variable_value,n,f_at_max_GHz,P_max_fW"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("8,1,"), "{row}");
}

#[test]
fn amplitude_study_needs_a_study_block() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, TINY_SWEEP);
    let out = qheat()
        .args(["amplitude-study", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("study"), "{err}");
}

mod common;

use std::path::Path;
use std::process::{Command, Output};

use casimir_core::report::{parse_csv, CsvRecord};
use common::{configs_dir, rel};

const IDEAL: &str = r#"
[plate.left]
type = "phase"
rp = 1.0
rs = -1.0

[plate.right]
type = "phase"
rp = 1.0
rs = -1.0

[[layer]]
thickness = 1e-6
material = { type = "vacuum" }
"#;

fn casimir(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_casimir"));
    cmd.args(args).env_remove("CASIMIR_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn shipped(name: &str) -> String {
    configs_dir().join(name).to_string_lossy().into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<CsvRecord> {
    parse_csv(&stdout(o)).unwrap()
}

fn value(r: &CsvRecord, i: usize) -> f64 {
    r.values[i].expect("numeric field")
}

#[test]
fn compute_ideal_table() {
    let o = casimir(&["compute", "--config", &shipped("ideal.toml")], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("-4.3337"), "{out}");
    assert!(out.contains("1.3001"), "{out}");
    assert!(out.contains("J/m^2") && out.contains("N/m^2"));
    assert!(out.contains("estimated relative error") && out.contains("integrand evaluations"));
}

#[test]
fn transparent_plates_give_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let text = IDEAL.replace("rp = 1.0", "rp = 0.0").replace("rs = -1.0", "rs = 0.0");
    let cfg = write_config(dir.path(), "clear.toml", &text);
    let o = casimir(&["compute", "--config", &cfg, "--format", "csv"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 1);
    for i in 1..5 {
        assert_eq!(value(&rows[0], i), 0.0);
    }
}

#[test]
fn two_medium_debug_path_agrees() {
    let cfg = shipped("two_medium.toml");
    let general = csv_rows(&casimir(&["compute", "--config", &cfg, "--format", "csv"], &[]));
    let direct = csv_rows(&casimir(&["compute", "--config", &cfg, "--format", "csv", "--debug-n2-path"], &[]));
    for i in 1..5 {
        assert!(rel(value(&general[0], i), value(&direct[0], i)) < 1e-12);
    }
}

#[test]
fn debug_path_rejects_other_layer_counts() {
    let o = casimir(&["compute", "--config", &shipped("ideal.toml"), "--debug-n2-path"], &[]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("n = 2"));
}

#[test]
fn ideal_sweep_scales_as_inverse_cube() {
    let o = casimir(&["sweep", "--config", &shipped("ideal_sweep.toml")], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("target_m,E_Jm2,FL_Nm2,FR_Nm2,FS_Nm2,err_rel\n"));
    let rows = csv_rows(&o);
    let e: Vec<f64> = rows.iter().map(|r| value(r, 1)).collect();
    assert_eq!(rows.iter().map(|r| value(r, 0)).collect::<Vec<_>>(), vec![0.5e-6, 1e-6, 2e-6]);
    assert!(rel(e[0] / e[1], 8.0) < 1e-3);
    assert!(rel(e[2] / e[1], 0.125) < 1e-3);
}

#[test]
fn single_value_sweep_matches_compute() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{IDEAL}\n[task]\nkind = \"sweep\"\ntarget = \"d1\"\nvalues = [1e-6]\n");
    let cfg = write_config(dir.path(), "one.toml", &text);
    let sweep = casimir(&["sweep", "--config", &cfg, "--format", "csv"], &[]);
    let compute = casimir(&["compute", "--config", &cfg, "--format", "csv"], &[]);
    assert_eq!(sweep.status.code(), Some(0));
    assert_eq!(stdout(&sweep), stdout(&compute));
}

#[test]
fn asymmetric_sweep_has_unequal_plate_forces() {
    let o = casimir(&["sweep", "--config", &shipped("asymmetric_sweep.toml")], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!(rel(value(r, 2).abs(), value(r, 3).abs()) > 1e-3);
    }
}

#[test]
fn failed_rows_do_not_stop_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{IDEAL}\n[quadrature]\nrel_tol = 1e-12\nmax_levels = 4\n\n[task]\nkind = \"sweep\"\ntarget = \"d1\"\nvalues = [1e-6, 2e-6]\n"
    );
    let cfg = write_config(dir.path(), "tight.toml", &text);
    let o = casimir(&["sweep", "--config", &cfg, "--format", "csv"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert!(r.values[1].is_none());
        assert!(r.error.as_deref().unwrap().contains("did not converge"));
    }
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn non_convergence_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "nc.toml", &format!("{IDEAL}\n[quadrature]\nrel_tol = 1e-12\nmax_levels = 4\n"));
    let o = casimir(&["compute", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("did not converge"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn config_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", &IDEAL.replace("thickness = 1e-6", "thickness = -1e-6"));
    let o = casimir(&["compute", "--config", &bad], &[]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("layer[1].thickness"), "{}", stderr(&o));

    let o = casimir(&["compute", "--config", "/nonexistent/x.toml"], &[]);
    assert_eq!(o.status.code(), Some(4));

    let o = casimir(&["compute", "--config", &shipped("ideal.toml"), "--rel-tol", "0.5"], &[]);
    assert_eq!(o.status.code(), Some(4));

    let o = casimir(&["compute", "--config", &shipped("ideal.toml")], &[("CASIMIR_THREADS", "0")]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn check_default_passes() {
    let o = casimir(&["check", "--config", &shipped("default.toml")], &[]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    for name in [
        "a_identity",
        "a_symmetry",
        "factorization",
        "force_energy_fd",
        "sum_rule",
        "mirror_identity",
        "lifshitz_reduction",
        "ideal_casimir",
    ] {
        assert!(out.contains(&format!("PASS {name}")), "{out}");
    }
}

#[test]
fn check_with_loose_tolerance_skips_finite_differences() {
    let o = casimir(&["check", "--config", &shipped("default.toml"), "--rel-tol", "1e-2"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("SKIP force_energy_fd"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = casimir(
        &["sweep", "--config", &shipped("ideal_sweep.toml"), "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(parse_csv(&text).unwrap().len(), 3);
}

#[test]
fn thread_count_does_not_change_output() {
    let cfg = shipped("asymmetric_sweep.toml");
    let one = casimir(&["sweep", "--config", &cfg], &[("CASIMIR_THREADS", "1")]);
    let eight = casimir(&["sweep", "--config", &cfg], &[("CASIMIR_THREADS", "8")]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, eight.stdout);
}

use std::path::Path;
use std::process::{Command, Output};

use casimir::dielectric::{drude_eps_real_axis, DrudeParams, OpticalTable};

fn casimir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(args)
        .env_remove("CASIMIR_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows (after the header and column line) split into fields.
fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn column_line(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

fn write_drude_optics(path: &Path) {
    let p = DrudeParams::new(1.372e16, 4.060e13).unwrap();
    let t = OpticalTable::sample_log_uniform(3.8e13, 9.4e14, 40, |w| drude_eps_real_axis(&p, w)).unwrap();
    let mut text = String::from("omega_rad_s,eps_re,eps_im\n");
    for s in t.samples() {
        text.push_str(&format!("{:e},{:e},{:e}\n", s.omega, s.eps.re, s.eps.im));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn epsilon_example() {
    let o = casimir(&["epsilon", "--material", "au-limit", "--zeta-min", "1e13", "--zeta-max", "1e17", "--points", "100"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(column_line(&out), "zeta_rad_s,eps");
    let r = rows(&out);
    assert_eq!(r.len(), 100);
    assert_eq!((r[0][0], r[99][0]), (1e13, 1e17));
    assert!(r.windows(2).all(|w| w[1][1] < w[0][1] && w[1][1] > 1.0));
}

#[test]
fn check_drude_example_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let optics = dir.path().join("optics.csv");
    write_drude_optics(&optics);
    let o = casimir(&["check-drude", "--input", optics.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(column_line(&out), "omega_rad_s,rho_ohm_m");
    let rho: Vec<f64> = rows(&out).iter().map(|r| r[1]).collect();
    let (lo, hi) = rho.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
    assert!(hi / lo - 1.0 < 1e-12);
}

#[test]
fn force_example() {
    let o = casimir(&[
        "force", "--preset", "paper-upper-limit", "--geometry", "sphere-plate", "--radius", "100um", "--a-min",
        "100nm", "--a-max", "900nm",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("# mode: "));
    assert_eq!(column_line(&out), "a_m,force_N,n_terms,tail_estimate");
    let r = rows(&out);
    assert_eq!(r.len(), 9);
    assert_eq!((r[0][0], r[8][0]), (1e-7, 9e-7));
    assert!(r.windows(2).all(|w| w[1][1] < w[0][1] && w[1][1] > 0.0));
}

#[test]
fn fit_recovers_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let optics = dir.path().join("optics.csv");
    write_drude_optics(&optics);
    let o = casimir(&["fit", "--input", optics.to_str().unwrap()]);
    assert!(o.status.success());
    let r = &stdout(&o);
    let fields: Vec<&str> = r.lines().last().unwrap().split(',').collect();
    let wp: f64 = fields[0].parse().unwrap();
    let wt: f64 = fields[2].parse().unwrap();
    assert!((wp / 1.372e16 - 1.0).abs() < 1e-6 && (wt / 4.060e13 - 1.0).abs() < 1e-6);
    assert_eq!(*fields.last().unwrap(), "uniform");
}

#[test]
fn residual_with_shift() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    std::fs::write(&data, "# units: nm,pN\na,force\n100,120\n150,40\n200,18\n").unwrap();
    let o = casimir(&["residual", "--data", data.to_str().unwrap(), "--preset", "paper-upper-limit", "--shift", "16nm"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let r = rows(&out);
    assert_eq!(r.len(), 3);
    assert_eq!(r[0][0], 1e-7 + 16e-9);
    for row in &r {
        assert_eq!(row[3], row[1] - row[2]);
    }
}

#[test]
fn sweep_zero_delta() {
    let o = casimir(&["sweep", "--preset", "paper-upper-limit", "--parameter", "top.omega_p", "--deltas", "0,0.1", "--a", "100nm"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 2);
    assert_eq!(r[0][4], 0.0);
    assert!(r[1][4] > 0.0);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| casimir(args).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["epsilon", "--material", "unobtainium"]), 2);
    assert_eq!(code(&["force", "--material", "au-limit", "--a", "-5nm"]), 2);
    assert_eq!(code(&["force", "--material", "au-limit", "--radius", "1um", "--a", "100nm"]), 2);
    assert_eq!(code(&["force", "--material", "au-limit", "--temperature", "0.001K", "--a", "100nm"]), 3);
    assert_eq!(code(&["check-drude", "--input", "/nonexistent/optics.csv"]), 4);
    assert_eq!(code(&["-o", "/nonexistent/dir/out.csv", "epsilon", "--material", "au-limit"]), 4);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(["epsilon", "--material", "al-limit", "--points", "5"])
        .env("CASIMIR_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(dir.path().join("epsilon.csv")).unwrap();
    assert_eq!(rows(&written).len(), 5);

    // An explicit path wins over the environment.
    let explicit = dir.path().join("mine.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(["-o", explicit.to_str().unwrap(), "epsilon", "--material", "al-limit", "--points", "5"])
        .env("CASIMIR_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(explicit).unwrap(), written);
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# Au run\nmaterial = au-limit\ntemperature = 77K\na = 150nm,300nm\n").unwrap();
    let from_file = casimir(&["--config", conf.to_str().unwrap(), "force"]);
    let from_flags = casimir(&["force", "--material", "au-limit", "--temperature", "77K", "--a", "150nm,300nm"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, from_flags.stdout);

    // Command-line flags override the file.
    let overridden = casimir(&["--config", conf.to_str().unwrap(), "force", "--temperature", "300K"]);
    assert_ne!(overridden.stdout, from_flags.stdout);
}

#[test]
fn reruns_are_byte_identical_without_timestamp() {
    let args = ["force", "--preset", "paper-upper-limit", "--a", "100nm,200nm", "--mode", "integral"];
    let (a, b) = (casimir(&args), casimir(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("generated_unix"));

    let mut stamped = vec!["--timestamp"];
    stamped.extend(args);
    let s = stdout(&casimir(&stamped));
    assert!(s.lines().any(|l| l.starts_with("# generated_unix: ")));
    let body = |t: &str| t.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&s), body(&stdout(&a)));
}

#[test]
fn roughness_profile_changes_force() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("rough.csv");
    std::fs::write(&profile, "height_m,weight\n-5e-9,0.25\n0,0.5\n5e-9,0.25\n").unwrap();
    let flat = rows(&stdout(&casimir(&["force", "--material", "au-limit", "--a", "200nm"])));
    let o = casimir(&["force", "--material", "au-limit", "--a", "200nm", "--roughness", profile.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("stand-in"));
    let rough = rows(&out);
    assert!(rough[0][1] > flat[0][1]);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dimerchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimerchain")).args(args).output().expect("binary runs")
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn error_line(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<&str> = stderr.lines().collect();
    assert_eq!(lines.len(), 1, "stderr: {stderr}");
    serde_json::from_str(lines[0]).unwrap()
}

#[test]
fn spectrum_of_weak_centre_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res =
        dimerchain(&["spectrum", "--family", "a", "--sites", "101", "--strong", "8", "--weak", "0.2", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = csv_rows(&dir.path().join("spectrum.csv"));
    assert_eq!(header, ["n", "energy", "parity", "ipr", "peak_site", "peak_amp", "band_label"]);
    assert_eq!(rows.len(), 101);
    let (e, label) = (column(&header, "energy"), column(&header, "band_label"));
    let energies: Vec<f64> = rows.iter().map(|r| r[e].parse().unwrap()).collect();
    assert_eq!(energies.iter().filter(|x| x.abs() < 1e-10).count(), 1);
    assert_eq!(rows.iter().filter(|r| r[label] == "in_gap").count(), 1);
    for x in energies.iter().filter(|x| x.abs() > 1e-10) {
        assert!((x.abs() - 8.0).abs() <= 0.2 + 1e-9, "{x}");
    }
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn disorder_keeps_end_sites_peaked() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = dimerchain(&[
        "disorder",
        "--family",
        "b",
        "--sites",
        "101",
        "--disorder",
        "1.0",
        "--realizations",
        "100",
        "--seed",
        "7",
        "--out",
        out,
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = csv_rows(&dir.path().join("disorder.csv"));
    let (site, rho) = (column(&header, "site"), column(&header, "rho_bar"));
    for end in ["-50", "50"] {
        let row = rows.iter().find(|r| r[site] == end).unwrap();
        let v: f64 = row[rho].parse().unwrap();
        assert!(v >= 0.95, "site {end}: {v}");
    }
}

#[test]
fn pst_scan_finds_mirroring_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = dimerchain(&["pst", "--family", "b", "--sites", "21", "--ratio", "5", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = csv_rows(&dir.path().join("pst_scan.csv"));
    assert_eq!(rows.len(), 1);
    let t: f64 = rows[0][column(&header, "t_mirror")].parse().unwrap();
    assert!((t - 1.0e4).abs() <= 0.2e4, "t_M = {t}");
    assert!(dir.path().join("pst_trajectory.csv").exists());
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let res = dimerchain(&[
        "disorder",
        "--sites",
        "21",
        "--disorder",
        "0.5,2",
        "--realizations",
        "10",
        "--seed",
        "3",
        "--out",
        a.path().to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let manifest = a.path().join("manifest.json");
    let res = dimerchain(&["--config", manifest.to_str().unwrap(), "--out", b.path().to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for name in ["disorder.csv", "avg_spectrum.csv", "manifest.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        if name == "manifest.json" {
            // the output directory differs between the two runs
            let strip = |v: &[u8]| {
                let mut m: serde_json::Value = serde_json::from_slice(v).unwrap();
                m["config"].as_object_mut().unwrap().remove("out");
                m
            };
            assert_eq!(strip(&x), strip(&y));
        } else {
            assert_eq!(x, y, "{name}");
        }
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"command": "spectrum", "sites": 101, "family": "b"}"#).unwrap();
    let out = dir.path().join("o");
    let res = dimerchain(&["--config", cfg.to_str().unwrap(), "--sites", "21", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (_, rows) = csv_rows(&out.join("spectrum.csv"));
    assert_eq!(rows.len(), 21);
}

#[test]
fn json_format_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = dimerchain(&["classify", "--format", "json", "--samples", "64", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("classify.json")).unwrap()).unwrap();
    assert!(v["columns"].is_array() && !v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn unknown_flag_is_a_config_error() {
    let res = dimerchain(&["spectrum", "--bogus", "1"]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(error_line(&res)["error"], "config");
}

#[test]
fn invalid_chain_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let res = dimerchain(&["spectrum", "--sites", "20", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let e = error_line(&res);
    assert_eq!(e["code"], 2);
    assert!(e["message"].as_str().unwrap().contains("odd"), "{e}");
}

#[test]
fn missing_command_is_a_config_error() {
    let res = dimerchain(&["--sites", "21"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn failed_transfer_is_a_solver_error() {
    let dir = tempfile::tempdir().unwrap();
    let res = dimerchain(&[
        "pst",
        "--family",
        "b",
        "--sites",
        "21",
        "--ratio",
        "5",
        "--tmax",
        "10",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(3));
    assert_eq!(error_line(&res)["error"], "solver");
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let res = dimerchain(&["spectrum", "--sites", "21", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(4));
    assert_eq!(error_line(&res)["error"], "io");
}

#[test]
fn help_lists_every_flag() {
    let res = dimerchain(&["--help"]);
    assert!(res.status.success());
    let help = String::from_utf8(res.stdout).unwrap();
    for flag in [
        "--config",
        "--family",
        "--sites",
        "--strong",
        "--weak",
        "--ratio",
        "--disorder",
        "--realizations",
        "--seed",
        "--tmax",
        "--samples",
        "--inject",
        "--out",
        "--format",
        "--figure",
    ] {
        assert!(help.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn negative_injection_site_parses() {
    let dir = tempfile::tempdir().unwrap();
    let res = dimerchain(&[
        "evolve",
        "--family",
        "b",
        "--sites",
        "21",
        "--inject",
        "-10",
        "--tmax",
        "20",
        "--samples",
        "101",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = csv_rows(&dir.path().join("trajectory.csv"));
    assert_eq!(rows.len(), 101);
    let f0: f64 = rows[0][column(&header, "fidelity")].parse().unwrap();
    assert!((f0 - 1.0).abs() < 1e-12);
}

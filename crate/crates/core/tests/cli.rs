//! End-to-end runs of the `droplet-probe` binary on a tiny plan.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_droplet-probe"));
    c.env("DROPLET_PROBE_WORKERS", "1");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const TINY: &str = r#"{
  "collocation": { "n": 60 },
  "plan": { "half": 0.1, "n": 9, "slice_x3": 0.0, "slab_half_planes": 4, "refine_factor": 2.0 },
  "taus": [0.05, 0.0, 0.01],
  "delta": 0.045
}"#;

fn assert_same_files(a: &Path, b: &Path) {
    let (fa, fb) = (files(a), files(b));
    assert_eq!(fa.keys().collect::<Vec<_>>(), fb.keys().collect::<Vec<_>>());
    for (name, bytes) in &fa {
        assert!(bytes == &fb[name], "{name} differs");
    }
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "run.log")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn scan(root: &Path, tag: &str, cfg: &Path) -> std::path::PathBuf {
    let scan = root.join(format!("scan_{tag}"));
    let o = run(&["scan", "--quiet", "--config", cfg.to_str().unwrap(), "--out", scan.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    scan
}

fn invert(root: &Path, tag: &str, cfg: &Path, xi: &Path) -> std::path::PathBuf {
    let inv = root.join(format!("inv_{tag}"));
    let o = run(&[
        "invert",
        "--config",
        cfg.to_str().unwrap(),
        "--input",
        xi.to_str().unwrap(),
        "--out",
        inv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    inv
}

#[test]
fn pipeline_is_reproducible_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.json");
    std::fs::write(&cfg, TINY).unwrap();
    let scan_a = scan(dir.path(), "a", &cfg);
    let scan_b = scan(dir.path(), "b", &cfg);
    assert_same_files(&scan_a, &scan_b);
    let xi = scan_a.join("xi.xig");
    let inv_a = invert(dir.path(), "a", &cfg, &xi);
    let inv_b = invert(dir.path(), "b", &cfg, &xi);
    assert_same_files(&inv_a, &inv_b);
    assert!(scan_a.join("run.log").is_file());

    let reports: Vec<String> = ["tau0", "tau0.01", "tau0.05"]
        .iter()
        .map(|t| inv_a.join(format!("reconstruction_{t}.json")).to_string_lossy().into_owned())
        .collect();
    let rep = dir.path().join("report");
    let mut args = vec!["report", "--out", rep.to_str().unwrap()];
    // given out of order on purpose
    args.extend([reports[2].as_str(), reports[0].as_str(), reports[1].as_str()]);
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(rep.join("gre_table.csv")).unwrap();
    let header = table.lines().find(|l| l.starts_with("metric")).unwrap();
    assert_eq!(header, "metric,tau=0,tau=0.01,tau=0.05");
    assert!(rep.join("slice_tau0.csv").is_file());

    // refuses to overwrite
    let o = run(&["report", "--out", rep.to_str().unwrap(), reports[0].as_str()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = run(&["report", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let o = run(&["invert", "--input", "/nonexistent/xi.xig", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{ "no_such_key": 1 }"#).unwrap();
    let o = run(&["scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["--workers", "0", "eig-table"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eig_table_prints_five_modes() {
    let o = run(&["eig-table", "--n-max", "5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with('n')).collect();
    assert_eq!(rows.len(), 5);
    let mu: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
    assert!((mu - 1.8366).abs() < 1e-4, "{}", rows[0]);
}

#[test]
fn validate_forward_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vf");
    let o = run(&["validate-forward", "--case", "unperturbed", "--n", "80", "--seed", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("case,n,seed,l2_error,sphere_radius,sphere_max,sphere_rms"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("unperturbed,80,2,")));
    assert_eq!(std::fs::read(out.join("validate_forward.csv")).unwrap(), text.as_bytes());
}

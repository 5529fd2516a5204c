use std::path::Path;
use std::process::{Command, Output};

fn qvpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvpath")).args(args).output().unwrap()
}

fn in_dir(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--out-dir", dir.to_str().unwrap()]);
    qvpath(&all)
}

fn files(dir: &Path) -> Vec<String> {
    match std::fs::read_dir(dir) {
        Ok(rd) => rd.map(|e| e.unwrap().file_name().into_string().unwrap()).collect(),
        Err(_) => Vec::new(),
    }
}

#[test]
fn lorentz_prints_fixed_line() {
    let out = qvpath(&["lorentz", "--dx", "0", "--dt", "1", "--v", "0.6", "--c", "1"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "-0.750000000000,1.250000000000\n");
    let out = qvpath(&["lorentz", "--dx", "-2", "--dt", "3", "--v", "0"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "-2.000000000000,3.000000000000\n");
}

#[test]
fn lorentz_light_speed_is_config_error() {
    let out = qvpath(&["lorentz", "--dx", "0", "--dt", "1", "--v", "1", "--c", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("v"));
}

#[test]
fn zero_steps_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(tmp.path(), &["simulate", "--model", "symmetric", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid n"));
    assert!(files(tmp.path()).is_empty());
}

#[test]
fn bad_fields_are_named() {
    let tmp = tempfile::tempdir().unwrap();
    for (args, field) in [
        (vec!["simulate", "--n", "10", "--sigma", "-1"], "sigma"),
        (vec!["simulate", "--model", "tviolating", "--lambda", "1.5", "--n", "10"], "lambda"),
        (vec!["simulate", "--n", "10", "--sites", "64"], "sites"),
        (vec!["simulate", "--n", "10,20"], "n"),
        (vec!["sweep", "--n", "20,10"], "n"),
        (vec!["sweep", "--model", "tviolating", "--n", "1000,4000", "--sites", "51", "--spacing", "1"], "sites"),
    ] {
        let out = in_dir(tmp.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(&format!("invalid {field}")), "{args:?}");
    }
    assert!(files(tmp.path()).is_empty());
}

#[test]
fn empty_step_list_from_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "model = \"tviolating\"\nn = []\n").unwrap();
    let out = in_dir(tmp.path(), &["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(files(tmp.path()), vec!["run.toml".to_string()]);
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "model = \"symmetric\"\nn = [0]\nsites = 41\nspacing = 0.5\n").unwrap();
    let out = in_dir(tmp.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--n", "50"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("distribution.csv")).unwrap();
    assert_eq!(csv.lines().count(), 42);
}

#[test]
fn simulate_tviolating_shows_two_peaks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(
        tmp.path(),
        &["simulate", "--model", "tviolating", "--lambda", "0.1", "--n", "4000", "--sigma", "1", "--sites", "205", "--spacing", "1", "--svg"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("distribution.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("w,probability"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (w, p) = l.split_once(',').unwrap();
            assert!(w.contains('e') && p.contains('e'));
            (w.parse().unwrap(), p.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 205);
    let left = rows.iter().filter(|r| r.0 < 0.0).max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let right = rows.iter().filter(|r| r.0 > 0.0).max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert!(((right.0 - left.0) - 17.889).abs() <= 1.0, "{left:?} {right:?}");
    assert!(tmp.path().join("distribution.svg").exists());
}

#[test]
fn sweep_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let out = in_dir(tmp.path(), &["sweep", "--model", "symmetric", "--n", "100,1000,10000", "--sigma", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,delta_w,separation,predicted,rel_error,origin_suppression,tv_to_gaussian"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![100.0, 1000.0, 10000.0]);
    assert!(rows[0][6] > rows[1][6] && rows[1][6] > rows[2][6]);

    let out = in_dir(tmp.path(), &["sweep", "--model", "tviolating", "--lambda", "0.1", "--n", "500,1000,2000"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    for l in csv.lines().skip(1) {
        let rel: f64 = l.split(',').nth(4).unwrap().parse().unwrap();
        assert!(rel < 0.01, "{l}");
    }
}

#[test]
fn empty_step_list_flag() {
    let out = qvpath(&["sweep", "--n", ""]);
    assert_eq!(out.status.code(), Some(2));
}

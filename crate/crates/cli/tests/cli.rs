use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn kleinian(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kleinian"))
        .args(args)
        .arg("-o")
        .arg(out)
        .env("KLEINIAN_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn attr(line: &str, name: &str) -> f64 {
    let start = line.find(&format!(" {name}=\"")).unwrap_or_else(|| panic!("{name} in {line}")) + name.len() + 3;
    let end = start + line[start..].find('"').unwrap();
    line[start..end].parse().unwrap()
}

#[test]
fn exhaust_counts_for_genus_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = kleinian(&["schottky-exhaust", "--genus", "2", "-n", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(dir.path().join("exhaustion.json"));
    assert_eq!(v, serde_json::json!({ "boundary_curves": [4, 12, 36], "copies": [1, 5, 17] }));
    let report = json(dir.path().join("run_report.json"));
    assert_eq!(report["status"], "pass");
    assert_eq!(report["config"]["n"], 2);
}

#[test]
fn cantor_svg_counts_and_view() {
    for (k, expected) in [(2, 7), (3, 15)] {
        let dir = tempfile::tempdir().unwrap();
        let o = kleinian(&["cantor-circles", "-k", &k.to_string()], dir.path());
        assert_eq!(code(&o), 0);
        let svg = fs::read_to_string(dir.path().join("circles.svg")).unwrap();
        let header = svg.lines().next().unwrap();
        let view: Vec<f64> = {
            let start = header.find("viewBox=\"").unwrap() + 9;
            header[start..start + header[start..].find('"').unwrap()].split(' ').map(|t| t.parse().unwrap()).collect()
        };
        let (x0, y0, x1, y1) = (view[0], view[1], view[0] + view[2], view[1] + view[3]);
        let circles: Vec<&str> = svg.lines().filter(|l| l.starts_with("<circle")).collect();
        let lines = svg.lines().filter(|l| l.starts_with("<line")).count();
        assert_eq!(circles.len() + lines, expected, "k = {k}");
        for c in circles {
            let (cx, cy, r) = (attr(c, "cx"), attr(c, "cy"), attr(c, "r"));
            assert!(cx - r >= x0 && cx + r <= x1 && cy - r >= y0 && cy + r <= y1, "{c}");
        }
        let family = json(dir.path().join("circles.json"));
        assert_eq!(family["circles"].as_array().unwrap().len(), expected);
        assert!(family["disjointness"]["min_gap"].is_string());
    }
}

#[test]
fn config_errors_exit_two_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = kleinian(&["schottky-limitset", "--max-depth", "-1"], &out);
    assert_eq!(code(&o), 2);

    let cases = [
        "command = \"schottky-limitset\"\n[params]\nmax_depth = -1\n",
        "command = \"schottky-limitset\"\n[params]\nmax_depht = 3\n",
        "command = \"schottky-exhaust\"\n[params]\nn = 2\n",
        "command = \"schottky-limitset\"\n[params]\nmax_depth = 0\n",
    ];
    for text in cases {
        let cfg = dir.path().join("bad.toml");
        fs::write(&cfg, text).unwrap();
        let o = kleinian(&["schottky-limitset", "--config", cfg.to_str().unwrap()], &out);
        assert_eq!(code(&o), 2, "{text}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("config error"));
    }
    let o = kleinian(&["cantor-circles", "--format", "dot"], &out);
    assert_eq!(code(&o), 2);
    assert!(!out.exists(), "a failed run created {}", out.display());
}

#[test]
fn module_errors_exit_three_without_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = kleinian(&["schottky-exhaust", "-n", "8", "--node-budget", "100"], &out);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
    assert!(!out.exists());
}

#[test]
fn failed_checks_exit_four_with_a_report() {
    let dir = tempfile::tempdir().unwrap();
    // no curve up to n = 5 is long enough to be pinned when K = 100
    let o = kleinian(&["spectrum-obstruct", "--n-max", "5", "-k", "100"], dir.path());
    assert_eq!(code(&o), 4);
    let report = json(dir.path().join("run_report.json"));
    assert_eq!(report["status"], "check_failed");
    let failed: Vec<&Value> = report["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "obstructed");
    assert_eq!(failed[0]["measured"], 0);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "command = \"schottky-exhaust\"\n[params]\ngenus = 3\nn = 4\n").unwrap();
    let o = kleinian(&["schottky-exhaust", "--config", cfg.to_str().unwrap(), "-n", "1"], dir.path());
    assert_eq!(code(&o), 0);
    let v = json(dir.path().join("exhaustion.json"));
    assert_eq!(v["boundary_curves"], serde_json::json!([6, 30]));
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "run_report.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn identical_configs_give_identical_bytes() {
    let runs: [&[&str]; 4] = [
        &["schottky-limitset", "--max-depth", "4", "--format", "json,csv,svg,ppm", "--image-width", "64"],
        &["cantor-graph", "-k", "4"],
        &["de-extend", "--map-kind", "random", "--kappa", "3", "--seed", "5", "--grid", "6", "--nodes", "256"],
        &["spectrum-obstruct", "--n-max", "8", "-k", "7/2"],
    ];
    for args in runs {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for d in [&a, &b] {
            let o = Command::new(env!("CARGO_BIN_EXE_kleinian")).args(args).arg("-o").arg(d.path()).env("KLEINIAN_THREADS", "3").output().unwrap();
            assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        }
        let (fa, fb) = (artifacts(a.path()), artifacts(b.path()));
        assert!(!fa.is_empty());
        assert_eq!(fa, fb, "{args:?}");
    }
}

#[test]
fn large_limit_sets_switch_to_raster() {
    let dir = tempfile::tempdir().unwrap();
    let o = kleinian(&["schottky-limitset", "--max-depth", "5", "--svg-node-limit", "100", "--image-width", "128"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(!dir.path().join("limitset.svg").exists());
    let ppm = fs::read(dir.path().join("limitset.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n"));
    let report = json(dir.path().join("run_report.json"));
    assert!(report["notes"][0].as_str().unwrap().contains("svg_node_limit"));
}

#[test]
fn genus_two_depth_six_svg_is_small() {
    let dir = tempfile::tempdir().unwrap();
    let o = kleinian(&["schottky-limitset", "--genus", "2", "--max-depth", "6"], dir.path());
    assert_eq!(code(&o), 0);
    let svg = fs::metadata(dir.path().join("limitset.svg")).unwrap().len();
    assert!(svg <= 20 << 20, "{svg} bytes");
    let levels = json(dir.path().join("levels.json"));
    // 4 + 12 + 36 + 108 + 324 + 972 image disks
    assert_eq!(levels["nodes"], 1456);
}

#[test]
fn bad_thread_override_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_kleinian"))
        .args(["pants-distance", "-o"])
        .arg(dir.path())
        .env("KLEINIAN_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn every_shipped_config_runs() {
    let configs = repo().join("configs");
    let schema = json(repo().join("schemas/run_report.schema.json"));
    let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let mut seen = 0;
    let mut entries: Vec<PathBuf> = fs::read_dir(&configs).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries.iter().filter(|p| p.extension().is_some_and(|e| e == "toml")) {
        let command = path.file_stem().unwrap().to_str().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let o = kleinian(&[command, "--config", path.to_str().unwrap()], dir.path());
        assert_eq!(code(&o), 0, "{command}: {}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
        let report = json(dir.path().join("run_report.json"));
        for key in &required {
            assert!(report.get(*key).is_some(), "{command}: report lacks {key}");
        }
        for a in report["artifacts"].as_array().unwrap() {
            let file = dir.path().join(a["file"].as_str().unwrap());
            assert_eq!(fs::metadata(&file).unwrap().len(), a["bytes"].as_u64().unwrap());
        }
        seen += 1;
    }
    assert_eq!(seen, 11);
}

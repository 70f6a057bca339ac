// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SINGLE: &str = "version: 1\nN: 11\nm: 3\ns: 2\nlambda: 1\nd: 100\nP_f: 100\nR: 12\n";

const GRID: &str = "\
# two panels, four cells each
version: 1
N: 11, 101
m: 3, 5
s: 2
lambda: 1, 20
d: 100
P_f: 100
R: 8
max_steps: 300
";

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dollar-game"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("game.cfg");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_twice_gives_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SINGLE);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for out in [&a, &b] {
        ok(&bin(&["run", "--config", &cfg, "--seed", "7", "--out", out.to_str().unwrap()]));
    }
    let la = listing(&a);
    assert_eq!(
        la.iter().map(|f| f.0.as_str()).collect::<Vec<_>>(),
        ["runs.csv", "trajectory.csv", "trajectory.svg"]
    );
    assert_eq!(la, listing(&b));
    let rows = String::from_utf8(la[0].1.clone()).unwrap();
    assert_eq!(rows.lines().count(), 2);
}

#[test]
fn seed_changes_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SINGLE);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&bin(&["run", "--config", &cfg, "--seed", "1", "--out", a.to_str().unwrap()]));
    ok(&bin(&["run", "--config", &cfg, "--seed", "2", "--out", b.to_str().unwrap()]));
    assert_ne!(fs::read(a.join("trajectory.csv")).unwrap(), fs::read(b.join("trajectory.csv")).unwrap());
}

#[test]
fn worker_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), GRID);
    for cmd in ["ensemble", "sweep"] {
        let cfg = if cmd == "ensemble" { write_config(tmp.path(), SINGLE) } else { cfg.clone() };
        for format in ["csv", "json"] {
            let dirs: Vec<_> = ["1", "8"]
                .iter()
                .map(|w| {
                    let d = tmp.path().join(format!("{cmd}-{format}-{w}"));
                    ok(&bin(&[
                        cmd, "--config", &cfg, "--seed", "3", "--workers", w, "--format", format, "--out",
                        d.to_str().unwrap(),
                    ]));
                    d
                })
                .collect();
            assert_eq!(listing(&dirs[0]), listing(&dirs[1]), "{cmd} {format}");
        }
    }
}

#[test]
fn sweep_writes_csv_and_one_svg_per_panel() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), GRID);
    let out = tmp.path().join("out");
    ok(&bin(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]));
    let names: Vec<String> = listing(&out).into_iter().map(|f| f.0).collect();
    assert_eq!(
        names,
        ["heatmap_s2_lambda1_d100.svg", "heatmap_s2_lambda20_d100.svg", "runs.csv", "summary.csv"]
    );
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 8);
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 8 * 8);
}

#[test]
fn plot_reproduces_sweep_heatmaps() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), GRID);
    let out = tmp.path().join("out");
    let again = tmp.path().join("again");
    ok(&bin(&["sweep", "--config", &cfg, "--format", "json", "--out", out.to_str().unwrap()]));
    let json = out.join("summary.json");
    ok(&bin(&["plot", "--input", json.to_str().unwrap(), "--out", again.to_str().unwrap()]));
    for f in listing(&again) {
        assert_eq!(fs::read(out.join(&f.0)).unwrap(), f.1, "{}", f.0);
    }
}

#[test]
fn gl_fit_writes_document_and_landscapes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "version: 1\nN: 21\nm: 2, 3, 4\ns: 2\nlambda: 50\nd: 100\nP_f: 100\nR: 6\nmax_steps: 200\nearly_stop: off\n",
    );
    let out = tmp.path().join("out");
    ok(&bin(&["gl-fit", "--config", &cfg, "--out", out.to_str().unwrap()]));
    let names: Vec<String> = listing(&out).into_iter().map(|f| f.0).collect();
    assert_eq!(names, ["gl_fit.json", "landscape_0.svg", "landscape_1.svg", "landscape_2.svg"]);
}

#[test]
fn missing_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin(&["run", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bad_configs_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    for text in [
        "version: 1\nN: 11\nm: 3\ns: 2\nlambda: 0\nd: 100\nP_f: 100\n",
        "version: 1\nN: 11\nm: 3\ns: 2\nlambda: 1\nd: 100\nP_f: 100\nmomentum: 3\n",
        "version: 1\nN: 11\nm: 3\ns: 2\nlambda: 1\nd: 100\n",
    ] {
        let cfg = write_config(tmp.path(), text);
        let out = bin(&["ensemble", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    // A grid handed to `run` is a config error too.
    let cfg = write_config(tmp.path(), GRID);
    assert_eq!(bin(&["run", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn unusable_output_dir_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SINGLE);
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = bin(&["run", "--config", &cfg, "--out", blocker.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    // Deep market so that no run aborts on a price overflow.
    let cfg = write_config(tmp.path(), &SINGLE.replace("lambda: 1\n", "lambda: 1000\n"));
    let out = tmp.path().join("o");
    ok(&bin(&[
        "run", "--config", &cfg, "--no-early-stop", "--fundamental", "off", "--out", out.to_str().unwrap(),
    ]));
    let rows = fs::read_to_string(out.join("runs.csv")).unwrap();
    let row = rows.lines().nth(1).unwrap();
    assert!(row.contains(",1600,off,off,"), "{row}");
    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 1601);
}

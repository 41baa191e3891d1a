// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chronolab_cli::config::validate_config;
use chronolab_cli::manifest::{RunManifest, MANIFEST_FILE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chronolab"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(config: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("--config")
        .arg(config)
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn mott(dir: &Path, out: &str) -> PathBuf {
    let body = format!(
        "experiment = \"mott_time\"\nseed = 3\noutput = \"{}\"\n[params]\nsites = 4\nparticles = 4\n",
        dir.join(out).display()
    );
    write_config(dir, "mott.toml", &body)
}

#[test]
fn empty_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "empty.toml", "");
    let o = run(&cfg, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("missing experiment name"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn else_config_validates() {
    let text = "experiment = \"else_dtc\"\nseed = 1\noutput = \"out\"\n[params]\n\
                sites = 8\nepsilon = 0.02\nh = 0.3\nrealizations = 50\n";
    let c = validate_config(text).unwrap();
    assert_eq!(c.params.int("sites"), 8);
    assert_eq!(c.params.float("epsilon"), 0.02);
}

#[test]
fn out_of_range_epsilon_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "experiment = \"else_dtc\"\nseed = 1\noutput = \"o\"\n[params]\nepsilon = -0.5\n",
    );
    let o = run(&cfg, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("params.epsilon"), "{}", stderr(&o));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn every_violation_is_reported() {
    let text = "experiment = \"else_dtc\"\nseed = -4\noutput = 3\ncolour = \"red\"\n[params]\n\
                sites = 1\nepsilon = 2.0\nwidth = 1\n";
    let errs = validate_config(text).unwrap_err();
    for path in [
        "seed",
        "output",
        "colour",
        "params.sites",
        "params.epsilon",
        "params.width",
    ] {
        assert!(errs.contains(path), "{path} missing from {errs}");
    }
}

#[test]
fn missing_required_parameter() {
    let errs = validate_config("experiment = \"else_dtc\"\nseed = 1\noutput = \"o\"\n[params]\n")
        .unwrap_err();
    assert!(errs.contains("params.epsilon"), "{errs}");
}

#[test]
fn unknown_experiment() {
    let errs = validate_config("experiment = \"warp_drive\"\nseed = 1\noutput = \"o\"\n[params]\n")
        .unwrap_err();
    assert!(errs.contains("experiment"), "{errs}");
}

#[test]
fn cross_field_check() {
    let text =
        "experiment = \"mott_time\"\nseed = 1\noutput = \"o\"\n[params]\nu = 1.0\nu_off = 2.0\n";
    let errs = validate_config(text).unwrap_err();
    assert!(errs.contains("params.u_off"), "{errs}");
}

#[test]
fn bad_flag_is_a_config_error() {
    let o = bin().arg("--frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_config_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&dir.path().join("absent.toml"), &[]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn help_lists_experiments() {
    let o = bin().arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for name in chronolab_cli::catalog::names() {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mott(dir.path(), "a");
    assert!(run(&cfg, &[]).status.success());
    let b = dir.path().join("b");
    assert!(run(&cfg, &["--out", b.to_str().unwrap()]).status.success());
    let ma = RunManifest::read(&dir.path().join("a")).unwrap();
    let mb = RunManifest::read(&b).unwrap();
    assert_eq!(ma.artifacts, mb.artifacts);
    for a in &ma.artifacts {
        assert_eq!(
            fs::read(dir.path().join("a").join(&a.path)).unwrap(),
            fs::read(b.join(&a.path)).unwrap()
        );
    }
}

#[test]
fn seed_override_changes_disordered_output() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "experiment = \"lloyd_time\"\nseed = 1\noutput = \"{}\"\n[params]\nsites = 20\nrealizations = 2\n",
        dir.path().join("a").display()
    );
    let cfg = write_config(dir.path(), "l.toml", &body);
    assert!(run(&cfg, &[]).status.success());
    let b = dir.path().join("b");
    assert!(run(&cfg, &["--seed", "2", "--out", b.to_str().unwrap()])
        .status
        .success());
    let la = fs::read(dir.path().join("a/lengths.csv")).unwrap();
    let lb = fs::read(b.join("lengths.csv")).unwrap();
    assert_ne!(la, lb);
    let m = RunManifest::read(&b).unwrap();
    assert_eq!(m.config["seed"], 2);
}

#[test]
fn check_passes_then_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mott(dir.path(), "out");
    assert!(run(&cfg, &[]).status.success());
    let o = run(&cfg, &["--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let summary = dir.path().join("out/summary.json");
    let mut text = fs::read_to_string(&summary).unwrap();
    text.push(' ');
    fs::write(&summary, text).unwrap();
    let o = run(&cfg, &["--check"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("summary.json"), "{}", stderr(&o));
}

#[test]
fn check_without_manifest_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mott(dir.path(), "never_written");
    assert_eq!(run(&cfg, &["--check"]).status.code(), Some(3));
}

#[test]
fn manifest_lists_exactly_the_written_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pc");
    let body = format!(
        "experiment = \"phase_crystal\"\nseed = 0\noutput = \"{}\"\n[params]\nfold = 3\nn_max = 60\n",
        out.display()
    );
    let cfg = write_config(dir.path(), "pc.toml", &body);
    let o = run(&cfg, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = RunManifest::read(&out).unwrap();
    let mut listed: Vec<_> = m.artifacts.iter().map(|a| a.path.clone()).collect();
    listed.sort();
    let mut on_disk: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != MANIFEST_FILE)
        .collect();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    for a in &m.artifacts {
        assert_eq!(a.bytes, fs::metadata(out.join(&a.path)).unwrap().len());
    }
    assert_eq!(m.schema_versions.manifest, 1);
    assert_eq!(m.config["params"]["fold"], 3);
}

#[test]
fn bouncer_writes_floquet_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    let body = format!(
        "experiment = \"bouncer\"\nseed = 0\noutput = \"{}\"\n[params]\n",
        out.display()
    );
    let cfg = write_config(dir.path(), "b.toml", &body);
    let o = run(&cfg, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("floquet_pair.json")).unwrap()).unwrap();
    let splitting = v["result"]["splitting"].as_f64().unwrap();
    assert!(splitting.is_finite() && splitting >= 0.0);
    assert!(out.join("packets.csv").exists());
}

#[test]
fn yao_grid_writes_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("y");
    let body = format!(
        "experiment = \"yao_phase_diagram\"\nseed = 5\noutput = \"{}\"\n[params]\n\
         sites = 4\nrealizations = 2\nperiods = 20\n",
        out.display()
    );
    let cfg = write_config(dir.path(), "y.toml", &body);
    let o = run(&cfg, &["--workers", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_dir(out.join("cells")).unwrap().count(), 25);
    let csv = fs::read_to_string(out.join("phase_diagram.csv")).unwrap();
    assert_eq!(csv.lines().count(), 26);
    let m = RunManifest::read(&out).unwrap();
    assert_eq!(m.artifacts.len(), 26);
}

#[test]
fn dimension_cap_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mott(dir.path(), "capped");
    let o = bin()
        .env("CHRONO_MAX_DIM", "4")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("capacity"), "{}", stderr(&o));
}

#[test]
fn hex_floats_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h");
    let body = format!(
        "experiment = \"mott_time\"\nseed = 0\noutput = \"{}\"\nfloat_encoding = \"hex\"\n[params]\nsites = 3\nparticles = 3\n",
        out.display()
    );
    let cfg = write_config(dir.path(), "h.toml", &body);
    assert!(run(&cfg, &[]).status.success());
    let text = fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(text.contains("\"f64:"), "{text}");
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

const SMALL: &str = "\
seed = 3
modes = 3
em_wavenumber = 3
final_time = 0.1
dt = 0.01
ensemble_size = 4
check_states = 2
convergence_levels = 3
";

fn spinwell(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinwell"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("small.cfg");
    fs::write(&path, format!("{SMALL}{extra}")).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn digest(path: &Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

#[test]
fn print_config_round_trips() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), "");
    let first = spinwell(tmp.path(), &["print-config", &cfg, "--set", "lambda2=0.25"]);
    assert!(first.status.success(), "{}", stderr(&first));
    let printed = tmp.path().join("printed.cfg");
    fs::write(&printed, &first.stdout).unwrap();
    let second = spinwell(tmp.path(), &["print-config", printed.to_str().unwrap()]);
    assert!(second.status.success(), "{}", stderr(&second));
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("lambda2 = 0.25"), "{text}");
}

#[test]
fn seed_only_config_uses_defaults() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("seed.cfg");
    fs::write(&path, "seed = 42\n").unwrap();
    let out = spinwell(tmp.path(), &["print-config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("seed = 42"));
    assert!(text.contains("modes = 8"));
}

#[test]
fn unknown_key_names_the_line() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), "# comment\nlamda2 = 0.5\n");
    let out = spinwell(tmp.path(), &["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains(":10:") && err.contains("lamda2"), "{err}");
}

#[test]
fn nonpositive_damping_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), "");
    let out = spinwell(tmp.path(), &["run", &cfg, "--set", "lambda2=0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("lambda2 > 0"), "{}", stderr(&out));
}

#[test]
fn bad_arguments_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(spinwell(tmp.path(), &["frobnicate"]).status.code(), Some(2));
    let missing = spinwell(tmp.path(), &["run", "no_such_file.cfg"]);
    assert_eq!(missing.status.code(), Some(2));
    let cfg = small_config(tmp.path(), "");
    let unstable = spinwell(tmp.path(), &["run", &cfg, "--set", "dt=0.5", "--set", "final_time=1"]);
    assert_eq!(unstable.status.code(), Some(2), "{}", stderr(&unstable));
}

#[test]
fn runs_are_reproducible_bit_for_bit() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), "snapshot_every = 5\n");
    let mut digests = Vec::new();
    for dir in ["a", "b"] {
        let set = format!("output_dir={dir}");
        let out = spinwell(tmp.path(), &["run", &cfg, "--set", &set]);
        assert!(out.status.success(), "{}", stderr(&out));
        let root = tmp.path().join(dir);
        let mut names: Vec<_> = fs::read_dir(root.join("snapshots"))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(names, ["state_000000.bin", "state_000005.bin", "state_000010.bin"]);
        let mut d = vec![digest(&root.join("trajectory.csv"))];
        d.extend(names.iter().map(|n| digest(&root.join("snapshots").join(n))));
        digests.push(d);
    }
    assert_eq!(digests[0], digests[1]);

    let csv = fs::read_to_string(tmp.path().join("a/trajectory.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, spinwell::output::TRAJECTORY_COLUMNS.join(","));
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn final_snapshot_matches_a_library_run() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), "");
    let out = spinwell(tmp.path(), &["run", &cfg]);
    assert!(out.status.success(), "{}", stderr(&out));
    let snap = spinwell::snapshot::read_snapshot(&tmp.path().join("out/snapshots/state_000010.bin")).unwrap();
    let config = spinwell::SimConfig::load(Some(Path::new(&cfg)), &[]).unwrap();
    let model = config.model().unwrap();
    snap.check_bases(&model.bases).unwrap();
    let initial = config.initial_state(&model.bases).unwrap();
    let opts = config.sim_options();
    let path = spinwell::commands::brownian_path(&model, config.seed, 0, config.dt, opts.steps).unwrap();
    let traj = spinwell_core::integrator::simulate(&model, &initial, &path, &opts).unwrap();
    assert_eq!(snap.state, traj.final_state);
}

#[test]
fn check_and_convergence_pass_on_a_small_problem() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), "");
    let check = spinwell(tmp.path(), &["check", &cfg]);
    assert_eq!(check.status.code(), Some(0), "{}", stderr(&check));
    let text = fs::read_to_string(tmp.path().join("out/check.csv")).unwrap();
    assert!(text.starts_with("name,residual,tolerance,passed\n"));
    assert!(!text.contains(",false"), "{text}");

    let conv = spinwell(tmp.path(), &["convergence", &cfg]);
    assert_eq!(conv.status.code(), Some(0), "{}", stderr(&conv));
    let text = fs::read_to_string(tmp.path().join("out/convergence.csv")).unwrap();
    for study in ["twin_fit", "energy_fit", "norm_fit", "sphere_fit"] {
        assert!(text.lines().any(|l| l.starts_with(study)), "{study} missing:\n{text}");
    }
}

#[test]
fn ensemble_writes_statistics() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), "");
    let out = spinwell(tmp.path(), &["ensemble", &cfg]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(tmp.path().join("out/ensemble.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "quantity,moment,mean,se,paths");
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 10);
    for r in rows {
        let f: Vec<_> = r.split(',').collect();
        assert_eq!(f[4], "4");
        assert!(f[2].parse::<f64>().unwrap().is_finite(), "{r}");
    }

    let one = spinwell(tmp.path(), &["ensemble", &cfg, "--set", "ensemble_size=1"]);
    assert_eq!(one.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_ensemble_output() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), "");
    let mut texts = Vec::new();
    for threads in ["1", "3"] {
        let out = Command::new(env!("CARGO_BIN_EXE_spinwell"))
            .current_dir(tmp.path())
            .env("SPINWELL_THREADS", threads)
            .args(["ensemble", &cfg, "--set", &format!("output_dir=t{threads}")])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        texts.push(fs::read(tmp.path().join(format!("t{threads}/ensemble.csv"))).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

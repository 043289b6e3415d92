use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use duct_planner::cgm::{read_cgm, synthesize_duct_map, DuctModelParams, GridSpec};
use duct_planner::export::read_archive_json;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duct-planner")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: [&str; 6] = ["--n-p", "10", "--g-max", "2", "--pso-g-max", "2"];

/// Short eastward leg close to the base station that small budgets solve.
fn easy_scenario(dir: &Path) -> String {
    let file = dir.join("easy.json");
    fs::write(
        &file,
        r#"{
  "scenario": {
    "a": {"x": 1000.0, "y": 0.0, "z": 0.0},
    "b": {"x": 1600.0, "y": 0.0, "z": 0.0},
    "t_max": 400.0,
    "d_bits": 1e9,
    "delta_small_t": 5.0
  },
  "planner": {"moea": {"n_p": 16, "g_max": 5}, "pso": {"g_max": 3}}
}"#,
    )
    .unwrap();
    file.to_str().unwrap().to_owned()
}

#[test]
fn gen_cgm_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.cgm");
    let o = cli(&["gen-cgm", "--out", path(&out), "--dd", "50", "--dh", "1", "--extent", "20000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("cells=25600"), "{}", stdout(&o));

    let map = read_cgm(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(map.spec().delta_d, 50.0);
    assert_eq!(map.spec().delta_h, 1.0);
    let expected = synthesize_duct_map(&DuctModelParams::default(), GridSpec::radial(50.0, 1.0, 400, 64), 10e9).unwrap();
    assert_eq!(map.loss_db(), expected.loss_db());
}

#[test]
fn gen_cgm_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.cgm");
    assert_eq!(cli(&["gen-cgm", "--out", path(&out), "--dd", "-1"]).status.code(), Some(1));
    assert_eq!(cli(&["gen-cgm", "--out", path(&out), "--lambda", "0"]).status.code(), Some(1));
    assert_eq!(cli(&["gen-cgm"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn plan_writes_outputs_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = easy_scenario(dir.path());
    let out_dir = dir.path().join("run");
    let o = cli(&["plan", "--scenario", &scenario, "--synthetic", "--seed", "3", "--out-dir", path(&out_dir)]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));

    let records = read_archive_json(fs::File::open(out_dir.join("archive.json")).unwrap()).unwrap();
    assert!(records.iter().any(|r| r.feasible));
    let traj = fs::read_to_string(out_dir.join("trajectories.csv")).unwrap();
    assert!(traj.starts_with("member,slot,sub_slot,t_s,x_m,y_m,z_m,cumulative_bits"));
    let log = fs::read_to_string(out_dir.join("log.csv")).unwrap();
    assert!(log.lines().any(|l| l.starts_with("pso,")));
}

#[test]
fn plan_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{k}"));
        let mut args = vec!["plan", "--case", "1", "--seed", "7", "--threads", threads, "--out-dir", path(&out_dir)];
        args.extend(SMALL);
        let o = cli(&args);
        // the tiny budget never completes the 40 GB transfer
        assert_eq!(o.status.code(), Some(2));
        outputs.push(fs::read(out_dir.join("archive.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn threads_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = easy_scenario(dir.path());
    let out_dir = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_duct-planner"))
        .args(["plan", "--scenario", &scenario, "--out-dir", path(&out_dir)])
        .env("DUCT_PLANNER_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_duct-planner"))
        .args(["plan", "--scenario", &scenario, "--out-dir", path(&out_dir)])
        .env("DUCT_PLANNER_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn dt_sub_sweep_emits_one_archive_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = easy_scenario(dir.path());
    let out_dir = dir.path().join("sweep");
    let o = cli(&["plan", "--scenario", &scenario, "--dt-sub", "10,5,1", "--out-dir", path(&out_dir)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for dt in ["10", "5", "1"] {
        assert!(out_dir.join(format!("archive_dt{dt}.json")).exists(), "missing archive for {dt}");
    }
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("dt_sub=")).count(), 3);
    assert_eq!(cli(&["plan", "--scenario", &scenario, "--dt-sub", "3", "--out-dir", path(&out_dir)]).status.code(), Some(1));
}

#[test]
fn baseline_and_noise_flags_run() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = easy_scenario(dir.path());
    for (name, extra) in [("base", vec!["--baseline"]), ("noisy", vec!["--noise-sigma", "3"]), ("plain", vec!["--no-pso"])] {
        let out_dir = dir.path().join(name);
        let mut args = vec!["plan", "--scenario", &scenario, "--seed", "1", "--out-dir", path(&out_dir)];
        args.extend(extra);
        let o = cli(&args);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let plain = fs::read_to_string(dir.path().join("plain/log.csv")).unwrap();
    assert!(!plain.lines().any(|l| l.starts_with("pso,")));
}

#[test]
fn compare_reports_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = easy_scenario(dir.path());
    let out_dir = dir.path().join("cmp");
    assert_eq!(cli(&["plan", "--scenario", &scenario, "--out-dir", path(&out_dir)]).status.code(), Some(0));
    let a = out_dir.join("archive.json");

    let o = cli(&["compare", "--a", path(&a), "--b", path(&a)]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("A dominated by B: 0") && text.contains("B dominated by A: 0"), "{text}");
    let hv: Vec<&str> = text.lines().filter_map(|l| l.split("normalized_hv=").nth(1)).collect();
    assert_eq!(hv.len(), 2);
    assert_eq!(hv[0], hv[1]);

    let o = cli(&["compare", "--a", path(&a), "--b", path(&a), "--ref", "1000,1000"]);
    assert!(stdout(&o).contains("reference=1000,1000"));
    assert_eq!(cli(&["compare", "--a", path(&a), "--b", path(&a), "--ref", "1"]).status.code(), Some(1));

    let broken = dir.path().join("broken.json");
    fs::write(&broken, "[{\"f1\": 1.0}").unwrap();
    assert_eq!(cli(&["compare", "--a", path(&a), "--b", path(&broken)]).status.code(), Some(1));
}

#[test]
fn multi_waypoint_case_writes_segments() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("multi");
    let mut args = vec!["plan", "--case", "multi", "--seed", "2", "--out-dir", path(&out_dir)];
    args.extend(SMALL);
    let o = cli(&args);
    assert_eq!(o.status.code(), Some(2));
    for k in 1..=3 {
        assert!(out_dir.join(format!("segment{k}_archive.json")).exists());
    }
    assert!(String::from_utf8_lossy(&o.stderr).contains("segment"));
}

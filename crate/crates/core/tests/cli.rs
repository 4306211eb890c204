use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use norm_soliton::io::{run, Manifest, Scenario, Task, OUTPUT_ENV};
use norm_soliton::ProblemParams;

fn cli(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_norm-soliton"))
        .args(args)
        .env(OUTPUT_ENV, out)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn thresholds_succeed_and_report_the_regime() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(dir.path(), &["thresholds", "--a", "1", "--mu", "1", "--p", "4", "--q", "2.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["summary"]["regime"], "th1-two-branch");
    let run_dir = Path::new(v["dir"].as_str().unwrap());
    assert!(run_dir.join("thresholds.json").is_file());
    let m: Manifest = serde_json::from_slice(&std::fs::read(run_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m.task, Task::Thresholds);
    assert_eq!(m.artifacts.len(), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_mass = cli(dir.path(), &["thresholds", "--a=-1"]);
    assert_eq!(bad_mass.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&bad_mass.stderr).unwrap();
    assert_eq!(err["exit_code"], 2);

    let regime = cli(dir.path(), &["ground", "--override", "params.a=50", "--override", "grid.n=64"]);
    assert_eq!(regime.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&regime.stderr).unwrap();
    assert!(err["thresholds"]["abar0"].is_number());

    let unknown = cli(dir.path(), &["fiber", "--override", "nonsense=1"]);
    assert_eq!(unknown.status.code(), Some(2));

    let starved = cli(
        dir.path(),
        &["mountain", "--override", "solver.max_iter=1", "--override", "solver.polish_below=null", "--override", "grid.n=256"],
    );
    assert_eq!(starved.status.code(), Some(3), "{}", String::from_utf8_lossy(&starved.stderr));

    // a failed run leaves nothing behind
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .map(|d| d.filter_map(|e| e.ok()).map(|e| e.file_name()).collect())
        .unwrap_or_default();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let mut scn = Scenario::new(Task::Fiber, ProblemParams::new(1.0, 1.0, 4.0, 2.2).unwrap());
    scn.grid.n = 256;
    let cfg = dir.path().join("fiber.json");
    std::fs::write(&cfg, serde_json::to_vec(&scn.to_value()).unwrap()).unwrap();
    let o = cli(dir.path(), &["fiber", "--config", cfg.to_str().unwrap(), "--override", "fiber.ds=0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let run_dir = stdout_json(&o)["dir"].as_str().unwrap().to_string();
    let csv = std::fs::read_to_string(Path::new(&run_dir).join("fiber.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 17);
    let saved: Value = serde_json::from_slice(&std::fs::read(Path::new(&run_dir).join("scenario.json")).unwrap()).unwrap();
    assert_eq!(saved["fiber"]["ds"], 0.5);
}

#[test]
fn identical_scenarios_give_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let mut scn = Scenario::new(Task::Ground, ProblemParams::new(1.0, 1.0, 4.0, 2.2).unwrap());
    scn.grid.n = 400;
    scn.output_dir = Some(dir.path().join("a"));
    let first = run(&scn).unwrap();
    scn.output_dir = Some(dir.path().join("b"));
    let second = run(&scn).unwrap();
    assert_eq!(first.manifest.artifacts, second.manifest.artifacts);
    assert_eq!(first.manifest.config_sha256, second.manifest.config_sha256);
    assert_eq!(first.dir.file_name(), second.dir.file_name());
    for a in &first.manifest.artifacts {
        let x = std::fs::read(first.dir.join(&a.name)).unwrap();
        let y = std::fs::read(second.dir.join(&a.name)).unwrap();
        assert_eq!(x, y, "{}", a.name);
    }
    scn.seed += 1;
    assert_ne!(norm_soliton::io::config_hash(&scn), first.manifest.config_sha256);
}

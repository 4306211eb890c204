use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::regime::classify_regime;
use super::scenario::{Scenario, Task, SCHEMA_VERSION};
use super::sweep::sweep;
use crate::constants::{shooting_data, solve_soliton_on, thresholds};
use crate::dynamics::{evolve, instability_experiment, stability_experiment};
use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::functionals::energy;
use crate::solvers::{ground_state_local_min, mountain_pass, SolveReport};
use crate::spline::dilate;

/// Root directory for run artifacts when the scenario does not name one.
pub const OUTPUT_ENV: &str = "NORM_SOLITON_OUT";

/// Files produced by a task, before they touch the disk.
#[derive(Debug, Clone)]
pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
    /// Short JSON summary for the terminal.
    pub summary: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub task: Task,
    pub crate_version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub artifacts: Vec<Artifact>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub summary: Value,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical JSON form of a scenario (output location excluded).
pub fn config_hash(scn: &Scenario) -> String {
    sha256_hex(serde_json::to_string(&scn.canonical()).expect("scenario serializes").as_bytes())
}

pub fn output_root(scn: &Scenario) -> PathBuf {
    scn.output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn json_file(name: &str, v: &impl Serialize) -> Result<(String, Vec<u8>)> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    Ok((name.to_string(), bytes))
}

fn profile_file(name: &str, u: &RadialField) -> Result<(String, Vec<u8>)> {
    let mut bytes = Vec::new();
    u.write_csv(&mut bytes)?;
    Ok((name.to_string(), bytes))
}

fn solve(scn: &Scenario, mountain: bool) -> Result<SolveReport> {
    let grid = scn.build_grid()?;
    let prm = &scn.params;
    if mountain {
        mountain_pass(prm, &scn.init_or(1.0).build(grid, prm.a)?, &scn.solver)
    } else {
        ground_state_local_min(prm, &scn.init_or(3.0).build(grid, prm.a)?, &scn.solver)
    }
}

fn solve_summary(r: &SolveReport) -> Value {
    json!({
        "kind": r.kind,
        "level": r.level,
        "lambda": r.lambda,
        "grad_norm": r.grad_norm,
        "residuals": r.residuals,
    })
}

/// Run the scenario's task in memory.
pub fn execute(scn: &Scenario) -> Result<Outputs> {
    let prm = &scn.params;
    prm.validate()?;
    let mut files = Vec::new();
    let summary = match scn.task {
        Task::Gn => {
            let mut rows = Vec::new();
            for &t in &scn.gn.t {
                let d = shooting_data(t, scn.gn.tol)?;
                rows.push(json!({
                    "t": t,
                    "c_t_pow": d.c_t_pow(),
                    "c_t": d.c_t_pow().powf(1.0 / t),
                    "shooting": d,
                }));
                if scn.gn.profiles {
                    let sol = solve_soliton_on(t, scn.gn.tol, scn.build_grid()?)?;
                    files.push(profile_file(&format!("soliton-t{t}.csv"), &sol.profile)?);
                }
            }
            files.push(json_file("gn.json", &rows)?);
            Value::Array(rows)
        }
        Task::Thresholds => {
            let thr = thresholds(prm)?;
            let regime = classify_regime(prm, &thr);
            let v = json!({ "regime": regime.label(), "thresholds": thr });
            files.push(json_file("thresholds.json", &v)?);
            v
        }
        Task::Fiber => {
            let u = scn.init_or(3.0).build(scn.build_grid()?, prm.a)?;
            let fiber = energy(&u, prm)?.fiber(prm);
            let f = &scn.fiber;
            if !(f.ds > 0.0 && f.s_max > f.s_min) {
                return Err(Error::Parameter("fiber sampling needs s_min < s_max and ds > 0".into()));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["s", "psi", "dpsi", "d2psi"]).map_err(|e| Error::Format(e.to_string()))?;
            for (s, psi, dpsi) in fiber.sample(f.s_min, f.s_max, f.ds) {
                w.serialize((s, psi, dpsi, fiber.d2psi(s))).map_err(|e| Error::Format(e.to_string()))?;
            }
            files.push(("fiber.csv".into(), w.into_inner().map_err(|e| Error::Format(e.to_string()))?));
            let v = json!({ "profile": fiber.profile(), "max_point": fiber.max_point() });
            files.push(json_file("fiber.json", &v)?);
            v
        }
        Task::Ground | Task::Mountain => {
            let r = solve(scn, scn.task == Task::Mountain)?;
            let thr = thresholds(prm)?;
            files.push(json_file(
                "report.json",
                &json!({ "report": r, "thresholds": thr, "regime": classify_regime(prm, &thr).label() }),
            )?);
            files.push(profile_file("profile.csv", &r.profile)?);
            solve_summary(&r)
        }
        Task::Evolve => {
            let e = &scn.evolve;
            let (mut phi, start) = match e.init.as_str() {
                "ground" => (solve(scn, false)?.profile, Some("ground")),
                "mountain" => (solve(scn, true)?.profile, Some("mountain")),
                path => (RadialField::load_csv(path)?, None),
            };
            if e.rho != 0.0 {
                phi = dilate(&phi, e.rho).normalized(phi.mass2().sqrt())?;
            }
            files.push(profile_file("initial.csv", &phi)?);
            let st = evolve(&phi, prm, &e.options)?;
            let mut traj = Vec::new();
            st.write_csv(&mut traj)?;
            files.push(("trajectory.csv".into(), traj));
            files.push(profile_file("final.csv", &st.phi)?);
            let v = json!({
                "init": start.unwrap_or(e.init.as_str()),
                "t": st.t,
                "steps": st.steps,
                "blow_up": st.blow_up,
                "mass_drift_rate": st.mass_drift_rate(),
                "energy_drift_rate": st.energy_drift_rate(),
            });
            files.push(json_file("evolve.json", &v)?);
            v
        }
        Task::Stability => {
            let r = solve(scn, false)?;
            let s = &scn.stability;
            let mut opts = s.options;
            opts.seed = scn.seed;
            let v = stability_experiment(&r, s.perturbations, s.delta, s.t_final, &opts)?;
            let out = json!({ "ground": solve_summary(&r), "verdict": v });
            files.push(json_file("stability.json", &out)?);
            files.push(profile_file("ground.csv", &r.profile)?);
            out
        }
        Task::Instability => {
            let r = solve(scn, true)?;
            let s = &scn.instability;
            let v = instability_experiment(&r, s.rho, s.t_final, &s.options)?;
            let out = json!({ "mountain": solve_summary(&r), "verdict": v });
            files.push(json_file("instability.json", &out)?);
            files.push(profile_file("mountain.csv", &r.profile)?);
            out
        }
        Task::Sweep => {
            let r = sweep(scn)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for c in &r.cells {
                w.serialize(c).map_err(|e| Error::Format(e.to_string()))?;
            }
            files.push(("sweep.csv".into(), w.into_inner().map_err(|e| Error::Format(e.to_string()))?));
            files.push(json_file("sweep.json", &r)?);
            let failed = r.cells.iter().filter(|c| c.status_min.starts_with("failed") || c.status_mp.starts_with("failed")).count();
            json!({ "cells": r.cells.len(), "failed_cells": failed })
        }
    };
    Ok(Outputs { files, summary })
}

/// Execute the scenario and persist its artifacts under
/// `<root>/<task>-<config hash prefix>/`. Files are staged in a sibling
/// directory and moved into place only when the task succeeded.
pub fn run(scn: &Scenario) -> Result<RunOutcome> {
    let started = Instant::now();
    let hash = config_hash(scn);
    let root = output_root(scn);
    let dir = root.join(format!("{}-{}", scn.task.name(), &hash[..12]));
    let out = execute(scn)?;
    std::fs::create_dir_all(&root)?;
    let staging = root.join(format!(".{}-{}.partial-{}", scn.task.name(), &hash[..12], std::process::id()));
    if staging.exists() {
        std::fs::remove_dir_all(&staging)?;
    }
    std::fs::create_dir_all(&staging)?;
    let persisted = persist(&staging, scn, &hash, &out, started);
    let manifest = match persisted {
        Ok(m) => m,
        Err(e) => {
            let _ = std::fs::remove_dir_all(&staging);
            return Err(e);
        }
    };
    if dir.exists() {
        std::fs::remove_dir_all(&dir)?;
    }
    std::fs::rename(&staging, &dir)?;
    Ok(RunOutcome { dir, manifest, summary: out.summary })
}

fn persist(staging: &Path, scn: &Scenario, hash: &str, out: &Outputs, started: Instant) -> Result<Manifest> {
    let mut artifacts = Vec::with_capacity(out.files.len() + 1);
    let (name, bytes) = json_file("scenario.json", &scn.canonical())?;
    let mut all: Vec<(&str, &[u8])> = vec![(name.as_str(), bytes.as_slice())];
    all.extend(out.files.iter().map(|(n, b)| (n.as_str(), b.as_slice())));
    for (name, bytes) in all {
        std::fs::write(staging.join(name), bytes)?;
        artifacts.push(Artifact {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        task: scn.task,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: hash.to_string(),
        seed: scn.seed,
        artifacts,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    let (_, bytes) = json_file("manifest.json", &manifest)?;
    std::fs::write(staging.join("manifest.json"), bytes)?;
    Ok(manifest)
}

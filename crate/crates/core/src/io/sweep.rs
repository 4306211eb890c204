use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::regime::{classify_regime, critical_witness, CriticalWitness, RegimeTag};
use super::scenario::Scenario;
use crate::constants::thresholds;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::solvers::{ground_state_local_min, mountain_pass, SolveReport};

/// One `(a, μ)` cell of a sweep. Failures are recorded, not propagated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub a: f64,
    pub mu: f64,
    pub regime: String,
    pub abar0: Option<f64>,
    pub a_star: Option<f64>,
    pub m_a: Option<f64>,
    pub lambda_min: Option<f64>,
    pub status_min: String,
    pub c_a: Option<f64>,
    pub lambda_mp: Option<f64>,
    pub status_mp: String,
    pub witness_e0: Option<f64>,
    pub witness_j_end: Option<f64>,
    pub witness_tail_decreasing: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    /// Fibers of the critical-case witnesses, keyed by cell index.
    pub witnesses: Vec<(usize, CriticalWitness)>,
}

fn status(r: &Result<SolveReport>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => format!("failed (exit {}): {e}", e.exit_code()),
    }
}

fn cell(scn: &Scenario, grid: &Arc<RadialGrid>, a: f64, mu: f64) -> (SweepCell, Option<CriticalWitness>) {
    let mut c = SweepCell {
        a,
        mu,
        regime: "invalid".into(),
        abar0: None,
        a_star: None,
        m_a: None,
        lambda_min: None,
        status_min: "skipped".into(),
        c_a: None,
        lambda_mp: None,
        status_mp: "skipped".into(),
        witness_e0: None,
        witness_j_end: None,
        witness_tail_decreasing: None,
    };
    let prm = scn.params.with_a(a).with_mu(mu);
    let thr = match prm.validate().and_then(|_| thresholds(&prm)) {
        Ok(t) => t,
        Err(e) => {
            c.status_min = format!("failed (exit {}): {e}", e.exit_code());
            c.status_mp = c.status_min.clone();
            return (c, None);
        }
    };
    let tag = classify_regime(&prm, &thr);
    c.regime = tag.label();
    c.abar0 = thr.abar0;
    c.a_star = thr.a_star;
    let sw = &scn.sweep;
    if !sw.classify_only {
        if tag.has_local_min() {
            let r = scn
                .init_or(3.0)
                .build(grid.clone(), a)
                .and_then(|u| ground_state_local_min(&prm, &u, &scn.solver));
            c.status_min = status(&r);
            if let Ok(r) = r {
                c.m_a = Some(r.level);
                c.lambda_min = Some(r.lambda);
            }
        }
        if tag.has_mountain_pass() {
            let r = scn
                .init_or(1.0)
                .build(grid.clone(), a)
                .and_then(|u| mountain_pass(&prm, &u, &scn.solver));
            c.status_mp = status(&r);
            if let Ok(r) = r {
                c.c_a = Some(r.level);
                c.lambda_mp = Some(r.lambda);
            }
        }
    }
    let mut witness = None;
    if matches!(tag, RegimeTag::Th7Critical { case: 2 | 4 }) {
        match critical_witness(&prm, grid.clone(), sw.witness_s_max, sw.witness_samples) {
            Ok(w) => {
                c.witness_e0 = Some(w.e0);
                c.witness_j_end = w.samples.last().map(|s| s.1);
                c.witness_tail_decreasing = Some(w.tail_decreasing);
                witness = Some(w);
            }
            Err(e) => c.status_min = format!("witness failed (exit {}): {e}", e.exit_code()),
        }
    }
    (c, witness)
}

/// Classify and solve every `(a, μ)` pair of the scenario's sweep on a bounded
/// worker pool; the cell order is `a`-major and does not depend on scheduling.
pub fn sweep(scn: &Scenario) -> Result<SweepResult> {
    let grid = scn.build_grid()?;
    let jobs: Vec<(f64, f64)> = scn
        .sweep
        .a
        .iter()
        .flat_map(|&a| scn.sweep.mu.iter().map(move |&mu| (a, mu)))
        .collect();
    if jobs.is_empty() {
        return Err(Error::Parameter("the sweep needs at least one a and one mu".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(scn.sweep.workers)
        .build()
        .map_err(|e| Error::Solver(format!("worker pool: {e}")))?;
    let out: Vec<_> = pool.install(|| jobs.par_iter().map(|&(a, mu)| cell(scn, &grid, a, mu)).collect());
    let mut cells = Vec::with_capacity(out.len());
    let mut witnesses = Vec::new();
    for (i, (c, w)) in out.into_iter().enumerate() {
        cells.push(c);
        if let Some(w) = w {
            witnesses.push((i, w));
        }
    }
    Ok(SweepResult { cells, witnesses })
}

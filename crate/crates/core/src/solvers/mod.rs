//! Constrained critical points on the mass sphere: the local minimizer on the
//! gradient ball and the mountain-pass solution.

mod continuation;
mod problem;

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::constants::{gn_constant, thresholds, ThresholdReport};
use crate::error::{Error, Result};
use crate::field::{inner, RadialField};
use crate::functionals::{EnergyBreakdown, FiberProfile, FiberRegime};
use crate::grid::{GridSpec, RadialGrid};
use crate::params::{ProblemParams, P_BAR};
use crate::radial;
use crate::spline::dilate_real;

pub use continuation::{continuation_mu_to_zero, continuation_q_to_critical, Continuation, ContinuationStep};
pub(crate) use problem::gradient;
use problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveKind {
    LocalMin,
    MountainPass,
}

/// `D_{ρ₀} = {u ∈ S_a : |∇u|₂ ≤ ρ₀}`; no cap when `rho0` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub a: f64,
    pub rho0: Option<f64>,
}

impl ConstraintSet {
    pub fn contains_gradient(&self, grad_norm: f64) -> bool {
        self.rho0.is_none_or(|r| grad_norm <= r)
    }
}

/// Relative residuals of the stationarity identities at a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖G(u) + λu‖₂ / ‖u‖₂`
    pub euler_lagrange_l2: f64,
    /// `|P(u)|` over `T + D + Pp + |μ|Qq`
    pub pohozaev_p: f64,
    pub nehari: f64,
    pub pohozaev_identity: f64,
    /// `| |u|₂² − a² | / a²`
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub kind: SolveKind,
    pub params: ProblemParams,
    pub grid: GridSpec,
    #[serde(skip)]
    pub profile: RadialField,
    /// `m(a)` or `c_a`.
    pub level: f64,
    pub lambda: f64,
    pub energy: EnergyBreakdown,
    pub grad_norm: f64,
    pub residuals: Residuals,
    pub fiber: FiberProfile,
    /// `ψ_u″(0)`
    pub d2psi_at_zero: f64,
    pub constraint: ConstraintSet,
    pub iterations: usize,
    pub newton_iterations: usize,
    /// Accepted values of the descended functional (𝒥 or the fiber maximum).
    #[serde(skip)]
    pub level_history: Vec<f64>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SolveReport {
    pub fn real_profile(&self) -> Vec<f64> {
        self.profile.re()
    }

    /// Check the sign conditions that define the branch of `kind`.
    pub fn check_branch(&self) -> Result<()> {
        match self.kind {
            SolveKind::LocalMin => {
                if !(self.level < 0.0) {
                    return Err(Error::Solver(format!("local minimizer has level {:.6e} ≥ 0", self.level)));
                }
                if !(self.d2psi_at_zero > 0.0) {
                    return Err(Error::Solver("local minimizer is not in 𝒫₊ (ψ″(0) ≤ 0)".into()));
                }
                if !self.constraint.contains_gradient(self.grad_norm) {
                    return Err(Error::Solver("local minimizer left the gradient ball".into()));
                }
            }
            SolveKind::MountainPass => {
                if !(self.level > 0.0) {
                    return Err(Error::BranchCapture { level: self.level });
                }
                if !(self.d2psi_at_zero < 0.0) {
                    return Err(Error::Solver("mountain-pass solution is not in 𝒫₋ (ψ″(0) ≥ 0)".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Stop when `‖G + λu‖/‖u‖ < tol·(1 + |level|)`.
    pub tol: f64,
    /// Also require `|P(u)| < pohozaev_tol · scale`.
    pub pohozaev_tol: f64,
    pub max_iter: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    /// Shift σ of the `(−Δ + σ)` preconditioner; chosen from λ when `None`.
    pub shift: Option<f64>,
    /// Hand over to Newton–GMRES once the descent residual is below this.
    pub polish_below: Option<f64>,
    pub newton_max_iter: usize,
    /// Consecutive steps at the gradient cap tolerated before a boundary-trap error.
    pub trap_patience: usize,
    /// Refuse parameter sets outside the certified regimes.
    pub enforce_regime: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            pohozaev_tol: 1e-6,
            max_iter: 20_000,
            tau_min: 1e-6,
            tau_max: 1.0,
            shift: None,
            polish_below: Some(1e-3),
            newton_max_iter: 40,
            trap_patience: 200,
            enforce_regime: true,
        }
    }
}

const ARMIJO: f64 = 1e-4;
/// Fiber offsets above this are removed by re-interpolating the profile.
const RESCALE_ABOVE: f64 = 1e-10;
const STALL_STEPS: usize = 25;

/// `G(u) = −Δu + Φ_u u − |u|^{p−2}u − μ|u|^{q−2}u`
pub fn el_gradient(u: &RadialField, prm: &ProblemParams) -> Result<RadialField> {
    let g = gradient(u.grid(), u.values(), prm);
    RadialField::new(u.grid().clone(), g)
}

/// `λ = −⟨G(u), u⟩ / |u|₂²`
pub fn extract_lambda(u: &RadialField, prm: &ProblemParams) -> Result<f64> {
    let e = crate::functionals::energy(u, prm)?;
    if !(e.mass2 > 0.0) {
        return Err(Error::Parameter("multiplier of the zero field".into()));
    }
    Ok(e.lambda(prm))
}

/// Mass-`a` Gaussian `exp(−r²/(2 width²))`.
pub fn gaussian_init(grid: Arc<RadialGrid>, a: f64, width: f64) -> Result<RadialField> {
    RadialField::from_fn(grid, |r| (-(r * r) / (2.0 * width * width)).exp())?.normalized(a)
}

/// Mass-`a` exponential bump `(1 + r/width) exp(−r/width)`.
pub fn exponential_init(grid: Arc<RadialGrid>, a: f64, width: f64) -> Result<RadialField> {
    RadialField::from_fn(grid, |r| (1.0 + r / width) * (-r / width).exp())?.normalized(a)
}

/// `s_u ⋆ u`, the minimum of the fiber through `u`.
pub fn fiber_descend_init(u: &RadialField, prm: &ProblemParams) -> Result<RadialField> {
    let pb = Problem::new(u.grid().clone(), prm.with_a(u.mass2().sqrt()));
    let mut v = u.re();
    let prof = pb.breakdown(&v)?.fiber(&pb.prm).profile();
    let s = match (prof.regime, prof.s_u) {
        (FiberRegime::TwoCritical, Some(s)) => s,
        _ => return Err(Error::regime("fiber has no local minimum")),
    };
    v = dilate_real(u.grid(), &v, s);
    pb.normalize(&mut v)?;
    RadialField::from_real(u.grid().clone(), v)
}

fn local_min_constraint(prm: &ProblemParams, opts: &SolverOptions) -> Result<ConstraintSet> {
    let certified = prm.mu > 0.0 && prm.q < 8.0 / 3.0;
    if certified && prm.p == P_BAR {
        let a_star = (P_BAR / (2.0 * gn_constant(P_BAR)?)).powf(0.75);
        if prm.a >= a_star {
            return Err(Error::regime(format!(
                "a = {} ≥ a* = {a_star:.6}: the energy is unbounded below on S_a",
                prm.a
            )));
        }
        return Ok(ConstraintSet { a: prm.a, rho0: None });
    }
    if certified && prm.p > P_BAR && prm.p < 6.0 {
        let thr: ThresholdReport = thresholds(prm)?;
        let cap = thr.local_min_cap().unwrap_or(0.0);
        if prm.a >= cap {
            return Err(Error::Regime {
                reason: format!("a = {} ≥ ā₀ = {cap:.6}: no gradient barrier", prm.a),
                thresholds: Some(Box::new(thr)),
            });
        }
        return Ok(ConstraintSet { a: prm.a, rho0: thr.rho0 });
    }
    if opts.enforce_regime {
        return Err(Error::regime(
            "local minimizer needs μ > 0, q ∈ (2, 8/3) and p ∈ [10/3, 6)",
        ));
    }
    Ok(ConstraintSet { a: prm.a, rho0: None })
}

fn check_mountain_regime(prm: &ProblemParams, opts: &SolverOptions) -> Result<()> {
    if !opts.enforce_regime {
        return Ok(());
    }
    let supercritical_p = prm.p > P_BAR && prm.p < 6.0;
    let ok = if !supercritical_p {
        false
    } else if prm.mu <= 0.0 || prm.q > P_BAR {
        true
    } else if prm.q == P_BAR {
        thresholds(prm)?.cond_k201 == Some(true)
    } else if prm.q <= 2.4 {
        let thr = thresholds(prm)?;
        thr.cond_k3 == Some(true) && thr.abar0.is_some_and(|c| prm.a < c)
    } else {
        false
    };
    if ok {
        Ok(())
    } else {
        Err(Error::regime(format!(
            "no mountain-pass solution is certified at (μ, p, q) = ({}, {}, {})",
            prm.mu, prm.p, prm.q
        )))
    }
}

fn shift_for(opts: &SolverOptions, lambda: f64) -> f64 {
    opts.shift.unwrap_or_else(|| lambda.abs().clamp(0.05, 100.0))
}

fn grad_norm(e: &EnergyBreakdown) -> f64 {
    e.kinetic.sqrt()
}

fn converged(pb: &Problem, e: &EnergyBreakdown, norm: f64, opts: &SolverOptions) -> bool {
    norm < opts.tol * (1.0 + e.energy.abs()) && e.pohozaev(&pb.prm).abs() < opts.pohozaev_tol * e.scale(&pb.prm)
}

struct Outcome {
    u: Vec<f64>,
    iterations: usize,
    newton: usize,
    history: Vec<f64>,
}

fn polish(pb: &Problem, u: &mut Vec<f64>, opts: &SolverOptions) -> Result<usize> {
    let r = pb.residual(u)?;
    let mut lambda = r.lambda;
    let tol = 0.1 * opts.tol;
    pb.newton_polish(u, &mut lambda, tol, opts.newton_max_iter)
}

/// Minimize 𝒥 on `D_{ρ₀}` by preconditioned projected gradient descent.
pub fn ground_state_local_min(prm: &ProblemParams, init: &RadialField, opts: &SolverOptions) -> Result<SolveReport> {
    prm.validate()?;
    let start = Instant::now();
    let constraint = local_min_constraint(prm, opts)?;
    let pb = Problem::new(init.grid().clone(), *prm);
    let cap = constraint.rho0.unwrap_or(f64::INFINITY);

    let mut u = init.modulus();
    pb.normalize(&mut u)?;
    if let Ok(v) = fiber_descend_init(&RadialField::from_real(pb.grid.clone(), u.clone())?, prm) {
        let cand = v.re();
        if grad_norm(&pb.breakdown(&cand)?) <= cap {
            u = cand;
        }
    }
    if grad_norm(&pb.breakdown(&u)?) > cap {
        return Err(Error::Parameter(format!(
            "initial profile has |∇u|₂ above the cap ρ₀ = {cap:.6}"
        )));
    }

    let mut tau = opts.tau_max;
    let mut history = Vec::new();
    let mut pinned = 0;
    let mut polish_at = opts.polish_below;
    let mut out = None;
    for it in 0..opts.max_iter {
        let r = pb.residual(&u)?;
        history.push(r.e.energy);
        if converged(&pb, &r.e, r.norm, opts) {
            out = Some(Outcome { u: u.clone(), iterations: it, newton: 0, history: history.clone() });
            break;
        }
        if polish_at.is_some_and(|t| r.norm < t) {
            let mut v = u.clone();
            if let Ok(k) = polish(&pb, &mut v, opts) {
                v.iter_mut().for_each(|x| *x = x.abs());
                let e = pb.breakdown(&v)?;
                if e.energy <= r.e.energy + 1e-10 * r.e.energy.abs().max(1.0) && grad_norm(&e) <= cap {
                    history.push(e.energy);
                    out = Some(Outcome { u: v, iterations: it, newton: k, history: history.clone() });
                    break;
                }
            }
            polish_at = Some(r.norm * 1e-2);
        }
        let d = pb.descent_direction(&u, &r.g, shift_for(opts, r.lambda));
        let slope = inner(&pb.grid, &r.r, &d);
        let mut accepted = false;
        let mut hit_cap = false;
        while tau >= opts.tau_min {
            let mut trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| (a - tau * b).abs()).collect();
            pb.normalize(&mut trial)?;
            let e = pb.breakdown(&trial)?;
            if grad_norm(&e) > cap {
                hit_cap = true;
                tau *= 0.5;
                continue;
            }
            if e.energy <= r.e.energy - ARMIJO * tau * slope {
                u = trial;
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        pinned = if hit_cap { pinned + 1 } else { 0 };
        if pinned >= opts.trap_patience {
            return Err(Error::BoundaryTrap { rho0: cap, steps: pinned });
        }
        if !accepted {
            return Err(Error::Stagnation { iteration: it, residual: r.norm });
        }
        tau = (2.0 * tau).min(opts.tau_max);
    }
    let out = out.ok_or_else(|| Error::Solver(format!("no convergence in {} iterations", opts.max_iter)))?;
    finish(&pb, SolveKind::LocalMin, constraint, out, start)
}

/// The largest strict maximum of the fiber through `u` and its value.
fn fiber_max(pb: &Problem, u: &[f64]) -> Result<(f64, f64)> {
    let fm = pb.breakdown(u)?.fiber(&pb.prm);
    let t = fm.max_point().ok_or_else(|| Error::regime("the fiber map has no maximum"))?;
    Ok((t, fm.psi(t)))
}

fn dilated(pb: &Problem, u: &[f64], t: f64) -> Result<Vec<f64>> {
    let mut v = dilate_real(&pb.grid, u, t);
    pb.normalize(&mut v)?;
    Ok(v)
}

/// Minimize `M(u) = max_s 𝒥(s⋆u)` on `S_a`, alternating fiber rescaling and
/// projected gradient steps.
pub fn mountain_pass(prm: &ProblemParams, init: &RadialField, opts: &SolverOptions) -> Result<SolveReport> {
    prm.validate()?;
    check_mountain_regime(prm, opts)?;
    let start = Instant::now();
    let pb = Problem::new(init.grid().clone(), *prm);
    let mut u = init.re();
    pb.normalize(&mut u)?;

    let polish_from = |u: &[f64]| -> Option<(Vec<f64>, usize)> {
        let mut v = u.to_vec();
        let k = polish(&pb, &mut v, opts).ok()?;
        Some((v, k))
    };

    let mut tau = opts.tau_max;
    let mut history = Vec::new();
    let mut polish_at = opts.polish_below;
    let (mut best, mut stalled) = (f64::INFINITY, 0);
    let mut out = None;
    for it in 0..opts.max_iter {
        let (t, mut level) = fiber_max(&pb, &u)?;
        if t.abs() > RESCALE_ABOVE {
            u = dilated(&pb, &u, t)?;
            level = fiber_max(&pb, &u)?.1;
        }
        if level < 0.0 {
            return Err(Error::BranchCapture { level });
        }
        history.push(level);
        let r = pb.residual(&u)?;
        if converged(&pb, &r.e, r.norm, opts) {
            out = Some(Outcome { u: u.clone(), iterations: it, newton: 0, history: history.clone() });
            break;
        }
        // Rescaling re-interpolates the profile, which caps how far M can be
        // driven down; once it stops moving Newton takes over.
        if level < best * (1.0 - 1e-12) {
            best = level;
            stalled = 0;
        } else {
            stalled += 1;
        }
        if polish_at.is_some_and(|p| r.norm < p) || stalled == STALL_STEPS {
            if let Some((v, k)) = polish_from(&u) {
                out = Some(Outcome { u: v, iterations: it, newton: k, history: history.clone() });
                break;
            }
            polish_at = polish_at.map(|p| p.min(r.norm * 1e-2));
        }
        if stalled > 2 * STALL_STEPS {
            return Err(Error::Stagnation { iteration: it, residual: r.norm });
        }
        let d = pb.descent_direction(&u, &r.g, shift_for(opts, r.lambda));
        let slope = inner(&pb.grid, &r.r, &d);
        let mut accepted = false;
        while tau >= opts.tau_min {
            let mut trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a - tau * b).collect();
            pb.normalize(&mut trial)?;
            match fiber_max(&pb, &trial) {
                Ok((_, m)) if m <= level - ARMIJO * tau * slope => {
                    u = trial;
                    accepted = true;
                    break;
                }
                _ => tau *= 0.5,
            }
        }
        if !accepted {
            if let Some((v, k)) = polish_from(&u) {
                out = Some(Outcome { u: v, iterations: it, newton: k, history: history.clone() });
                break;
            }
            return Err(Error::Stagnation { iteration: it, residual: r.norm });
        }
        tau = (2.0 * tau).min(opts.tau_max);
    }
    let out = out.ok_or_else(|| Error::Solver(format!("no convergence in {} iterations", opts.max_iter)))?;
    finish(&pb, SolveKind::MountainPass, ConstraintSet { a: prm.a, rho0: None }, out, start)
}

fn finish(pb: &Problem, kind: SolveKind, constraint: ConstraintSet, out: Outcome, start: Instant) -> Result<SolveReport> {
    let prm = &pb.prm;
    let mut out = out;
    pb.normalize(&mut out.u)?;
    let r = pb.residual(&out.u)?;
    let e = r.e;
    let lambda = r.lambda;
    let fm = e.fiber(prm);
    let a2 = prm.a * prm.a;
    let residuals = Residuals {
        euler_lagrange_l2: r.norm,
        pohozaev_p: e.pohozaev(prm).abs() / e.scale(prm),
        nehari: e.nehari_residual(lambda, prm).abs() / e.nehari_scale(lambda, prm),
        pohozaev_identity: e.pohozaev_identity_residual(lambda, prm).abs() / e.pohozaev_identity_scale(lambda, prm),
        mass: (e.mass2 - a2).abs() / a2,
    };
    if !(r.norm < 1e-6 * (1.0 + e.energy.abs())) {
        return Err(Error::Solver(format!("final residual {:.3e} too large", r.norm)));
    }
    let report = SolveReport {
        kind,
        params: *prm,
        grid: pb.grid.spec(),
        profile: RadialField::from_real(pb.grid.clone(), out.u)?,
        level: e.energy,
        lambda,
        energy: e,
        grad_norm: grad_norm(&e),
        residuals,
        fiber: fm.profile(),
        d2psi_at_zero: fm.d2psi(0.0),
        constraint,
        iterations: out.iterations,
        newton_iterations: out.newton,
        level_history: out.history,
        wall_time: start.elapsed(),
    };
    report.check_branch()?;
    Ok(report)
}

/// `‖u − v‖_{H¹} = (|∇(u−v)|₂² + |u−v|₂²)^{1/2}` for fields on one grid.
pub fn h1_distance(u: &RadialField, v: &RadialField) -> Result<f64> {
    u.check_same_grid(v)?;
    let d: Vec<_> = u.values().iter().zip(v.values()).map(|(a, b)| a - b).collect();
    Ok((radial::kinetic(u.grid(), &d) + crate::field::mass2(u.grid(), &d)).sqrt())
}

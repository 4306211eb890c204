use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evolve::{evolve_with, Diagnostics, EvolveOptions, Scheme};
use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::functionals::energy;
use crate::grid::RadialGrid;
use crate::solvers::{SolveKind, SolveReport};
use crate::spline::dilate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    OrbitStable,
    BlowUp,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub kind: VerdictKind,
    /// Orbit-distance bound tested, relative to `‖û‖_{H¹}`.
    pub epsilon: f64,
    /// Perturbation size relative to `‖û‖_{H¹}`, or the dilation `ϱ`.
    pub delta: f64,
    /// `sup_t min_θ ‖φ(t) − e^{iθ}û‖ / ‖û‖` over all runs.
    pub max_orbit_distance: Option<f64>,
    /// Some run reached `|∇φ|₂ > ρ₀`.
    pub left_ball: bool,
    /// `c_a − 𝒥(ϱ⋆û)`
    pub eta: Option<f64>,
    /// `sup_t P(φ(t))`
    pub max_pohozaev: Option<f64>,
    /// `H′` non-increasing along the run.
    pub concave: Option<bool>,
    /// Time at which `|∇φ|₂` reached the growth factor.
    pub trigger_time: Option<f64>,
    /// Positive root of `H(0) + H′(0)t − 4ηt²`.
    pub envelope_root: Option<f64>,
    pub gradient_growth: Option<f64>,
}

impl StabilityVerdict {
    fn empty(kind: VerdictKind, epsilon: f64, delta: f64) -> Self {
        StabilityVerdict {
            kind,
            epsilon,
            delta,
            max_orbit_distance: None,
            left_ball: false,
            eta: None,
            max_pohozaev: None,
            concave: None,
            trigger_time: None,
            envelope_root: None,
            gradient_growth: None,
        }
    }
}

/// `⟨u, φ⟩_{H¹}` (complex, conjugate-linear in `u`).
pub(crate) fn h1_inner(grid: &RadialGrid, u: &[Complex64], phi: &[Complex64]) -> Complex64 {
    let c = grid.conductance();
    let w = grid.weights();
    let mut s: Complex64 = (0..phi.len()).map(|i| u[i].conj() * phi[i] * w[i]).sum();
    for k in 0..grid.n() {
        s += (u[k] - u[k + 1]).conj() * (phi[k] - phi[k + 1]) * c[k];
    }
    s
}

/// `min_θ ‖φ − e^{iθ}u‖_{H¹}`, attained at `θ = arg⟨u, φ⟩`.
pub fn orbit_distance(u: &RadialField, phi: &RadialField) -> Result<f64> {
    u.check_same_grid(phi)?;
    Ok(orbit_distance_raw(u.grid(), u.values(), phi.values()))
}

fn orbit_distance_raw(grid: &RadialGrid, u: &[Complex64], phi: &[Complex64]) -> f64 {
    let uu = h1_inner(grid, u, u).re;
    let pp = h1_inner(grid, phi, phi).re;
    (uu + pp - 2.0 * h1_inner(grid, u, phi).norm()).max(0.0).sqrt()
}

/// Radial Hermite-type bump `H_{2k}(r/ℓ) e^{−r²/(2ℓ²)}`.
fn hermite_bump(r: f64, ell: f64, k: usize) -> f64 {
    let x = r / ell;
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    for n in 1..2 * k {
        let h2 = 2.0 * x * h1 - 2.0 * n as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    let h = if k == 0 { 1.0 } else { h1 };
    h * (-0.5 * x * x).exp()
}

/// `û + ξ` re-normalized to the mass of `û`, where `ξ` is a random complex
/// combination of the first `modes` radial Hermite bumps on the width of `û`,
/// scaled to `‖ξ‖_{H¹} = delta·‖û‖_{H¹}`.
pub fn perturb(u: &RadialField, delta: f64, modes: usize, seed: u64) -> Result<RadialField> {
    let grid = u.grid();
    let uv = u.values();
    let m = u.mass2();
    let r = grid.nodes();
    let w = grid.weights();
    let h: f64 = (0..uv.len()).map(|i| w[i] * r[i] * r[i] * uv[i].norm_sqr()).sum();
    let ell = (h / m).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coef: Vec<Complex64> = (0..modes.max(1))
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut xi: Vec<Complex64> = r
        .iter()
        .map(|&r| coef.iter().enumerate().map(|(k, c)| c * hermite_bump(r, ell, k)).sum())
        .collect();
    *xi.last_mut().unwrap() = Complex64::new(0.0, 0.0);
    let size = h1_inner(grid, &xi, &xi).re.sqrt();
    let target = delta * h1_inner(grid, uv, uv).re.sqrt();
    let scale = if size > 0.0 { target / size } else { 0.0 };
    let v: Vec<Complex64> = uv.iter().zip(&xi).map(|(a, b)| a + b * scale).collect();
    RadialField::new(grid.clone(), v)?.normalized(m.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StabilityOptions {
    pub dt: f64,
    pub scheme: Scheme,
    pub sample_every: usize,
    /// Verdict bound: `ε = epsilon_factor · δ`.
    pub epsilon_factor: f64,
    pub modes: usize,
    pub seed: u64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            dt: 1e-3,
            scheme: Scheme::Strang,
            sample_every: 50,
            epsilon_factor: 10.0,
            modes: 4,
            seed: 0,
        }
    }
}

/// Evolve `n_perturbations` random `δ`-perturbations of a local minimizer and
/// track the distance to its phase orbit.
pub fn stability_experiment(
    report: &SolveReport,
    n_perturbations: usize,
    delta: f64,
    t_final: f64,
    opts: &StabilityOptions,
) -> Result<StabilityVerdict> {
    if report.kind != SolveKind::LocalMin {
        return Err(Error::Parameter("stability runs start from a local minimizer".into()));
    }
    let u = &report.profile;
    let grid = u.grid().clone();
    let unorm = h1_inner(&grid, u.values(), u.values()).re.sqrt();
    let rho0 = report.constraint.rho0.unwrap_or(f64::INFINITY);
    let evolve_opts = EvolveOptions {
        t_final,
        dt: opts.dt,
        scheme: opts.scheme,
        sample_every: opts.sample_every,
        blowup_factor: f64::INFINITY,
        adaptive: None,
    };
    let runs: Vec<Result<(f64, bool)>> = (0..n_perturbations.max(1))
        .into_par_iter()
        .map(|k| {
            let phi0 = perturb(u, delta, opts.modes, opts.seed.wrapping_add(k as u64))?;
            let mut worst = 0.0f64;
            let mut left = false;
            evolve_with(&phi0, &report.params, &evolve_opts, |d: &Diagnostics, phi| {
                worst = worst.max(orbit_distance_raw(&grid, u.values(), phi));
                left |= d.grad_norm > rho0;
                Ok(())
            })?;
            Ok((worst / unorm, left))
        })
        .collect();
    let mut v = StabilityVerdict::empty(VerdictKind::Inconclusive, opts.epsilon_factor * delta, delta);
    let mut worst = 0.0f64;
    for r in runs {
        let (d, left) = r?;
        worst = worst.max(d);
        v.left_ball |= left;
    }
    v.max_orbit_distance = Some(worst);
    let eps = v.epsilon.max(1e-6);
    if worst <= eps && !v.left_ball {
        v.kind = VerdictKind::OrbitStable;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstabilityOptions {
    pub dt: f64,
    /// Adaptive step constant, see [`EvolveOptions::adaptive`].
    pub adaptive: f64,
    pub scheme: Scheme,
    /// Gradient growth that counts as blow-up.
    pub growth: f64,
    pub sample_every: usize,
    /// Relative slack on `P ≤ −η`, covering the energy drift of the scheme.
    pub eta_slack: f64,
}

impl Default for InstabilityOptions {
    fn default() -> Self {
        InstabilityOptions {
            dt: 1e-3,
            adaptive: 0.05,
            scheme: Scheme::Strang,
            growth: 10.0,
            sample_every: 1,
            eta_slack: 1e-2,
        }
    }
}

/// Evolve the dilated mountain-pass solution `ϱ⋆û` and test the virial
/// blow-up certificate.
pub fn instability_experiment(
    report: &SolveReport,
    rho: f64,
    t_final: f64,
    opts: &InstabilityOptions,
) -> Result<StabilityVerdict> {
    if report.kind != SolveKind::MountainPass {
        return Err(Error::Parameter("instability runs start from a mountain-pass solution".into()));
    }
    if !(rho > 0.0) {
        return Err(Error::Parameter("the dilation ϱ must be positive".into()));
    }
    let prm = &report.params;
    let phi0 = dilate(&report.profile, rho).normalized(prm.a)?;
    let eta = report.level - energy(&phi0, prm)?.energy;
    let state = evolve_with(
        &phi0,
        prm,
        &EvolveOptions {
            t_final,
            dt: opts.dt,
            scheme: opts.scheme,
            sample_every: opts.sample_every,
            blowup_factor: opts.growth,
            adaptive: Some(opts.adaptive),
        },
        |_, _| Ok(()),
    )?;
    let log = &state.log;
    let first = log[0];
    let mut v = StabilityVerdict::empty(VerdictKind::Inconclusive, f64::NAN, rho);
    v.eta = Some(eta);
    let pmax = log.iter().map(|d| d.pohozaev).fold(f64::NEG_INFINITY, f64::max);
    v.max_pohozaev = Some(pmax);
    let hp_scale = log.iter().map(|d| d.hp.abs()).fold(0.0, f64::max).max(1e-300);
    let concave = log.windows(2).all(|w| w[1].hp <= w[0].hp + 1e-9 * hp_scale);
    v.concave = Some(concave);
    v.gradient_growth = Some(log.last().unwrap().grad_norm / first.grad_norm);
    if eta > 0.0 {
        let (h0, h1) = (first.h, first.hp);
        v.envelope_root = Some((h1 + (h1 * h1 + 16.0 * eta * h0).sqrt()) / (8.0 * eta));
    }
    if state.blow_up {
        v.trigger_time = Some(state.t);
    }
    let p_ok = eta > 0.0 && pmax <= -eta * (1.0 - opts.eta_slack);
    let before_root = match (v.trigger_time, v.envelope_root) {
        (Some(t), Some(root)) => t < root,
        _ => false,
    };
    if state.blow_up && p_ok && concave && before_root {
        v.kind = VerdictKind::BlowUp;
    }
    Ok(v)
}

/// Largest relative deviation `max_i ||φ_i| − |u_i|| / max|u|`.
pub fn modulus_deviation(u: &RadialField, phi: &RadialField) -> Result<f64> {
    u.check_same_grid(phi)?;
    let umax = u.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    Ok(u.values()
        .iter()
        .zip(phi.values())
        .map(|(a, b)| (a.norm() - b.norm()).abs())
        .fold(0.0, f64::max)
        / umax)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::grid::{GridSpec, Spacing};
    use crate::params::ProblemParams;
    use crate::solvers::{gaussian_init, ground_state_local_min, SolverOptions};

    fn ground() -> SolveReport {
        let g = Arc::new(GridSpec { r_max: 200.0, n: 511, spacing: Spacing::Graded { stretch: 7.0 } }.build().unwrap());
        let prm = ProblemParams::new(2.19, 1.0, 4.0, 2.2).unwrap();
        ground_state_local_min(&prm, &gaussian_init(g, prm.a, 3.0).unwrap(), &SolverOptions::default()).unwrap()
    }

    #[test]
    fn orbit_distance_ignores_phase() {
        let r = ground();
        let u = &r.profile;
        let unorm = h1_inner(u.grid(), u.values(), u.values()).re.sqrt();
        for theta in [0.3, 1.7, -2.9] {
            let rot = Complex64::from_polar(1.0, theta);
            let v = RadialField::new(u.grid().clone(), u.values().iter().map(|z| z * rot).collect()).unwrap();
            assert!(orbit_distance(u, &v).unwrap() < 1e-6 * unorm);
            assert!(modulus_deviation(u, &v).unwrap() < 1e-12);
        }
        let p = perturb(u, 1e-2, 4, 3).unwrap();
        assert!((p.mass2() / u.mass2() - 1.0).abs() < 1e-12);
        let d = orbit_distance(u, &p).unwrap() / unorm;
        assert!(d > 1e-4 && d < 2e-2, "{d}");
        assert_eq!(perturb(u, 1e-2, 4, 3).unwrap().values(), p.values());
    }

    #[test]
    fn unperturbed_standing_wave_stays_on_orbit() {
        let r = ground();
        let opts = StabilityOptions { dt: 1e-2, sample_every: 10, ..Default::default() };
        let v = stability_experiment(&r, 1, 0.0, 2.0, &opts).unwrap();
        assert_eq!(v.kind, VerdictKind::OrbitStable);
        assert!(v.max_orbit_distance.unwrap() < 1e-6);
        assert!(!v.left_ball);
    }

    #[test]
    fn experiments_check_the_branch() {
        let r = ground();
        assert_eq!(instability_experiment(&r, 0.1, 1.0, &InstabilityOptions::default()).unwrap_err().exit_code(), 2);
    }
}

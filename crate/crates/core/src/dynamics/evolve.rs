use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{mass2, RadialField};
use crate::functionals::breakdown;
use crate::grid::RadialGrid;
use crate::params::ProblemParams;
use crate::radial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Half potential rotation, Cayley step for `−Δ`, half rotation.
    Strang,
    /// Implicit midpoint rule on the full equation, solved by fixed-point iteration.
    Cn,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strang" => Ok(Scheme::Strang),
            "cn" => Ok(Scheme::Cn),
            _ => Err(Error::Parameter(format!("unknown scheme '{s}' (strang|cn)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveOptions {
    pub t_final: f64,
    pub dt: f64,
    pub scheme: Scheme,
    /// Log diagnostics every `sample_every` steps (and at the final time).
    pub sample_every: usize,
    /// Stop with the blow-up flag once `|∇φ|₂` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
    /// When set, each step uses `min(dt, c / (max|V| + T/M))`.
    pub adaptive: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            t_final: 1.0,
            dt: 1e-3,
            scheme: Scheme::Strang,
            sample_every: 10,
            blowup_factor: 100.0,
            adaptive: None,
        }
    }
}

/// One row of the trajectory log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub mass2: f64,
    #[serde(rename = "J")]
    pub energy: f64,
    /// `∫|x|²|φ|²`
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "Hp")]
    pub hp: f64,
    #[serde(rename = "P")]
    pub pohozaev: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub t: f64,
    pub phi: RadialField,
    pub log: Vec<Diagnostics>,
    pub steps: usize,
    /// `|∇φ|₂` crossed the blow-up guard; the trajectory was truncated there.
    pub blow_up: bool,
}

impl EvolutionState {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.log {
            w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Largest `|mass2(t) − mass2(0)|/mass2(0)` over the log, per unit time.
    pub fn mass_drift_rate(&self) -> f64 {
        drift_rate(&self.log, |d| d.mass2)
    }

    /// Largest `|J(t) − J(0)|/max(|J(0)|, 1)` over the log, per unit time.
    pub fn energy_drift_rate(&self) -> f64 {
        drift_rate(&self.log, |d| d.energy)
    }
}

fn drift_rate(log: &[Diagnostics], f: impl Fn(&Diagnostics) -> f64) -> f64 {
    let Some(first) = log.first() else { return 0.0 };
    let f0 = f(first);
    let scale = f0.abs().max(1.0);
    let span = log.last().map_or(0.0, |d| d.t - first.t);
    if span <= 0.0 {
        return 0.0;
    }
    log.iter().map(|d| (f(d) - f0).abs() / scale).fold(0.0, f64::max) / span
}

/// `(H, H′)`: `H = Σ w r²|φ|²` and its exact derivative along the semi-discrete flow,
/// `H′ = 2 Im Σ_faces c (r_i² φ̄_i − r_j² φ̄_j)(φ_i − φ_j)`.
pub(crate) fn virial_pair(grid: &RadialGrid, phi: &[Complex64]) -> (f64, f64) {
    let r = grid.nodes();
    let w = grid.weights();
    let c = grid.conductance();
    let h = (0..phi.len()).map(|i| w[i] * r[i] * r[i] * phi[i].norm_sqr()).sum();
    let mut hp = 0.0;
    for k in 0..grid.n() {
        let (a, b) = (phi[k], phi[k + 1]);
        let z = (a.conj() * r[k] * r[k] - b.conj() * r[k + 1] * r[k + 1]) * (a - b);
        hp += c[k] * z.im;
    }
    (h, 2.0 * hp)
}

pub(crate) fn diagnostics(grid: &RadialGrid, phi: &[Complex64], prm: &ProblemParams, t: f64) -> Result<Diagnostics> {
    let e = breakdown(grid, phi, prm)?;
    let (h, hp) = virial_pair(grid, phi);
    Ok(Diagnostics {
        t,
        mass2: e.mass2,
        energy: e.energy,
        h,
        hp,
        pohozaev: e.pohozaev(prm),
        grad_norm: e.kinetic.sqrt(),
    })
}

/// `(H, H′, H″)` with `H″ = 8 P(φ)`.
pub fn virial_diagnostics(state: &EvolutionState, prm: &ProblemParams) -> Result<(f64, f64, f64)> {
    let d = diagnostics(state.phi.grid(), state.phi.values(), prm, state.t)?;
    Ok((d.h, d.hp, 8.0 * d.pohozaev))
}

/// `V = Φ_φ − |φ|^{p−2} − μ|φ|^{q−2}`
fn local_potential(grid: &RadialGrid, phi: &[Complex64], prm: &ProblemParams) -> Vec<f64> {
    let hartree = radial::hartree(grid, phi);
    phi.iter()
        .zip(hartree)
        .map(|(v, h)| {
            let m = v.norm();
            if m > 0.0 {
                h - m.powf(prm.p - 2.0) - prm.mu * m.powf(prm.q - 2.0)
            } else {
                h
            }
        })
        .collect()
}

fn rotate(phi: &mut [Complex64], v: &[f64], dt: f64) {
    for (z, v) in phi.iter_mut().zip(v) {
        *z *= Complex64::from_polar(1.0, -v * dt);
    }
}

fn strang_step(grid: &RadialGrid, phi: &mut Vec<Complex64>, prm: &ProblemParams, dt: f64) {
    let v = local_potential(grid, phi, prm);
    rotate(phi, &v, 0.5 * dt);
    *phi = radial::cayley_step(grid, phi, 0.5 * dt);
    let v = local_potential(grid, phi, prm);
    rotate(phi, &v, 0.5 * dt);
}

/// `(W + iθ(K + WV)) x = (W − iθ(K + WV)) φ` with `θ = dt/2`.
fn midpoint_solve(grid: &RadialGrid, phi: &[Complex64], v: &[f64], dt: f64) -> Vec<Complex64> {
    let n = grid.n();
    let c = grid.conductance();
    let w = grid.weights();
    let it = Complex64::new(0.0, 0.5 * dt);
    let k_phi = radial::stiffness(grid, phi);
    let rhs: Vec<Complex64> = (0..n).map(|i| phi[i] * w[i] - it * (k_phi[i] + phi[i] * (w[i] * v[i]))).collect();
    let zero = Complex64::new(0.0, 0.0);
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n);
    let mut sub = Vec::with_capacity(n);
    for i in 0..n {
        let k = c[i] + if i > 0 { c[i - 1] } else { 0.0 };
        diag.push(Complex64::new(w[i], 0.0) + it * (k + w[i] * v[i]));
        sup.push(-it * c[i]);
        sub.push(if i > 0 { -it * c[i - 1] } else { zero });
    }
    let mut x = radial::solve_tridiagonal(&sub, &diag, &sup, &rhs);
    x.push(zero);
    x
}

fn cn_step(grid: &RadialGrid, phi: &mut Vec<Complex64>, prm: &ProblemParams, dt: f64) -> Result<()> {
    let mut next = phi.clone();
    for _ in 0..50 {
        let mid: Vec<Complex64> = phi.iter().zip(&next).map(|(a, b)| (a + b) * 0.5).collect();
        let v = local_potential(grid, &mid, prm);
        let cand = midpoint_solve(grid, phi, &v, dt);
        let diff: f64 = cand.iter().zip(&next).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let size: f64 = cand.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        next = cand;
        if diff <= 1e-14 * size {
            *phi = next;
            return Ok(());
        }
    }
    Err(Error::Solver(format!("implicit midpoint iteration did not converge (dt = {dt:e})")))
}

fn adaptive_dt(grid: &RadialGrid, phi: &[Complex64], prm: &ProblemParams, dt: f64, c: f64) -> f64 {
    let v = local_potential(grid, phi, prm);
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let kin = radial::kinetic(grid, phi) / mass2(grid, phi);
    dt.min(c / (vmax + kin))
}

/// Integrate `iφ_t + Δφ − Φ_φ φ + |φ|^{p−2}φ + μ|φ|^{q−2}φ = 0` from `phi0`.
pub fn evolve(phi0: &RadialField, prm: &ProblemParams, opts: &EvolveOptions) -> Result<EvolutionState> {
    evolve_with(phi0, prm, opts, |_, _| Ok(()))
}

/// [`evolve`] with a callback on every logged sample (the current row and field).
pub fn evolve_with(
    phi0: &RadialField,
    prm: &ProblemParams,
    opts: &EvolveOptions,
    mut observe: impl FnMut(&Diagnostics, &[Complex64]) -> Result<()>,
) -> Result<EvolutionState> {
    prm.validate()?;
    if !(opts.dt > 0.0 && opts.t_final >= 0.0 && opts.dt.is_finite() && opts.t_final.is_finite()) {
        return Err(Error::Parameter("need dt > 0 and a finite horizon T ≥ 0".into()));
    }
    let grid: Arc<RadialGrid> = phi0.grid().clone();
    let mut phi = phi0.values().to_vec();
    let first = diagnostics(&grid, &phi, prm, 0.0)?;
    observe(&first, &phi)?;
    let guard = opts.blowup_factor * first.grad_norm;
    let mut log = vec![first];
    let every = opts.sample_every.max(1);
    let (mut t, mut steps, mut blow_up) = (0.0, 0usize, false);
    while t < opts.t_final * (1.0 - 1e-12) {
        let mut dt = match opts.adaptive {
            Some(c) => adaptive_dt(&grid, &phi, prm, opts.dt, c),
            None => opts.dt,
        };
        dt = dt.min(opts.t_final - t);
        match opts.scheme {
            Scheme::Strang => strang_step(&grid, &mut phi, prm, dt),
            Scheme::Cn => cn_step(&grid, &mut phi, prm, dt)?,
        }
        t += dt;
        steps += 1;
        let last = t >= opts.t_final * (1.0 - 1e-12);
        let check = steps % every == 0 || last || opts.adaptive.is_some();
        if check {
            let d = diagnostics(&grid, &phi, prm, t)?;
            if steps % every == 0 || last || d.grad_norm > guard {
                observe(&d, &phi)?;
                log.push(d);
            }
            if d.grad_norm > guard {
                blow_up = true;
                break;
            }
        }
    }
    Ok(EvolutionState {
        t,
        phi: RadialField::new(grid, phi)?,
        log,
        steps,
        blow_up,
    })
}

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::grid::{GridSpec, RadialGrid, Spacing};
use crate::radial;
use crate::spline::CubicSpline;

const R_END: f64 = 30.0;
const STEP: f64 = 1e-3;

/// Radial ODE data of the positive solution of `−ΔQ + Q = Q^{t−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingData {
    pub t: f64,
    pub tol: f64,
    /// `Q(0)`
    pub q0: f64,
    pub mass2: f64,
    pub kinetic: f64,
    /// `|Q|_t^t`
    pub power: f64,
    /// Radius where the retained trajectory was cut off.
    pub r_cut: f64,
}

impl ShootingData {
    /// `C_t^t` from the closed formula in terms of `|Q_t|₂`.
    pub fn c_t_pow(&self) -> f64 {
        gn_prefactor(self.t) / self.mass2.powf((self.t - 2.0) / 2.0)
    }
}

/// `2t/(6−t) · ((6−t)/(3(t−2)))^{3(t−2)/4}`
pub fn gn_prefactor(t: f64) -> f64 {
    2.0 * t / (6.0 - t) * ((6.0 - t) / (3.0 * (t - 2.0))).powf(3.0 * (t - 2.0) / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    /// Q crossed zero: the initial value was too large.
    Over,
    /// Q turned upward while positive: too small.
    Under,
}

struct Trajectory {
    outcome: Outcome,
    r: Vec<f64>,
    q: Vec<f64>,
    /// `(mass2, kinetic, power)` accumulated up to each sample.
    integrals: Vec<[f64; 3]>,
}

fn rhs(t: f64, r: f64, y: &[f64; 5]) -> [f64; 5] {
    let (q, dq) = (y[0], y[1]);
    let nl = q.abs().powf(t - 2.0) * q;
    let w = 4.0 * PI * r * r;
    [
        dq,
        -2.0 / r * dq + q - nl,
        w * q * q,
        w * dq * dq,
        w * q.abs().powf(t),
    ]
}

fn integrate(t: f64, q0: f64, keep: bool) -> Trajectory {
    let h = STEP;
    let q2 = (q0 - q0.powf(t - 1.0)) / 3.0;
    // series start on [0, h]
    let mut y = [
        q0 + q2 * h * h / 2.0,
        q2 * h,
        4.0 * PI * q0 * q0 * h.powi(3) / 3.0,
        4.0 * PI * q2 * q2 * h.powi(5) / 5.0,
        4.0 * PI * q0.powf(t) * h.powi(3) / 3.0,
    ];
    let mut r = h;
    let mut traj = Trajectory {
        outcome: Outcome::Under,
        r: vec![0.0],
        q: vec![q0],
        integrals: vec![[0.0; 3]],
    };
    let push = |traj: &mut Trajectory, r: f64, y: &[f64; 5]| {
        traj.r.push(r);
        traj.q.push(y[0]);
        traj.integrals.push([y[2], y[3], y[4]]);
    };
    if keep {
        push(&mut traj, r, &y);
    }
    let add = |a: &[f64; 5], k: &[f64; 5], c: f64| -> [f64; 5] {
        let mut o = *a;
        for i in 0..5 {
            o[i] += c * k[i];
        }
        o
    };
    while r < R_END {
        let k1 = rhs(t, r, &y);
        let k2 = rhs(t, r + h / 2.0, &add(&y, &k1, h / 2.0));
        let k3 = rhs(t, r + h / 2.0, &add(&y, &k2, h / 2.0));
        let k4 = rhs(t, r + h, &add(&y, &k3, h));
        for i in 0..5 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        r += h;
        if y[0] < 0.0 {
            traj.outcome = Outcome::Over;
            return traj;
        }
        if y[1] > 0.0 {
            traj.outcome = Outcome::Under;
            return traj;
        }
        if keep {
            push(&mut traj, r, &y);
        }
    }
    traj
}

fn shoot_raw(t: f64, tol: f64) -> Result<(f64, Trajectory)> {
    if !(t > 2.0 && t < 6.0) {
        return Err(Error::Parameter(format!("soliton exponent t = {t} outside (2, 6)")));
    }
    let (mut lo, mut hi) = (1.0, 10.0);
    let mut widen = 0;
    while integrate(t, hi, false).outcome != Outcome::Over {
        hi *= 2.0;
        widen += 1;
        if widen > 20 {
            return Err(Error::Bracket { t, lo, hi });
        }
    }
    while integrate(t, lo, false).outcome != Outcome::Under {
        lo /= 2.0;
        widen += 1;
        if widen > 40 {
            return Err(Error::Bracket { t, lo, hi });
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match integrate(t, mid, false).outcome {
            Outcome::Over => hi = mid,
            Outcome::Under => lo = mid,
        }
    }
    Ok((lo, integrate(t, lo, true)))
}

/// Shooting on `Q″ + (2/r)Q′ − Q + Q^{t−1} = 0`, `Q′(0) = 0`, bisecting on `Q(0)`.
pub fn shoot(t: f64, tol: f64) -> Result<ShootingData> {
    let (q0, traj) = shoot_raw(t, tol)?;
    let last = traj.integrals.last().copied().unwrap_or([0.0; 3]);
    Ok(ShootingData {
        t,
        tol,
        q0,
        mass2: last[0],
        kinetic: last[1],
        power: last[2],
        r_cut: *traj.r.last().unwrap(),
    })
}

/// The soliton `Q_t` resolved on a grid.
#[derive(Debug, Clone)]
pub struct GnSoliton {
    pub t: f64,
    pub data: ShootingData,
    pub profile: RadialField,
    /// `|Q|₂²` from the ODE integration.
    pub mass2: f64,
    /// `C_t^t`
    pub c_t_pow: f64,
    /// Weighted L² norm of `−ΔQ + Q − Q^{t−1}` on the grid.
    pub residual: f64,
}

pub fn default_soliton_grid() -> GridSpec {
    GridSpec {
        r_max: R_END,
        n: 8192,
        spacing: Spacing::Graded { stretch: 2.0 },
    }
}

fn discrete_residual(grid: &RadialGrid, q: &[f64], t: f64) -> Vec<f64> {
    let lap = radial::laplacian(grid, q);
    let mut f: Vec<f64> = (0..grid.len())
        .map(|i| -lap[i] + q[i] - q[i].abs().powf(t - 2.0) * q[i])
        .collect();
    *f.last_mut().unwrap() = 0.0;
    f
}

fn weighted_norm(grid: &RadialGrid, f: &[f64]) -> f64 {
    grid.weights().iter().zip(f).map(|(w, v)| w * v * v).sum::<f64>().sqrt()
}

/// Solve for `Q_t` by shooting, then Newton-polish the profile on `grid` so that the
/// discrete equation holds to round-off.
pub fn solve_soliton_on(t: f64, tol: f64, grid: Arc<RadialGrid>) -> Result<GnSoliton> {
    let (q0, traj) = shoot_raw(t, tol)?;
    let data = {
        let last = *traj.integrals.last().unwrap();
        ShootingData {
            t,
            tol,
            q0,
            mass2: last[0],
            kinetic: last[1],
            power: last[2],
            r_cut: *traj.r.last().unwrap(),
        }
    };
    let r_cut = data.r_cut;
    let q_cut = *traj.q.last().unwrap();
    let sp = CubicSpline::clamped_natural(traj.r.clone(), traj.q.clone());
    let mut q: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| {
            if r <= r_cut {
                sp.eval(r)
            } else {
                q_cut * r_cut / r * (r_cut - r).exp()
            }
        })
        .collect();
    *q.last_mut().unwrap() = 0.0;

    let n = grid.n();
    let c = grid.conductance();
    let w = grid.weights();
    let mut residual = weighted_norm(&grid, &discrete_residual(&grid, &q, t));
    for _ in 0..50 {
        if residual < 1e-12 {
            break;
        }
        let f = discrete_residual(&grid, &q, t);
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        for i in 0..n {
            let k = c[i] + if i > 0 { c[i - 1] } else { 0.0 };
            diag[i] = k / w[i] + 1.0 - (t - 1.0) * q[i].abs().powf(t - 2.0);
            sup[i] = -c[i] / w[i];
            if i > 0 {
                sub[i] = -c[i - 1] / w[i];
            }
        }
        let rhs: Vec<f64> = f[..n].iter().map(|v| -v).collect();
        let dq = radial::solve_tridiagonal(&sub, &diag, &sup, &rhs);
        for i in 0..n {
            q[i] += dq[i];
        }
        let next = weighted_norm(&grid, &discrete_residual(&grid, &q, t));
        if !next.is_finite() {
            return Err(Error::NonFinite("soliton Newton polish"));
        }
        residual = next;
    }
    if q[..n].iter().any(|&v| v <= 0.0) {
        return Err(Error::Solver(format!(
            "discrete soliton for t = {t} lost positivity; refine the grid"
        )));
    }
    let profile = RadialField::from_real(grid, q)?;
    Ok(GnSoliton {
        t,
        data,
        profile,
        mass2: data.mass2,
        c_t_pow: data.c_t_pow(),
        residual,
    })
}

pub fn solve_soliton(t: f64, tol: f64) -> Result<GnSoliton> {
    solve_soliton_on(t, tol, Arc::new(default_soliton_grid().build()?))
}

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{inner, mass2, Amplitude};
use crate::functionals::{breakdown, EnergyBreakdown};
use crate::grid::RadialGrid;
use crate::linalg::{gmres, GmresOptions};
use crate::params::ProblemParams;
use crate::radial;

/// A parameter set bound to a grid; all work is on real profiles.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub grid: Arc<RadialGrid>,
    pub prm: ProblemParams,
}

pub(crate) struct Residual {
    pub e: EnergyBreakdown,
    pub lambda: f64,
    pub g: Vec<f64>,
    /// `G + λu`
    pub r: Vec<f64>,
    /// `‖G + λu‖ / ‖u‖`
    pub norm: f64,
}

/// `−Δu + Φ_u u − |u|^{p−2}u − μ|u|^{q−2}u`
pub(crate) fn gradient<T: Amplitude>(grid: &RadialGrid, u: &[T], prm: &ProblemParams) -> Vec<T> {
    let lap = radial::laplacian(grid, u);
    let phi = radial::hartree(grid, u);
    let mut g: Vec<T> = (0..u.len())
        .map(|i| {
            let m = u[i].modulus();
            let nl = if m > 0.0 {
                m.powf(prm.p - 2.0) + prm.mu * m.powf(prm.q - 2.0)
            } else {
                0.0
            };
            -lap[i] + u[i] * (phi[i] - nl)
        })
        .collect();
    *g.last_mut().unwrap() = T::default();
    g
}

impl Problem {
    pub fn new(grid: Arc<RadialGrid>, prm: ProblemParams) -> Self {
        Problem { grid, prm }
    }

    pub fn breakdown(&self, u: &[f64]) -> Result<EnergyBreakdown> {
        breakdown(&self.grid, u, &self.prm)
    }

    pub fn normalize(&self, u: &mut [f64]) -> Result<()> {
        *u.last_mut().unwrap() = 0.0;
        let m = mass2(&self.grid, u);
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::NonFinite("normalization"));
        }
        let c = self.prm.a / m.sqrt();
        u.iter_mut().for_each(|v| *v *= c);
        Ok(())
    }

    pub fn residual(&self, u: &[f64]) -> Result<Residual> {
        let e = self.breakdown(u)?;
        let g = gradient(&self.grid, u, &self.prm);
        let lambda = -inner(&self.grid, &g, u) / e.mass2;
        let mut r: Vec<f64> = g.iter().zip(u).map(|(g, u)| g + lambda * u).collect();
        *r.last_mut().unwrap() = 0.0;
        let norm = (inner(&self.grid, &r, &r) / e.mass2).sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite("Euler–Lagrange residual"));
        }
        Ok(Residual { e, lambda, g, r, norm })
    }

    /// Sobolev-preconditioned gradient projected onto the tangent space of the sphere.
    pub fn descent_direction(&self, u: &[f64], g: &[f64], sigma: f64) -> Vec<f64> {
        let pg = radial::shifted_stiffness_solve(&self.grid, g, sigma);
        let pu = radial::shifted_stiffness_solve(&self.grid, u, sigma);
        let c = inner(&self.grid, u, &pg) / inner(&self.grid, u, &pu);
        pg.iter().zip(&pu).map(|(a, b)| a - c * b).collect()
    }

    fn pointwise_potential(&self, u: &[f64], phi: &[f64], lambda: f64) -> Vec<f64> {
        let (p, q, mu) = (self.prm.p, self.prm.q, self.prm.mu);
        u.iter()
            .zip(phi)
            .map(|(v, f)| {
                let m = v.abs();
                let nl = if m > 0.0 {
                    (p - 1.0) * m.powf(p - 2.0) + mu * (q - 1.0) * m.powf(q - 2.0)
                } else {
                    0.0
                };
                f - nl + lambda
            })
            .collect()
    }

    fn newton_residual(&self, u: &[f64], lambda: f64) -> Result<(Vec<f64>, f64)> {
        let n = self.grid.n();
        let g = gradient(&self.grid, u, &self.prm);
        let mut f: Vec<f64> = g.iter().zip(u).map(|(g, u)| g + lambda * u).collect();
        f[n] = 0.5 * (mass2(&self.grid, u) - self.prm.a * self.prm.a);
        let m = mass2(&self.grid, u);
        let w = self.grid.weights();
        let el: f64 = (0..n).map(|i| w[i] * f[i] * f[i]).sum::<f64>() / m;
        let norm = (el + (f[n] / m).powi(2)).sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite("Newton residual"));
        }
        Ok((f, norm))
    }

    /// Newton–GMRES on `G(u) + λu = 0`, `|u|₂² = a²`, starting from `(u, λ)`.
    /// Returns the number of Newton steps taken.
    pub fn newton_polish(&self, u: &mut Vec<f64>, lambda: &mut f64, tol: f64, max_iter: usize) -> Result<usize> {
        let n = self.grid.n();
        let grid = &self.grid;
        let c = grid.conductance();
        let w = grid.weights();
        let (_, mut norm) = self.newton_residual(u, *lambda)?;
        let initial = norm;
        for it in 0..max_iter {
            if it >= 3 && norm > 1e-2 * initial {
                return Err(Error::Solver(format!(
                    "Newton polish is not contracting (residual {initial:.3e} → {norm:.3e})"
                )));
            }
            if norm < tol {
                return Ok(it);
            }
            let (f, _) = self.newton_residual(u, *lambda)?;
            let phi = radial::hartree(grid, &u[..]);
            let pot = self.pointwise_potential(u, &phi, *lambda);
            let uu = u.clone();
            let apply = |x: &[f64]| -> Vec<f64> {
                let mut du = x.to_vec();
                let dl = du[n];
                du[n] = 0.0;
                let lap = radial::laplacian(grid, &du);
                let rho: Vec<f64> = uu.iter().zip(&du).map(|(a, b)| 2.0 * a * b).collect();
                let dphi = radial::newton_potential(grid, &rho);
                let mut y: Vec<f64> = (0..=n)
                    .map(|i| -lap[i] + pot[i] * du[i] + uu[i] * dphi[i] + dl * uu[i])
                    .collect();
                y[n] = inner(grid, &uu, &du);
                y
            };
            let mut sub = vec![0.0; n];
            let mut diag = vec![0.0; n];
            let mut sup = vec![0.0; n];
            for i in 0..n {
                let k = c[i] + if i > 0 { c[i - 1] } else { 0.0 };
                diag[i] = k / w[i] + pot[i].max(0.0) + 1.0;
                sup[i] = -c[i] / w[i];
                if i > 0 {
                    sub[i] = -c[i - 1] / w[i];
                }
            }
            let precond = |x: &[f64]| -> Vec<f64> {
                let mut y = radial::solve_tridiagonal(&sub, &diag, &sup, &x[..n]);
                y.push(x[n]);
                y
            };
            let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
            let mut dx = vec![0.0; n + 1];
            gmres(
                apply,
                precond,
                &rhs,
                &mut dx,
                GmresOptions {
                    restart: 150,
                    max_restarts: 10,
                    rtol: 1e-10,
                },
            );
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..12 {
                let mut trial = u.clone();
                for i in 0..n {
                    trial[i] += step * dx[i];
                }
                let tl = *lambda + step * dx[n];
                if let Ok((_, tn)) = self.newton_residual(&trial, tl) {
                    if tn < norm {
                        *u = trial;
                        *lambda = tl;
                        norm = tn;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                return Err(Error::Solver(format!(
                    "Newton polish made no progress at residual {norm:.3e}"
                )));
            }
        }
        if norm < tol {
            Ok(max_iter)
        } else {
            Err(Error::Solver(format!(
                "Newton polish did not reach {tol:.1e} (residual {norm:.3e})"
            )))
        }
    }
}

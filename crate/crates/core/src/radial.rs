//! Discrete radial operators: kinetic form, Laplacian, Newton potential.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;

use crate::error::Result;
use crate::field::{Amplitude, RadialField};
use crate::grid::RadialGrid;

/// `|∇u|₂² = Σ c_i |u_{i+1} − u_i|²`
pub fn kinetic<T: Amplitude>(grid: &RadialGrid, u: &[T]) -> f64 {
    grid.conductance()
        .iter()
        .zip(u.windows(2))
        .map(|(c, w)| c * (w[1] - w[0]).norm_sqr())
        .sum()
}

/// `Re ⟨∇u, ∇v⟩`
pub fn kinetic_inner<T: Amplitude>(grid: &RadialGrid, u: &[T], v: &[T]) -> f64 {
    grid.conductance()
        .iter()
        .zip(u.windows(2).zip(v.windows(2)))
        .map(|(c, (a, b))| c * (a[1] - a[0]).dot(b[1] - b[0]))
        .sum()
}

/// Stiffness action `(K u)_i`, so that `Δu = −(K u)_i / w_i`. The boundary entry is zero.
pub fn stiffness<T: Amplitude>(grid: &RadialGrid, u: &[T]) -> Vec<T> {
    let n = grid.n();
    let c = grid.conductance();
    let mut out = vec![T::default(); n + 1];
    for i in 0..n {
        let flux = (u[i] - u[i + 1]) * c[i];
        out[i] = out[i] + flux;
        if i + 1 < n {
            out[i + 1] = out[i + 1] - flux;
        }
    }
    out
}

pub fn laplacian<T: Amplitude>(grid: &RadialGrid, u: &[T]) -> Vec<T> {
    let mut k = stiffness(grid, u);
    for (v, w) in k.iter_mut().zip(grid.weights()) {
        *v = -*v / *w;
    }
    *k.last_mut().unwrap() = T::default();
    k
}

/// Newton potential of the density `ρ` (not multiplied by weights):
/// `Φ_i = (1/r_i) Σ_{j≤i} w_j ρ_j + Σ_{j>i} w_j ρ_j / r_j`.
pub fn newton_potential(grid: &RadialGrid, rho: &[f64]) -> Vec<f64> {
    let r = grid.nodes();
    let w = grid.weights();
    let len = r.len();
    let mut out = vec![0.0; len];
    let mut suffix = 0.0;
    for i in (0..len).rev() {
        out[i] = suffix;
        suffix += w[i] * rho[i] / r[i];
    }
    let mut prefix = 0.0;
    for i in 0..len {
        prefix += w[i] * rho[i];
        out[i] += prefix / r[i];
    }
    out
}

pub fn hartree<T: Amplitude>(grid: &RadialGrid, u: &[T]) -> Vec<f64> {
    let rho: Vec<f64> = u.iter().map(|v| v.norm_sqr()).collect();
    newton_potential(grid, &rho)
}

/// `D(u) = Σ w_i Φ_u(r_i) |u_i|²`
pub fn double_energy_slice<T: Amplitude>(grid: &RadialGrid, u: &[T]) -> f64 {
    let phi = hartree(grid, u);
    grid.weights()
        .iter()
        .zip(u.iter().zip(&phi))
        .map(|(w, (v, f))| w * v.norm_sqr() * f)
        .sum()
}

/// Δu for a radial field, with Dirichlet data at `r_max`.
pub fn laplacian_radial(u: &RadialField) -> Result<RadialField> {
    RadialField::new(u.grid().clone(), laplacian(u.grid(), u.values()))
}

/// `Φ_u = |x|^{-1} * |u|²`, returned as a real field (its boundary sample is dropped).
pub fn hartree_potential(u: &RadialField) -> Vec<f64> {
    hartree(u.grid(), u.values())
}

pub fn double_energy(u: &RadialField) -> f64 {
    double_energy_slice(u.grid(), u.values())
}

/// Thomas algorithm for `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
/// `sub[0]` and `sup[last]` are ignored.
pub fn solve_tridiagonal<T>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    let n = diag.len();
    let mut cp = Vec::with_capacity(n);
    let mut dp = Vec::with_capacity(n);
    cp.push(sup[0] / diag[0]);
    dp.push(rhs[0] / diag[0]);
    for i in 1..n {
        let m = diag[i] - sub[i] * cp[i - 1];
        cp.push(sup[i] / m);
        dp.push((rhs[i] - sub[i] * dp[i - 1]) / m);
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        x[i] = x[i] - cp[i] * x[i + 1];
    }
    x
}

/// Solve `(K + σ W) x = W g` on the interior nodes; `x` vanishes on the boundary.
pub fn shifted_stiffness_solve(grid: &RadialGrid, g: &[f64], sigma: f64) -> Vec<f64> {
    let n = grid.n();
    let c = grid.conductance();
    let w = grid.weights();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for i in 0..n {
        diag[i] = c[i] + if i > 0 { c[i - 1] } else { 0.0 } + sigma * w[i];
        off[i] = -c[i];
    }
    let mut sub = vec![0.0; n];
    sub[1..n].copy_from_slice(&off[..n - 1]);
    let rhs: Vec<f64> = (0..n).map(|i| w[i] * g[i]).collect();
    let mut x = solve_tridiagonal(&sub, &diag, &off, &rhs);
    x.push(0.0);
    x
}

/// One Cayley step `(W + iθK) x = (W − iθK) u` for the linear Schrödinger flow.
pub fn cayley_step(grid: &RadialGrid, u: &[Complex64], theta: f64) -> Vec<Complex64> {
    let n = grid.n();
    let c = grid.conductance();
    let w = grid.weights();
    let it = Complex64::new(0.0, theta);
    let ku = stiffness(grid, u);
    let rhs: Vec<Complex64> = (0..n).map(|i| u[i] * w[i] - it * ku[i]).collect();
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n);
    let mut sub = Vec::with_capacity(n);
    for i in 0..n {
        let k = c[i] + if i > 0 { c[i - 1] } else { 0.0 };
        diag.push(Complex64::new(w[i], 0.0) + it * k);
        sup.push(-it * c[i]);
        sub.push(if i > 0 { -it * c[i - 1] } else { Complex64::new(0.0, 0.0) });
    }
    let mut x = solve_tridiagonal(&sub, &diag, &sup, &rhs);
    x.push(Complex64::new(0.0, 0.0));
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::inner;
    use crate::grid::{make_grid, Spacing};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn uniform(r_max: f64, n: usize) -> Arc<RadialGrid> {
        Arc::new(make_grid(r_max, n, Spacing::Uniform).unwrap())
    }

    #[test]
    fn gaussian_laplacian_second_order() {
        let err = |n| {
            let g = uniform(10.0, n);
            let u: Vec<f64> = g.nodes().iter().map(|r| (-r * r).exp()).collect();
            let l = laplacian(&g, &u);
            g.nodes()[..g.n()]
                .iter()
                .zip(&l)
                .map(|(r, v)| (v - (4.0 * r * r - 6.0) * (-r * r).exp()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(511), err(1023));
        assert!(e1 < 1e-2, "{e1}");
        assert!((e1 / e2).log2() > 1.8, "{e1} {e2}");
    }

    #[test]
    fn constant_has_zero_interior_laplacian() {
        let g = uniform(10.0, 256);
        let u = vec![1.0; g.len()];
        let l = laplacian(&g, &u);
        assert!(l[..g.n() - 1].iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn spherical_bessel_eigenfunction() {
        let r_max = 20.0;
        let k = 3.0 * PI / r_max;
        let err = |n| {
            let g = uniform(r_max, n);
            let u: Vec<f64> = g.nodes().iter().map(|r| (k * r).sin() / r).collect();
            let l = laplacian(&g, &u);
            (0..g.n())
                .map(|i| (l[i] + k * k * u[i]).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(1023), err(2047));
        assert!(e1 < 1e-4, "{e1}");
        assert!((e1 / e2).log2() > 1.8);
    }

    #[test]
    fn laplacian_is_self_adjoint() {
        let g = Arc::new(make_grid(15.0, 300, Spacing::Graded { stretch: 4.0 }).unwrap());
        let mut u: Vec<f64> = g.nodes().iter().map(|r| (-r).exp() * (1.0 + r.sin())).collect();
        let mut v: Vec<f64> = g.nodes().iter().map(|r| (-(r * r) / 9.0).exp() * r.cos()).collect();
        *u.last_mut().unwrap() = 0.0;
        *v.last_mut().unwrap() = 0.0;
        let a = inner(&g, &laplacian(&g, &u), &v);
        let b = inner(&g, &u, &laplacian(&g, &v));
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        // −⟨Δu, u⟩ equals the kinetic form
        let t = -inner(&g, &laplacian(&g, &u), &u);
        assert!((t / kinetic(&g, &u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hartree_matches_double_sum() {
        let g = Arc::new(make_grid(8.0, 64, Spacing::Graded { stretch: 2.0 }).unwrap());
        let u: Vec<f64> = g.nodes().iter().map(|r| (1.0 + r) * (-r).exp()).collect();
        let phi = hartree(&g, &u);
        let (r, w) = (g.nodes(), g.weights());
        for i in 0..g.len() {
            let d: f64 = (0..g.len())
                .map(|j| w[j] * u[j] * u[j] * (1.0 / r[i]).min(1.0 / r[j]))
                .sum();
            assert!((phi[i] - d).abs() <= 1e-10 * d.abs());
        }
    }

    #[test]
    fn hartree_far_field_and_zero() {
        let g = uniform(40.0, 2048);
        let u: Vec<f64> = g.nodes().iter().map(|r| (-4.0 * r * r).exp()).collect();
        let m: f64 = crate::field::mass2(&g, &u);
        let phi = hartree(&g, &u);
        for (r, f) in g.nodes().iter().zip(&phi) {
            assert!(*f >= 0.0);
            if *r > 5.0 {
                assert!((f * r / m - 1.0).abs() < 1e-12);
            }
        }
        let z = vec![0.0; g.len()];
        assert!(hartree(&g, &z).iter().all(|&v| v == 0.0));
        assert_eq!(double_energy_slice(&g, &z), 0.0);
    }

    #[test]
    fn shifted_solve_inverts() {
        let g = Arc::new(make_grid(10.0, 100, Spacing::Graded { stretch: 3.0 }).unwrap());
        let mut x: Vec<f64> = g.nodes().iter().map(|r| (-r).exp()).collect();
        *x.last_mut().unwrap() = 0.0;
        let kx = stiffness(&g, &x);
        let g_rhs: Vec<f64> = (0..g.len())
            .map(|i| (kx[i] + 0.7 * g.weights()[i] * x[i]) / g.weights()[i])
            .collect();
        let y = shifted_stiffness_solve(&g, &g_rhs, 0.7);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cayley_step_is_unitary() {
        let g = Arc::new(make_grid(10.0, 200, Spacing::Graded { stretch: 3.0 }).unwrap());
        let u: Vec<Complex64> = g
            .nodes()
            .iter()
            .map(|r| Complex64::new((-r * r).exp(), r * (-r).exp()))
            .collect();
        let mut u = u;
        *u.last_mut().unwrap() = Complex64::new(0.0, 0.0);
        let v = cayley_step(&g, &u, 0.37);
        let m0 = crate::field::mass2(&g, &u[..]);
        let m1 = crate::field::mass2(&g, &v[..]);
        assert!((m0 - m1).abs() < 1e-13 * m0);
        assert!((kinetic(&g, &u) - kinetic(&g, &v)).abs() < 1e-11 * kinetic(&g, &u));
    }
}

//! Cubic interpolation of radial profiles, used for dilations and regridding.

use num_complex::Complex64;

use crate::field::RadialField;
use crate::grid::RadialGrid;

/// Cubic spline through `(x_k, y_k)` with zero slope at the first knot and a natural
/// end at the last one.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn clamped_natural(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 3 && y.len() == n);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        // clamped: 2h0 m0 + h0 m1 = 6((y1 − y0)/h0 − 0)
        diag[0] = 2.0 * h[0];
        sup[0] = h[0];
        rhs[0] = 6.0 * (y[1] - y[0]) / h[0];
        for i in 1..n - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        diag[n - 1] = 1.0;
        let m = crate::radial::solve_tridiagonal(&sub, &diag, &sup, &rhs);
        CubicSpline { x, y, m }
    }

    /// Spline through the even extension of a profile: the value at the origin is
    /// extrapolated quadratically in `r`.
    pub fn radial(grid: &RadialGrid, values: &[f64]) -> Self {
        let r = grid.nodes();
        let (r1, r2) = (r[0] * r[0], r[1] * r[1]);
        let y0 = (r2 * values[0] - r1 * values[1]) / (r2 - r1);
        let mut x = Vec::with_capacity(r.len() + 1);
        x.push(0.0);
        x.extend_from_slice(r);
        let mut y = Vec::with_capacity(r.len() + 1);
        y.push(y0);
        y.extend_from_slice(values);
        Self::clamped_natural(x, y)
    }

    /// Evaluate; zero beyond the last knot.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t > self.x[n - 1] {
            return 0.0;
        }
        let t = t.max(self.x[0]);
        let k = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        self.eval_in(k, t)
    }

    fn eval_in(&self, k: usize, t: f64) -> f64 {
        let h = self.x[k + 1] - self.x[k];
        let a = (self.x[k + 1] - t) / h;
        let b = (t - self.x[k]) / h;
        a * self.y[k]
            + b * self.y[k + 1]
            + ((a * a * a - a) * self.m[k] + (b * b * b - b) * self.m[k + 1]) * h * h / 6.0
    }

    /// Evaluate at increasing abscissae with a moving cursor.
    pub fn eval_sorted(&self, ts: &[f64]) -> Vec<f64> {
        let n = self.x.len();
        let mut k = 0;
        ts.iter()
            .map(|&t| {
                if t > self.x[n - 1] {
                    return 0.0;
                }
                let t = t.max(self.x[0]);
                while k + 2 < n && self.x[k + 1] < t {
                    k += 1;
                }
                self.eval_in(k, t)
            })
            .collect()
    }
}

/// `(s⋆u)(r) = e^{3s/2} u(e^s r)` on the grid of `u`, with zero extension past `r_max`.
pub fn dilate_real(grid: &RadialGrid, u: &[f64], s: f64) -> Vec<f64> {
    let sp = CubicSpline::radial(grid, u);
    let es = s.exp();
    let xs: Vec<f64> = grid.nodes().iter().map(|r| r * es).collect();
    let amp = (1.5 * s).exp();
    let mut out: Vec<f64> = sp.eval_sorted(&xs).into_iter().map(|v| v * amp).collect();
    *out.last_mut().unwrap() = 0.0;
    out
}

pub fn dilate(u: &RadialField, s: f64) -> RadialField {
    let g = u.grid();
    let re = dilate_real(g, &u.re(), s);
    if u.is_real() {
        return RadialField::from_real(g.clone(), re).expect("dilation preserves finiteness");
    }
    let im: Vec<f64> = u.values().iter().map(|v| v.im).collect();
    let im = dilate_real(g, &im, s);
    let vals = re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect();
    RadialField::new(g.clone(), vals).expect("dilation preserves finiteness")
}

/// Resample a profile onto another grid.
pub fn regrid(u: &RadialField, target: std::sync::Arc<RadialGrid>) -> RadialField {
    let g = u.grid();
    let sre = CubicSpline::radial(g, &u.re());
    let re = sre.eval_sorted(target.nodes());
    if u.is_real() {
        return RadialField::from_real(target, re).expect("regrid preserves finiteness");
    }
    let im: Vec<f64> = u.values().iter().map(|v| v.im).collect();
    let im = CubicSpline::radial(g, &im).eval_sorted(target.nodes());
    let vals = re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect();
    RadialField::new(target, vals).expect("regrid preserves finiteness")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Spacing};

    #[test]
    fn reproduces_smooth_function() {
        let g = make_grid(10.0, 400, Spacing::Graded { stretch: 3.0 }).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|r| (-r * r).exp()).collect();
        let sp = CubicSpline::radial(&g, &u);
        for t in [0.0, 0.013, 0.5, 1.2345, 3.0] {
            assert!((sp.eval(t) - (-t * t).exp()).abs() < 1e-5, "{t}");
        }
        assert_eq!(sp.eval(11.0), 0.0);
    }

    #[test]
    fn sorted_and_pointwise_agree() {
        let g = make_grid(5.0, 64, Spacing::Uniform).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|r| r.cos() * (-r).exp()).collect();
        let sp = CubicSpline::radial(&g, &u);
        let ts: Vec<f64> = (0..200).map(|i| i as f64 * 0.0271).collect();
        let a = sp.eval_sorted(&ts);
        for (t, v) in ts.iter().zip(a) {
            assert!((sp.eval(*t) - v).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_dilation_is_identity() {
        let g = make_grid(8.0, 128, Spacing::Uniform).unwrap();
        let mut u: Vec<f64> = g.nodes().iter().map(|r| (-r).exp()).collect();
        *u.last_mut().unwrap() = 0.0;
        let v = dilate_real(&g, &u, 0.0);
        for (a, b) in u.iter().zip(&v) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}

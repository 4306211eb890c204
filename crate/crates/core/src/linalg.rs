//! Restarted GMRES with right preconditioning.

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    pub restart: usize,
    pub max_restarts: usize,
    /// Relative reduction of the residual norm.
    pub rtol: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            restart: 120,
            max_restarts: 20,
            rtol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GmresOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `A x = b` starting from `x`, with `A` applied by `apply` and the
/// preconditioner `M⁻¹` by `precond` (system solved: `A M⁻¹ y = b`, `x = M⁻¹ y`).
pub fn gmres(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    precond: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    x: &mut [f64],
    opts: GmresOptions,
) -> GmresOutcome {
    let n = b.len();
    let bnorm = norm(b).max(f64::MIN_POSITIVE);
    let m = opts.restart.min(n).max(1);
    let mut total = 0;
    let mut rel = f64::INFINITY;
    for _ in 0..opts.max_restarts.max(1) {
        let ax = apply(x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= opts.rtol {
            return GmresOutcome {
                iterations: total,
                relative_residual: rel,
                converged: true,
            };
        }
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|t| t / beta).collect());
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            let zk = precond(&v[k]);
            let mut w = apply(&zk);
            z.push(zk);
            for (j, vj) in v.iter().enumerate() {
                let hjk = dot(&w, vj);
                h[j][k] = hjk;
                for (wi, vi) in w.iter_mut().zip(vj) {
                    *wi -= hjk * vi;
                }
            }
            // second Gram–Schmidt pass
            for (j, vj) in v.iter().enumerate() {
                let c = dot(&w, vj);
                h[j][k] += c;
                for (wi, vi) in w.iter_mut().zip(vj) {
                    *wi -= c * vi;
                }
            }
            let hn = norm(&w);
            h[k + 1][k] = hn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let den = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            if den == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / den;
                sn[k] = h[k + 1][k] / den;
            }
            h[k][k] = den;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k_used = k + 1;
            rel = g[k + 1].abs() / bnorm;
            if rel <= opts.rtol || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|t| t / hn).collect());
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = (i + 1..k_used).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, zi) in x.iter_mut().zip(&z[j]) {
                *xi += yj * zi;
            }
        }
        if rel <= opts.rtol {
            let ax = apply(x);
            let r: f64 = b.iter().zip(&ax).map(|(b, a)| (b - a) * (b - a)).sum::<f64>().sqrt();
            return GmresOutcome {
                iterations: total,
                relative_residual: r / bnorm,
                converged: r / bnorm <= opts.rtol * 10.0,
            };
        }
    }
    GmresOutcome {
        iterations: total,
        relative_residual: rel,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_nonsymmetric_system() {
        let n = 50;
        let apply = |x: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let mut s = (3.0 + i as f64 * 0.1) * x[i];
                    if i > 0 {
                        s -= 1.2 * x[i - 1];
                    }
                    if i + 1 < n {
                        s -= 0.7 * x[i + 1];
                    }
                    s + 0.01 * x[(i * 7) % n]
                })
                .collect()
        };
        let truth: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = apply(&truth);
        let mut x = vec![0.0; n];
        let out = gmres(apply, |v| v.to_vec(), &b, &mut x, GmresOptions::default());
        assert!(out.converged);
        for (a, t) in x.iter().zip(&truth) {
            assert!((a - t).abs() < 1e-9);
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{gamma, ProblemParams, P_BAR};

use super::cache::gn_constant;

pub const T_12_5: f64 = 12.0 / 5.0;

/// `exp(Σ e_k ln b_k)` for positive bases.
fn pow_prod(terms: &[(f64, f64)]) -> f64 {
    terms.iter().map(|(b, e)| e * b.ln()).sum::<f64>().exp()
}

fn ln_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// The sharp constants a threshold evaluation needs, each as `C_t^t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnConstants {
    pub c_p_pow: f64,
    pub c_q_pow: f64,
    pub c_12_5_pow: f64,
    pub c_10_3_pow: f64,
}

impl GnConstants {
    pub fn for_params(prm: &ProblemParams) -> Result<Self> {
        let get = |t: f64| if t < 6.0 { gn_constant(t) } else { Ok(f64::NAN) };
        Ok(GnConstants {
            c_p_pow: get(prm.p)?,
            c_q_pow: get(prm.q)?,
            c_12_5_pow: gn_constant(T_12_5)?,
            c_10_3_pow: gn_constant(P_BAR)?,
        })
    }
}

/// Every explicit threshold of the problem evaluated at one parameter set.
/// Entries that do not apply to the parameter regime are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub params: ProblemParams,
    pub constants: GnConstants,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub a0: Option<f64>,
    pub rho_a: Option<f64>,
    pub rho0: Option<f64>,
    pub abar0: Option<f64>,
    /// The second quantity in the minimum defining `ā₀`.
    pub abar0_second: Option<f64>,
    #[serde(rename = "exponent_B")]
    pub exponent_b: Option<f64>,
    #[serde(rename = "R0")]
    pub r0: Option<f64>,
    #[serde(rename = "R1")]
    pub r1: Option<f64>,
    pub a_star: Option<f64>,
    /// Right-hand side of the smallness condition on `a` for the second solution.
    pub k3_bound: Option<f64>,
    pub cond_k3: Option<bool>,
    pub k201_lhs: Option<f64>,
    pub k201_rhs: Option<f64>,
    pub cond_k201: Option<bool>,
}

impl ThresholdReport {
    pub fn compute(prm: &ProblemParams, c: GnConstants) -> Result<Self> {
        prm.validate()?;
        let (p, q, mu, a) = (prm.p, prm.q, prm.mu, prm.a);
        let (gp, gq) = (prm.gamma_p(), prm.gamma_q());
        let (pg, qg) = (p * gp, q * gq);
        let mut rep = ThresholdReport {
            params: *prm,
            constants: c,
            k: None,
            a0: None,
            rho_a: None,
            rho0: None,
            abar0: None,
            abar0_second: None,
            exponent_b: None,
            r0: None,
            r1: None,
            a_star: None,
            k3_bound: None,
            cond_k3: None,
            k201_lhs: None,
            k201_rhs: None,
            cond_k201: None,
        };

        if rep.has_barrier() {
            let (cp, cq) = (c.c_p_pow, c.c_q_pow);
            let e = pg - qg;
            let ln_k1 = (pg - 2.0) / e * (mu * cq / q).ln()
                + (qg - 2.0) / e * (p * (2.0 - qg) / ((pg - 2.0) * cp)).ln();
            let ln_k2 = (qg - 2.0) / e * (p / cp).ln()
                + (pg - 2.0) / e * (mu * (2.0 - qg) * cq / (q * (pg - 2.0))).ln();
            let ln_k = ln_sum_exp(ln_k1, ln_k2);
            let b = (q - qg) * (pg - 2.0) + (p - pg) * (2.0 - qg);
            let a0 = (e / b * (-(2f64.ln()) - ln_k)).exp();
            let second = pow_prod(&[
                (p * (2.0 - qg) / (2.0 * cp * e), (2.0 - qg) / b),
                (q * (pg - 2.0) / (2.0 * mu * cq * e), (pg - 2.0) / b),
            ]);
            rep.k = Some(ln_k.exp());
            rep.exponent_b = Some(b);
            rep.a0 = Some(a0);
            rep.abar0_second = Some(second);
            rep.abar0 = Some(a0.min(second));
            rep.rho_a = Some(rep.rho_at(a)?);
            rep.rho0 = Some(rep.rho_at(a0)?);
            if let Some((r0, r1)) = rep.barrier_roots() {
                rep.r0 = Some(r0);
                rep.r1 = Some(r1);
            }
        }

        if p == P_BAR {
            rep.a_star = Some((P_BAR / (2.0 * c.c_p_pow)).powf(0.75));
        }

        if p > P_BAR && p < 6.0 {
            let den = 2.0 * pg + p - 6.0;
            let bound = pow_prod(&[
                (3.0 / (4.0 * c.c_p_pow), 1.0 / den),
                (4.0 / (4.0 * gp - 1.0), (pg - 1.0) / den),
                ((1.0 - gp) / c.c_12_5_pow, (pg - 2.0) / den),
            ]);
            rep.k3_bound = Some(bound);
            rep.cond_k3 = Some(a < bound);
        }

        if q == P_BAR && p > P_BAR && p < 6.0 && mu > 0.0 {
            let (lhs, rhs) = k201_sides(a, mu, p, c.c_p_pow, c.c_10_3_pow, c.c_12_5_pow);
            rep.k201_lhs = Some(lhs);
            rep.k201_rhs = Some(rhs);
            rep.cond_k201 = Some(lhs >= rhs);
        }
        Ok(rep)
    }

    /// `μ > 0`, `p > 10/3 > q`: the regime where the barrier function `f_a` has an
    /// interior positive maximum for small `a`.
    pub fn has_barrier(&self) -> bool {
        let prm = &self.params;
        prm.mu > 0.0 && prm.p > P_BAR && prm.q < P_BAR
    }

    /// `f(a, t) = ½ − μ (C_q^q/q) a^{(1−γ_q)q} t^{qγ_q−2} − (C_p^p/p) a^{(1−γ_p)p} t^{pγ_p−2}`
    pub fn f(&self, a: f64, t: f64) -> f64 {
        f_of_with(a, t, &self.params, &self.constants)
    }

    /// `h(t) = t² f(a, t)` at the report's own mass.
    pub fn h(&self, t: f64) -> f64 {
        let prm = &self.params;
        let (gp, gq) = (prm.gamma_p(), prm.gamma_q());
        let lt = t.ln();
        let la = prm.a.ln();
        let cq = self.constants.c_q_pow;
        let cp = self.constants.c_p_pow;
        let tq = if prm.mu == 0.0 {
            0.0
        } else {
            prm.mu * ((cq / prm.q).ln() + (1.0 - gq) * prm.q * la + prm.q * gq * lt).exp()
        };
        let tp = ((cp / prm.p).ln() + (1.0 - gp) * prm.p * la + prm.p * gp * lt).exp();
        0.5 * t * t - tq - tp
    }

    /// The maximizer `ρ_a` of `f(a, ·)`.
    pub fn rho_at(&self, a: f64) -> Result<f64> {
        let prm = &self.params;
        let (pg, qg) = prm.fiber_exponents();
        if !(prm.mu > 0.0 && pg > 2.0 && qg < 2.0) || pg == qg {
            return Err(Error::Parameter(format!(
                "ρ_a is undefined for (μ, p, q) = ({}, {}, {})",
                prm.mu, prm.p, prm.q
            )));
        }
        let (p, q, mu) = (prm.p, prm.q, prm.mu);
        let (gp, gq) = (prm.gamma_p(), prm.gamma_q());
        let (cp, cq) = (self.constants.c_p_pow, self.constants.c_q_pow);
        let e = pg - qg;
        let ln = (mu * p * (2.0 - qg) * cq / (q * (pg - 2.0) * cp)).ln()
            + (q * (1.0 - gq) - p * (1.0 - gp)) * a.ln();
        Ok((ln / e).exp())
    }

    fn barrier_roots(&self) -> Option<(f64, f64)> {
        let rho = self.rho_a?;
        if !(self.h(rho) > 0.0) {
            return None;
        }
        let root = |mut inside: f64, dir: f64| -> Option<f64> {
            let mut outside = inside;
            let mut k = 0;
            loop {
                outside *= (dir * 1.0).exp();
                k += 1;
                if self.h(outside) <= 0.0 {
                    break;
                }
                inside = outside;
                if k > 200 {
                    return None;
                }
            }
            let (mut lo, mut hi) = (inside.ln(), outside.ln());
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if self.h(mid.exp()) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if (hi - lo).abs() < 1e-15 {
                    break;
                }
            }
            Some((0.5 * (lo + hi)).exp())
        };
        Some((root(rho, -1.0)?, root(rho, 1.0)?))
    }

    /// Largest `a` for which the local-minimum branch is certified.
    pub fn local_min_cap(&self) -> Option<f64> {
        self.abar0
    }
}

/// Left and right sides of the smallness condition on `a` at the critical `q`.
pub fn k201_sides(a: f64, mu: f64, p: f64, c_p_pow: f64, c_10_3_pow: f64, c_12_5_pow: f64) -> (f64, f64) {
    let gp = gamma(p);
    let pg = p * gp;
    let rhs = (4.0 * gp - 1.0) / (4.0 * (1.0 - gp)) * c_12_5_pow;
    let bracket = 1.0 - 0.6 * c_10_3_pow * mu * a.powf(4.0 / 3.0);
    if bracket <= 0.0 {
        return (f64::NEG_INFINITY, rhs);
    }
    let lhs = pow_prod(&[
        (1.0 / (c_p_pow * gp * a.powf(p * (1.0 - gp))), 1.0 / (pg - 2.0)),
        (bracket, 1.0 / (pg - 2.0)),
    ]) / a.powi(3);
    (lhs, rhs)
}

pub(crate) fn f_of_with(a: f64, t: f64, prm: &ProblemParams, c: &GnConstants) -> f64 {
    let (gp, gq) = (prm.gamma_p(), prm.gamma_q());
    let (lt, la) = (t.ln(), a.ln());
    let tq = if prm.mu == 0.0 {
        0.0
    } else {
        prm.mu * ((c.c_q_pow / prm.q).ln() + (1.0 - gq) * prm.q * la + (prm.q * gq - 2.0) * lt).exp()
    };
    let tp = ((c.c_p_pow / prm.p).ln() + (1.0 - gp) * prm.p * la + (prm.p * gp - 2.0) * lt).exp();
    0.5 - tq - tp
}

/// `f(a, t)` with the sharp constants of `prm`'s exponents.
pub fn f_of(a: f64, t_grad: f64, prm: &ProblemParams) -> Result<f64> {
    let c = GnConstants::for_params(prm)?;
    Ok(f_of_with(a, t_grad, prm, &c))
}

pub fn thresholds(prm: &ProblemParams) -> Result<ThresholdReport> {
    ThresholdReport::compute(prm, GnConstants::for_params(prm)?)
}

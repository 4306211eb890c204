//! Energy, Nehari–Pohožaev functional and the fiber map `ψ_u(s) = 𝒥(s⋆u)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{mass2, Amplitude, RadialField};
use crate::grid::RadialGrid;
use crate::params::ProblemParams;
use crate::radial;

/// The integrals behind every scalar functional of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `|∇u|₂²`
    #[serde(rename = "T")]
    pub kinetic: f64,
    /// Hartree double energy.
    #[serde(rename = "D")]
    pub hartree: f64,
    /// `|u|_p^p`
    #[serde(rename = "Pp")]
    pub pp: f64,
    /// `|u|_q^q`
    #[serde(rename = "Qq")]
    pub qq: f64,
    #[serde(rename = "J")]
    pub energy: f64,
    pub mass2: f64,
}

impl EnergyBreakdown {
    pub fn from_components(t: f64, d: f64, pp: f64, qq: f64, mass2: f64, prm: &ProblemParams) -> Self {
        EnergyBreakdown {
            kinetic: t,
            hartree: d,
            pp,
            qq,
            energy: t / 2.0 + d / 4.0 - pp / prm.p - prm.mu * qq / prm.q,
            mass2,
        }
    }

    /// `P = T + D/4 − γ_p Pp − μ γ_q Qq`
    pub fn pohozaev(&self, prm: &ProblemParams) -> f64 {
        self.kinetic + self.hartree / 4.0 - prm.gamma_p() * self.pp - prm.mu * prm.gamma_q() * self.qq
    }

    /// `T + D + Pp + |μ| Qq`, the natural size of every identity residual.
    pub fn scale(&self, prm: &ProblemParams) -> f64 {
        self.kinetic + self.hartree + self.pp + prm.mu.abs() * self.qq
    }

    /// `λ = (−T − D + Pp + μ Qq) / |u|₂²`
    pub fn lambda(&self, prm: &ProblemParams) -> f64 {
        (-self.kinetic - self.hartree + self.pp + prm.mu * self.qq) / self.mass2
    }

    pub fn nehari_residual(&self, lambda: f64, prm: &ProblemParams) -> f64 {
        self.kinetic + lambda * self.mass2 + self.hartree - self.pp - prm.mu * self.qq
    }

    pub fn pohozaev_identity_residual(&self, lambda: f64, prm: &ProblemParams) -> f64 {
        0.5 * self.kinetic + 1.5 * lambda * self.mass2 + 1.25 * self.hartree
            - 3.0 / prm.p * self.pp
            - 3.0 * prm.mu / prm.q * self.qq
    }

    /// Scale of the Nehari residual: the sum of magnitudes of its terms.
    pub fn nehari_scale(&self, lambda: f64, prm: &ProblemParams) -> f64 {
        self.kinetic + (lambda * self.mass2).abs() + self.hartree + self.pp + (prm.mu * self.qq).abs()
    }

    pub fn pohozaev_identity_scale(&self, lambda: f64, prm: &ProblemParams) -> f64 {
        0.5 * self.kinetic
            + (1.5 * lambda * self.mass2).abs()
            + 1.25 * self.hartree
            + 3.0 / prm.p * self.pp
            + (3.0 * prm.mu / prm.q * self.qq).abs()
    }

    pub fn fiber(&self, prm: &ProblemParams) -> FiberMap {
        FiberMap::new(self.kinetic, self.hartree, self.pp, self.qq, prm)
    }
}

pub(crate) fn breakdown<T: Amplitude>(grid: &RadialGrid, u: &[T], prm: &ProblemParams) -> Result<EnergyBreakdown> {
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("energy"));
    }
    let t = radial::kinetic(grid, u);
    let d = radial::double_energy_slice(grid, u);
    let (mut pp, mut qq) = (0.0, 0.0);
    for (w, v) in grid.weights().iter().zip(u) {
        let m = v.modulus();
        if m > 0.0 {
            pp += w * m.powf(prm.p);
            qq += w * m.powf(prm.q);
        }
    }
    let e = EnergyBreakdown::from_components(t, d, pp, qq, mass2(grid, u), prm);
    if !e.energy.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    Ok(e)
}

pub fn energy(u: &RadialField, prm: &ProblemParams) -> Result<EnergyBreakdown> {
    breakdown(u.grid(), u.values(), prm)
}

pub fn pohozaev(u: &RadialField, prm: &ProblemParams) -> Result<f64> {
    Ok(energy(u, prm)?.pohozaev(prm))
}

pub fn nehari_residual(u: &RadialField, lambda: f64, prm: &ProblemParams) -> Result<f64> {
    Ok(energy(u, prm)?.nehari_residual(lambda, prm))
}

pub fn pohozaev_identity_residual(u: &RadialField, lambda: f64, prm: &ProblemParams) -> Result<f64> {
    Ok(energy(u, prm)?.pohozaev_identity_residual(lambda, prm))
}

/// `(T, D, Pp, Qq)`
pub fn fiber_components(u: &RadialField, prm: &ProblemParams) -> Result<(f64, f64, f64, f64)> {
    let e = energy(u, prm)?;
    Ok((e.kinetic, e.hartree, e.pp, e.qq))
}

pub fn fiber_profile(u: &RadialField, prm: &ProblemParams) -> Result<FiberProfile> {
    Ok(energy(u, prm)?.fiber(prm).profile())
}

pub fn fiber_second_derivative(u: &RadialField, prm: &ProblemParams, s: f64) -> Result<f64> {
    Ok(energy(u, prm)?.fiber(prm).d2psi(s))
}

/// `ψ(s) = e^{2s} T/2 + e^s D/4 − e^{pγ_p s} Pp/p − μ e^{qγ_q s} Qq/q`, evaluated in O(1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberMap {
    pub t: f64,
    pub d: f64,
    pub pp: f64,
    pub qq: f64,
    p: f64,
    q: f64,
    mu: f64,
    pg: f64,
    qg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiberRegime {
    TwoCritical,
    OneCritical,
    Degenerate,
}

/// Critical points and zeros of a fiber map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberProfile {
    pub regime: FiberRegime,
    /// Local minimum (two-critical regime only).
    pub s_u: Option<f64>,
    /// Local maximum.
    pub t_u: Option<f64>,
    pub c_u: Option<f64>,
    pub d_u: Option<f64>,
    pub psi_s_u: Option<f64>,
    pub psi_t_u: Option<f64>,
    pub d2psi_s_u: Option<f64>,
    pub d2psi_t_u: Option<f64>,
    /// Number of sign changes of ψ′ found on the scan.
    pub n_critical: usize,
}

const SCAN_LO: f64 = -20.0;
const SCAN_HI: f64 = 20.0;
const DEGENERACY_TOL: f64 = 1e-9;

impl FiberMap {
    pub fn new(t: f64, d: f64, pp: f64, qq: f64, prm: &ProblemParams) -> Self {
        let (pg, qg) = prm.fiber_exponents();
        FiberMap {
            t,
            d,
            pp,
            qq,
            p: prm.p,
            q: prm.q,
            mu: prm.mu,
            pg,
            qg,
        }
    }

    pub fn psi(&self, s: f64) -> f64 {
        (2.0 * s).exp() / 2.0 * self.t + s.exp() / 4.0 * self.d
            - (self.pg * s).exp() / self.p * self.pp
            - self.mu * (self.qg * s).exp() / self.q * self.qq
    }

    pub fn dpsi(&self, s: f64) -> f64 {
        (2.0 * s).exp() * self.t + s.exp() / 4.0 * self.d
            - self.pg / self.p * (self.pg * s).exp() * self.pp
            - self.mu * self.qg / self.q * (self.qg * s).exp() * self.qq
    }

    pub fn d2psi(&self, s: f64) -> f64 {
        2.0 * (2.0 * s).exp() * self.t + s.exp() / 4.0 * self.d
            - self.pg * self.pg / self.p * (self.pg * s).exp() * self.pp
            - self.mu * self.qg * self.qg / self.q * (self.qg * s).exp() * self.qq
    }

    /// Magnitude of the individual terms of ψ′ at `s`.
    pub fn term_scale(&self, s: f64) -> f64 {
        (2.0 * s).exp() * self.t
            + s.exp() / 4.0 * self.d
            + self.pg / self.p * (self.pg * s).exp() * self.pp
            + (self.mu * self.qg / self.q).abs() * (self.qg * s).exp() * self.qq
    }

    fn psi_scale(&self, s: f64) -> f64 {
        (2.0 * s).exp() / 2.0 * self.t
            + s.exp() / 4.0 * self.d
            + (self.pg * s).exp() / self.p * self.pp
            + (self.mu / self.q).abs() * (self.qg * s).exp() * self.qq
    }

    /// Root of `f` in `[lo, hi]` (sign change assumed): Newton steps kept inside the
    /// bracket, bisection otherwise.
    fn polish(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let fx = f(x);
            if fx == 0.0 {
                return x;
            }
            if (fx > 0.0) == (flo > 0.0) {
                lo = x;
            } else {
                hi = x;
            }
            let d = df(x);
            let newton = x - fx / d;
            let next = if d != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 1e-15 * x.abs().max(1.0) || hi - lo <= 1e-15 * x.abs().max(1.0) {
                return next;
            }
            x = next;
        }
        x
    }

    fn scan_roots(&self, ds: f64) -> Vec<f64> {
        let steps = ((SCAN_HI - SCAN_LO) / ds).round() as usize;
        let mut roots = Vec::new();
        let mut prev_s = SCAN_LO;
        let mut prev = self.dpsi(prev_s);
        for k in 1..=steps {
            let s = SCAN_LO + k as f64 * ds;
            let v = self.dpsi(s);
            if (prev > 0.0) != (v > 0.0) && prev != 0.0 {
                roots.push(Self::polish(|x| self.dpsi(x), |x| self.d2psi(x), prev_s, s));
            }
            prev_s = s;
            prev = v;
        }
        roots
    }

    fn zero_in(&self, lo: f64, hi: f64) -> Option<f64> {
        let (a, b) = (self.psi(lo), self.psi(hi));
        if (a > 0.0) == (b > 0.0) {
            return None;
        }
        Some(Self::polish(|x| self.psi(x), |x| self.dpsi(x), lo, hi))
    }

    /// First sign change of ψ at or after `from`, searched on the scan lattice.
    fn zero_after(&self, from: f64) -> Option<f64> {
        let mut lo = from;
        let mut step = 0.05;
        while lo < 60.0 {
            let hi = lo + step;
            if let Some(z) = self.zero_in(lo, hi) {
                return Some(z);
            }
            lo = hi;
            step *= 1.2;
        }
        None
    }

    pub fn profile(&self) -> FiberProfile {
        let mut roots = self.scan_roots(0.05);
        if roots.len() > 2 {
            roots = self.scan_roots(0.005);
        }
        let mut out = FiberProfile {
            regime: FiberRegime::Degenerate,
            s_u: None,
            t_u: None,
            c_u: None,
            d_u: None,
            psi_s_u: None,
            psi_t_u: None,
            d2psi_s_u: None,
            d2psi_t_u: None,
            n_critical: roots.len(),
        };
        let degenerate_at = |s: f64| self.d2psi(s).abs() < DEGENERACY_TOL * self.term_scale(s);
        if roots.iter().any(|&s| degenerate_at(s)) {
            return out;
        }
        match roots[..] {
            [s, t] if self.d2psi(s) > 0.0 && self.d2psi(t) < 0.0 => {
                out.regime = FiberRegime::TwoCritical;
                out.s_u = Some(s);
                out.t_u = Some(t);
                out.psi_s_u = Some(self.psi(s));
                out.psi_t_u = Some(self.psi(t));
                out.d2psi_s_u = Some(self.d2psi(s));
                out.d2psi_t_u = Some(self.d2psi(t));
                out.c_u = self.zero_in(s, t);
                out.d_u = self.zero_after(t);
            }
            [t] if self.d2psi(t) < 0.0 => {
                out.regime = FiberRegime::OneCritical;
                out.t_u = Some(t);
                out.psi_t_u = Some(self.psi(t));
                out.d2psi_t_u = Some(self.d2psi(t));
                out.d_u = self.zero_after(t);
            }
            _ => {}
        }
        out
    }

    /// The largest critical point at which ψ has a strict local maximum.
    pub fn max_point(&self) -> Option<f64> {
        self.scan_roots(0.05)
            .into_iter().rev().find(|&s| self.d2psi(s) < 0.0)
    }

    /// `|ψ′(s)|` relative to its term magnitudes.
    pub fn relative_slope(&self, s: f64) -> f64 {
        self.dpsi(s).abs() / self.term_scale(s)
    }

    /// `|ψ(s)|` relative to its term magnitudes.
    pub fn relative_value(&self, s: f64) -> f64 {
        self.psi(s).abs() / self.psi_scale(s)
    }

    /// `(s, ψ(s), ψ′(s))` on a uniform lattice.
    pub fn sample(&self, lo: f64, hi: f64, ds: f64) -> Vec<(f64, f64, f64)> {
        let k = ((hi - lo) / ds).round() as usize;
        (0..=k)
            .map(|i| {
                let s = lo + i as f64 * ds;
                (s, self.psi(s), self.dpsi(s))
            })
            .collect()
    }

    /// Components of `σ⋆u`.
    pub fn shifted(&self, sigma: f64) -> FiberMap {
        FiberMap {
            t: self.t * (2.0 * sigma).exp(),
            d: self.d * sigma.exp(),
            pp: self.pp * (self.pg * sigma).exp(),
            qq: self.qq * (self.qg * sigma).exp(),
            ..*self
        }
    }
}

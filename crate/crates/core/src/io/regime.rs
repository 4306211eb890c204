use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::{solve_soliton_on, ThresholdReport, DEFAULT_TOL, T_12_5};
use crate::error::{Error, Result};
use crate::functionals::energy;
use crate::grid::RadialGrid;
use crate::params::{ProblemParams, P_BAR};

const Q_SUB: f64 = 8.0 / 3.0;

/// Which existence result (if any) covers a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "regime")]
pub enum RegimeTag {
    /// Local minimizer and a mountain-pass solution: `μ > 0`, `q ≤ 12/5`,
    /// `10/3 < p < 6`, `a < ā₀` and (k3).
    Th1TwoBranch,
    /// `μ > 0`, `q < 8/3`, `10/3 < p < 6`, `a < ā₀` without the second-solution hypotheses.
    Th1LocalMinOnly,
    /// `μ > 0`, `10/3 < q < p < 6`: mountain-pass type only.
    SupercriticalMountain,
    /// `μ ≤ 0`, `q < 8/3`, `10/3 < p < 6` (or `μ = 0`).
    Th5Defocusing,
    /// `p = 10/3`, `q < 8/3`, `μ ≠ 0`; the case number follows the sign of `μ` and `a` vs `a*`.
    Th7Critical { case: u8 },
    /// `μ > 0`, `q = 10/3`, `10/3 < p < 6` with (k201).
    Th15CriticalQ,
    OpenRegion,
}

impl RegimeTag {
    pub fn label(&self) -> String {
        match self {
            RegimeTag::Th1TwoBranch => "th1-two-branch".into(),
            RegimeTag::Th1LocalMinOnly => "th1-local-min-only".into(),
            RegimeTag::SupercriticalMountain => "supercritical-mountain".into(),
            RegimeTag::Th5Defocusing => "th5-defocusing".into(),
            RegimeTag::Th7Critical { case } => format!("th7-critical-{case}"),
            RegimeTag::Th15CriticalQ => "th15-critical-q".into(),
            RegimeTag::OpenRegion => "open-region".into(),
        }
    }

    /// A local minimizer is expected.
    pub fn has_local_min(&self) -> bool {
        matches!(
            self,
            RegimeTag::Th1TwoBranch | RegimeTag::Th1LocalMinOnly | RegimeTag::Th7Critical { case: 1 }
        )
    }

    /// A mountain-pass solution is expected.
    pub fn has_mountain_pass(&self) -> bool {
        matches!(
            self,
            RegimeTag::Th1TwoBranch
                | RegimeTag::SupercriticalMountain
                | RegimeTag::Th5Defocusing
                | RegimeTag::Th15CriticalQ
        )
    }
}

/// Decision tree over the sign of `μ`, the position of `p` and `q` against
/// 12/5, 8/3, 10/3 and the mass thresholds.
pub fn classify_regime(prm: &ProblemParams, thr: &ThresholdReport) -> RegimeTag {
    let ProblemParams { a, mu, p, q } = *prm;
    let sub = q > 2.0 && q < Q_SUB;
    if p == P_BAR {
        if !sub || mu == 0.0 {
            return RegimeTag::OpenRegion;
        }
        let Some(a_star) = thr.a_star else {
            return RegimeTag::OpenRegion;
        };
        let case = match (mu > 0.0, a <= a_star) {
            (true, true) => 1,
            (true, false) => 2,
            (false, true) => 3,
            (false, false) => 4,
        };
        // case 1 at a = a* with 12/5 < q < 8/3 is the dichotomy the theory leaves open
        if case == 1 && a == a_star && q > T_12_5 {
            return RegimeTag::OpenRegion;
        }
        return RegimeTag::Th7Critical { case };
    }
    if !(p > P_BAR && p < 6.0) {
        return RegimeTag::OpenRegion;
    }
    if mu == 0.0 || (mu < 0.0 && sub) {
        return RegimeTag::Th5Defocusing;
    }
    if mu < 0.0 {
        return RegimeTag::OpenRegion;
    }
    if sub {
        return match thr.abar0 {
            Some(abar0) if a < abar0 => {
                if q <= T_12_5 && thr.cond_k3 == Some(true) {
                    RegimeTag::Th1TwoBranch
                } else {
                    RegimeTag::Th1LocalMinOnly
                }
            }
            _ => RegimeTag::OpenRegion,
        };
    }
    if q == P_BAR {
        return if thr.cond_k201 == Some(true) {
            RegimeTag::Th15CriticalQ
        } else {
            RegimeTag::OpenRegion
        };
    }
    if q > P_BAR && q < p {
        return RegimeTag::SupercriticalMountain;
    }
    RegimeTag::OpenRegion
}

/// Fiber of a field with negative critical energy `E₀ = T/2 − |w|_p̄^p̄/p̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalWitness {
    pub a: f64,
    pub e0: f64,
    /// `(s, 𝒥(s⋆w))`
    pub samples: Vec<(f64, f64)>,
    /// Strictly decreasing over the last five samples.
    pub tail_decreasing: bool,
}

/// The soliton `Q_{10/3}` rescaled to mass `a`, which has `E₀ < 0` exactly when `a > a*`,
/// and its energy along `s⋆w` for `s ∈ [0, s_max]`.
pub fn critical_witness(
    prm: &ProblemParams,
    grid: Arc<RadialGrid>,
    s_max: f64,
    samples: usize,
) -> Result<CriticalWitness> {
    if prm.p != P_BAR {
        return Err(Error::Parameter("the critical witness needs p = 10/3".into()));
    }
    if samples < 5 || !(s_max > 0.0) {
        return Err(Error::Parameter("need s_max > 0 and at least 5 fiber samples".into()));
    }
    let sol = solve_soliton_on(P_BAR, DEFAULT_TOL, grid)?;
    let w = sol.profile.normalized(prm.a)?;
    let e = energy(&w, prm)?;
    let e0 = 0.5 * e.kinetic - e.pp / prm.p;
    let fiber = e.fiber(prm);
    let samples: Vec<(f64, f64)> = (0..samples)
        .map(|k| {
            let s = s_max * k as f64 / (samples - 1) as f64;
            (s, fiber.psi(s))
        })
        .collect();
    let tail = &samples[samples.len() - 5..];
    let tail_decreasing = tail.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(CriticalWitness { a: prm.a, e0, samples, tail_decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::thresholds;

    fn tag(a: f64, mu: f64, p: f64, q: f64) -> RegimeTag {
        let prm = ProblemParams::new(a, mu, p, q).unwrap();
        classify_regime(&prm, &thresholds(&prm).unwrap())
    }

    #[test]
    fn reference_classifications() {
        let prm = ProblemParams::new(1.0, 1.0, 4.0, 2.2).unwrap();
        let thr = thresholds(&prm).unwrap();
        let half = prm.with_a(0.5 * thr.abar0.unwrap());
        let thr_half = thresholds(&half).unwrap();
        assert_eq!(thr_half.cond_k3, Some(true));
        assert_eq!(classify_regime(&half, &thr_half), RegimeTag::Th1TwoBranch);

        assert_eq!(tag(0.5, -1.0, 4.0, 2.5), RegimeTag::Th5Defocusing);
        assert_eq!(tag(1.0, 1.0, 4.0, 3.0), RegimeTag::OpenRegion);
    }

    #[test]
    fn critical_cases_split_at_a_star() {
        let prm = ProblemParams::new(1.0, 1.0, P_BAR, 2.3).unwrap();
        let a_star = thresholds(&prm).unwrap().a_star.unwrap();
        assert_eq!(tag(0.9 * a_star, 1.0, P_BAR, 2.3), RegimeTag::Th7Critical { case: 1 });
        assert_eq!(tag(1.1 * a_star, 1.0, P_BAR, 2.3), RegimeTag::Th7Critical { case: 2 });
        assert_eq!(tag(0.9 * a_star, -1.0, P_BAR, 2.3), RegimeTag::Th7Critical { case: 3 });
        assert_eq!(tag(1.1 * a_star, -1.0, P_BAR, 2.3), RegimeTag::Th7Critical { case: 4 });
        assert_eq!(tag(a_star, 1.0, P_BAR, 2.5), RegimeTag::OpenRegion);
        assert_eq!(tag(a_star, 1.0, P_BAR, 2.3), RegimeTag::Th7Critical { case: 1 });
    }

    #[test]
    fn upper_branches() {
        assert_eq!(tag(1.0, 1.0, 4.0, 3.5), RegimeTag::SupercriticalMountain);
        assert_eq!(tag(1.0, -1.0, 4.0, 3.5), RegimeTag::OpenRegion);
        assert_eq!(tag(0.5, 1.0, 4.0, P_BAR), RegimeTag::Th15CriticalQ);
        assert_eq!(tag(50.0, 1.0, 4.0, P_BAR), RegimeTag::OpenRegion);
        assert_eq!(tag(1.0, 0.0, 4.0, 3.0), RegimeTag::Th5Defocusing);
        assert_eq!(tag(1.0, 1.0, 3.0, 2.5), RegimeTag::OpenRegion);
    }
}

use serde::Serialize;

use super::{h1_distance, mountain_pass, SolveReport, SolverOptions};
use crate::constants::thresholds;
use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::params::{ProblemParams, P_BAR};

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationStep {
    /// The continued parameter (μ or q).
    pub value: f64,
    pub report: SolveReport,
    /// `‖û_k − û_{k−1}‖_{H¹}`
    pub h1_diff: Option<f64>,
    /// `|λ_k − λ_{k−1}|`
    pub lambda_diff: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Continuation {
    pub steps: Vec<ContinuationStep>,
    /// Direct solve at the end point (q → 10/3 only).
    pub direct: Option<SolveReport>,
    /// Linear extrapolation of the last two levels to the end point.
    pub extrapolated_level: Option<f64>,
    pub limit_relative_error: Option<f64>,
}

impl Continuation {
    /// Successive ratios `diff_{k−1} / diff_k` of the Cauchy differences, as
    /// `(H¹ ratio, λ ratio)`.
    pub fn contraction_ratios(&self) -> Vec<(f64, f64)> {
        let d: Vec<_> = self
            .steps
            .iter()
            .filter_map(|s| Some((s.h1_diff?, s.lambda_diff?)))
            .collect();
        d.windows(2).map(|w| (w[0].0 / w[1].0, w[0].1 / w[1].1)).collect()
    }
}

fn run_chain(
    values: &[f64],
    init: &RadialField,
    opts: &SolverOptions,
    at: impl Fn(f64) -> Result<ProblemParams>,
) -> Result<Vec<ContinuationStep>> {
    let mut steps: Vec<ContinuationStep> = Vec::with_capacity(values.len());
    for &v in values {
        let prm = at(v)?;
        let start = steps.last().map_or(init, |s| &s.report.profile);
        let report = mountain_pass(&prm, start, opts)?;
        let (h1_diff, lambda_diff) = match steps.last() {
            Some(prev) => (
                Some(h1_distance(&report.profile, &prev.report.profile)?),
                Some((report.lambda - prev.report.lambda).abs()),
            ),
            None => (None, None),
        };
        steps.push(ContinuationStep { value: v, report, h1_diff, lambda_diff });
    }
    Ok(steps)
}

/// Mountain-pass solutions along `μ ∈ {μ₀, μ₀/2, …, μ₀/2^halvings, 0}`, each warm
/// started from the previous one.
pub fn continuation_mu_to_zero(
    prm: &ProblemParams,
    halvings: usize,
    init: &RadialField,
    opts: &SolverOptions,
) -> Result<Continuation> {
    prm.validate()?;
    if prm.mu <= 0.0 {
        return Err(Error::Parameter("μ-continuation starts from μ₀ > 0".into()));
    }
    let mut values: Vec<f64> = (0..=halvings).map(|k| prm.mu / 2f64.powi(k as i32)).collect();
    values.push(0.0);
    let steps = run_chain(&values, init, opts, |mu| Ok(prm.with_mu(mu)))?;
    Ok(Continuation { steps, direct: None, extrapolated_level: None, limit_relative_error: None })
}

/// Mountain-pass solutions along `q_k = 10/3 + (q₀ − 10/3)/2^k`, followed by a
/// direct solve at `q = 10/3` compared with the extrapolated level.
pub fn continuation_q_to_critical(
    prm: &ProblemParams,
    halvings: usize,
    init: &RadialField,
    opts: &SolverOptions,
) -> Result<Continuation> {
    prm.validate()?;
    if prm.q <= P_BAR || prm.q >= prm.p {
        return Err(Error::Parameter("q-continuation starts from 10/3 < q₀ < p".into()));
    }
    let end = prm.with_q(P_BAR);
    let thr = thresholds(&end)?;
    if opts.enforce_regime && thr.cond_k201 != Some(true) {
        return Err(Error::Regime {
            reason: "the smallness condition at q = 10/3 fails".into(),
            thresholds: Some(Box::new(thr)),
        });
    }
    let dq = prm.q - P_BAR;
    let values: Vec<f64> = (0..=halvings).map(|k| P_BAR + dq / 2f64.powi(k as i32)).collect();
    let steps = run_chain(&values, init, opts, |q| Ok(prm.with_q(q)))?;
    let last = &steps.last().unwrap().report;
    let direct = mountain_pass(&end, &last.profile, opts)?;
    let extrapolated_level = match &steps[..] {
        [.., a, b] => Some(2.0 * b.report.level - a.report.level),
        _ => None,
    };
    let limit_relative_error = extrapolated_level.map(|l| (l - direct.level).abs() / direct.level.abs());
    Ok(Continuation {
        steps,
        direct: Some(direct),
        extrapolated_level,
        limit_relative_error,
    })
}

//! Mountain-pass family as μ → 0: successive differences and their ratios.

use std::sync::Arc;

use norm_soliton::solvers::{continuation_mu_to_zero, gaussian_init, SolverOptions};
use norm_soliton::{GridSpec, ProblemParams, Spacing};

fn main() -> norm_soliton::Result<()> {
    let prm = ProblemParams::new(2.0, 1.0, 4.0, 10.0 / 3.0)?;
    let grid = Arc::new(GridSpec { r_max: 40.0, n: 2048, spacing: Spacing::Graded { stretch: 4.0 } }.build()?);
    let c = continuation_mu_to_zero(&prm, 4, &gaussian_init(grid, prm.a, 1.0)?, &SolverOptions::default())?;
    for s in &c.steps {
        println!("μ = {:.5}  c = {:.8}  λ = {:.6}  ‖Δu‖ = {:?}  |Δλ| = {:?}", s.value, s.report.level, s.report.lambda, s.h1_diff, s.lambda_diff);
    }
    println!("ratios {:?}", c.contraction_ratios());
    Ok(())
}

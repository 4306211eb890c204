//! Local minimizer and mountain-pass solution at one parameter set.

use std::sync::Arc;

use norm_soliton::solvers::{gaussian_init, ground_state_local_min, mountain_pass, SolverOptions};
use norm_soliton::{GridSpec, ProblemParams, Spacing};

fn main() -> norm_soliton::Result<()> {
    let prm = ProblemParams::new(2.19, 1.0, 4.0, 2.2)?;
    let grid = Arc::new(
        GridSpec { r_max: 200.0, n: 4096, spacing: Spacing::Graded { stretch: 7.0 } }.build()?,
    );
    let opts = SolverOptions::default();
    let init = gaussian_init(grid, prm.a, 3.0)?;

    let lm = ground_state_local_min(&prm, &init, &opts)?;
    println!(
        "local min:     m(a) = {:.8}  λ = {:.6}  |∇u| = {:.4}  iters {} + {} Newton  {:?}",
        lm.level, lm.lambda, lm.grad_norm, lm.iterations, lm.newton_iterations, lm.wall_time
    );
    println!("  residuals {:?}", lm.residuals);

    let mp = mountain_pass(&prm, &init, &opts)?;
    println!(
        "mountain pass: c_a  = {:.8}  λ = {:.6}  |∇u| = {:.4}  iters {} + {} Newton  {:?}",
        mp.level, mp.lambda, mp.grad_norm, mp.iterations, mp.newton_iterations, mp.wall_time
    );
    println!("  residuals {:?}", mp.residuals);
    Ok(())
}

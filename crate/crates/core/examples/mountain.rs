//! Mountain-pass solutions in the defocusing and critical-q regimes.

use std::sync::Arc;

use norm_soliton::solvers::{gaussian_init, mountain_pass, SolverOptions};
use norm_soliton::{GridSpec, ProblemParams, Spacing};

fn main() -> norm_soliton::Result<()> {
    let grid = Arc::new(GridSpec { r_max: 40.0, n: 2048, spacing: Spacing::Graded { stretch: 4.0 } }.build()?);
    for (a, mu, q) in [(2.0, -0.2, 2.5), (2.0, 1.0, 10.0 / 3.0), (2.0, 1.0, 3.4)] {
        let prm = ProblemParams::new(a, mu, 4.0, q)?;
        let r = mountain_pass(&prm, &gaussian_init(grid.clone(), a, 1.0)?, &SolverOptions::default())?;
        println!(
            "μ = {mu:+}  q = {q:.4}: c_a = {:.8}  λ = {:.6}  t_u = {:?}  ψ″(0) = {:.3e}  {:?}",
            r.level, r.lambda, r.fiber.t_u, r.d2psi_at_zero, r.wall_time
        );
        println!("  residuals {:?}", r.residuals);
    }
    Ok(())
}

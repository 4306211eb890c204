//! Blow-up of the dilated mountain-pass solution, with the virial certificate.

use std::sync::Arc;

use norm_soliton::dynamics::{instability_experiment, InstabilityOptions};
use norm_soliton::solvers::{gaussian_init, mountain_pass, SolverOptions};
use norm_soliton::{GridSpec, ProblemParams, Spacing};

fn main() -> norm_soliton::Result<()> {
    let prm = ProblemParams::new(2.19, 1.0, 4.0, 2.2)?;
    let grid = Arc::new(GridSpec { r_max: 40.0, n: 2048, spacing: Spacing::Graded { stretch: 6.0 } }.build()?);
    let u = mountain_pass(&prm, &gaussian_init(grid, prm.a, 1.0)?, &SolverOptions::default())?;
    println!("c_a = {:.8}  λ = {:.6}", u.level, u.lambda);
    let v = instability_experiment(&u, 0.1, 5.0, &InstabilityOptions::default())?;
    println!("{:?}", v.kind);
    println!("  η = {:?}  sup P = {:?}  concave H: {:?}", v.eta, v.max_pohozaev, v.concave);
    println!("  |∇φ| grew {:?}× by t = {:?}; envelope root {:?}", v.gradient_growth, v.trigger_time, v.envelope_root);
    Ok(())
}

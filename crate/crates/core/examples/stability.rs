//! Perturbed local minimizers stay close to the phase orbit.

use std::sync::Arc;

use norm_soliton::dynamics::{stability_experiment, StabilityOptions};
use norm_soliton::solvers::{gaussian_init, ground_state_local_min, SolverOptions};
use norm_soliton::{GridSpec, ProblemParams, Spacing};

fn main() -> norm_soliton::Result<()> {
    let prm = ProblemParams::new(2.19, 1.0, 4.0, 2.2)?;
    let grid = Arc::new(GridSpec { r_max: 200.0, n: 2048, spacing: Spacing::Graded { stretch: 6.0 } }.build()?);
    let u = ground_state_local_min(&prm, &gaussian_init(grid, prm.a, 3.0)?, &SolverOptions::default())?;
    let v = stability_experiment(&u, 4, 1e-3, 5.0, &StabilityOptions::default())?;
    println!("{:?}: sup orbit distance {:.3e} (bound {:.1e}), left the ball: {}", v.kind, v.max_orbit_distance.unwrap(), v.epsilon, v.left_ball);
    Ok(())
}

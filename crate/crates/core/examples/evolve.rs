//! Standing wave under the flow: conservation and the phase-only motion of `|φ|`.

use std::sync::Arc;

use norm_soliton::dynamics::{evolve, modulus_deviation, EvolveOptions, Scheme};
use norm_soliton::solvers::{gaussian_init, ground_state_local_min, SolverOptions};
use norm_soliton::{GridSpec, ProblemParams, Spacing};

fn main() -> norm_soliton::Result<()> {
    let prm = ProblemParams::new(2.19, 1.0, 4.0, 2.2)?;
    let grid = Arc::new(GridSpec { r_max: 200.0, n: 2048, spacing: Spacing::Graded { stretch: 6.0 } }.build()?);
    let u = ground_state_local_min(&prm, &gaussian_init(grid, prm.a, 3.0)?, &SolverOptions::default())?;
    println!("m(a) = {:.8}  λ = {:.6}", u.level, u.lambda);
    for scheme in [Scheme::Strang, Scheme::Cn] {
        let opts = EvolveOptions { t_final: 5.0, dt: 1e-3, scheme, sample_every: 100, ..Default::default() };
        let st = evolve(&u.profile, &prm, &opts)?;
        println!(
            "{scheme:?}: mass drift {:.2e}/t  energy drift {:.2e}/t  max ||φ|-û| {:.2e}",
            st.mass_drift_rate(),
            st.energy_drift_rate(),
            modulus_deviation(&u.profile, &st.phi)?
        );
    }
    Ok(())
}

//! Fiber map `ψ_u(s) = 𝒥(s⋆u)` of a trial field: critical points, zeros, and a few samples.

use std::sync::Arc;

use norm_soliton::functionals::energy;
use norm_soliton::{GridSpec, ProblemParams, RadialField};

fn main() -> norm_soliton::Result<()> {
    let grid = Arc::new(GridSpec::default().build()?);
    let u = RadialField::from_fn(grid, |r| (1.0 + 0.3 * r) * (-0.5 * r * r / 4.0).exp())?;
    for mu in [1.0, -1.0] {
        let prm = ProblemParams::new(1.0, mu, 4.0, 2.2)?;
        let u = u.normalized(prm.a)?;
        let fiber = energy(&u, &prm)?.fiber(&prm);
        let prof = fiber.profile();
        println!("μ = {mu}: {:?} with {} critical point(s)", prof.regime, prof.n_critical);
        println!("  s_u = {:?}  c_u = {:?}  t_u = {:?}  d_u = {:?}", prof.s_u, prof.c_u, prof.t_u, prof.d_u);
        println!("  ψ(s_u) = {:?}  ψ(t_u) = {:?}", prof.psi_s_u, prof.psi_t_u);
        for (s, psi, dpsi) in fiber.sample(-3.0, 3.0, 1.0) {
            println!("  s = {s:+.1}  ψ = {psi:+.6e}  ψ′ = {dpsi:+.6e}");
        }
    }
    Ok(())
}

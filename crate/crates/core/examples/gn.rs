//! Sharp Gagliardo–Nirenberg constants from the soliton `Q_t`, and the equality
//! case checked on the grid.

use norm_soliton::constants::{gn_constant, solve_soliton, DEFAULT_TOL};
use norm_soliton::params::gamma;
use norm_soliton::radial;

fn main() -> norm_soliton::Result<()> {
    for t in [2.2, 12.0 / 5.0, 10.0 / 3.0, 4.0] {
        let c = gn_constant(t)?;
        let sol = solve_soliton(t, DEFAULT_TOL)?;
        let q = sol.profile.re();
        let grid = sol.profile.grid();
        let m = sol.profile.mass2();
        let kin = radial::kinetic(grid, &q);
        let pow: f64 = grid.weights().iter().zip(&q).map(|(w, v)| w * v.abs().powf(t)).sum();
        let g = gamma(t);
        let ratio = pow / (c * m.powf(t * (1.0 - g) / 2.0) * kin.powf(t * g / 2.0));
        println!(
            "t = {t:.4}  C_t^t = {c:.12}  C_t = {:.10}  Q(0) = {:.10}  equality ratio {ratio:.8}",
            c.powf(1.0 / t),
            sol.data.q0
        );
    }
    Ok(())
}

//! Mass thresholds and the regime each parameter set falls in.

use norm_soliton::constants::thresholds;
use norm_soliton::io::classify_regime;
use norm_soliton::ProblemParams;

fn main() -> norm_soliton::Result<()> {
    let sets = [
        (1.0, 1.0, 4.0, 2.2),
        (2.0, -0.2, 4.0, 2.5),
        (2.0, 1.0, 4.0, 10.0 / 3.0),
        (3.0, 1.0, 10.0 / 3.0, 2.4),
        (1.0, 1.0, 4.0, 3.0),
    ];
    for (a, mu, p, q) in sets {
        let prm = ProblemParams::new(a, mu, p, q)?;
        let thr = thresholds(&prm)?;
        println!("a = {a}  μ = {mu}  p = {p:.4}  q = {q:.4}  -> {}", classify_regime(&prm, &thr).label());
        if let (Some(a0), Some(abar0), Some(rho0)) = (thr.a0, thr.abar0, thr.rho0) {
            println!("    a0 = {a0:.6}  ā0 = {abar0:.6}  ρ0 = {rho0:.6}  R0 = {:?}  R1 = {:?}", thr.r0, thr.r1);
        }
        if let Some(b) = thr.k3_bound {
            println!("    (k3) bound {b:.6}, holds: {:?}", thr.cond_k3);
        }
        if let Some(s) = thr.a_star {
            println!("    a* = {s:.6}");
        }
        if let (Some(l), Some(r)) = (thr.k201_lhs, thr.k201_rhs) {
            println!("    (k201) {l:.6} ≥ {r:.6}: {:?}", thr.cond_k201);
        }
    }
    Ok(())
}

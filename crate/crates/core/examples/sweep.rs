//! Regime map over (a, μ) at p = 10/3, with the witness fibers above a*.

use norm_soliton::io::{sweep, Scenario, Task};
use norm_soliton::{GridSpec, ProblemParams, Spacing};

fn main() -> norm_soliton::Result<()> {
    let mut scn = Scenario::new(Task::Sweep, ProblemParams::new(1.0, 1.0, 10.0 / 3.0, 2.4)?);
    scn.grid = GridSpec { r_max: 40.0, n: 1024, spacing: Spacing::Graded { stretch: 4.0 } };
    scn.sweep.a = vec![2.0, 5.0, 7.5, 8.8, 10.0];
    scn.sweep.mu = vec![-1.0, 1.0];
    scn.sweep.classify_only = true;
    let r = sweep(&scn)?;
    for c in &r.cells {
        println!("a = {:5.2}  μ = {:+.1}  {:16}  E₀(w) = {:?}  𝒥(8⋆w) = {:?}", c.a, c.mu, c.regime, c.witness_e0, c.witness_j_end);
    }
    Ok(())
}

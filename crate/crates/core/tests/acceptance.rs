//! End-to-end acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use norm_soliton::constants::{gn_constant, solve_soliton, thresholds, DEFAULT_TOL, T_12_5};
use norm_soliton::dynamics::{
    evolve, evolve_with, instability_experiment, modulus_deviation, stability_experiment, EvolveOptions,
    InstabilityOptions, Scheme, StabilityOptions, VerdictKind,
};
use norm_soliton::functionals::energy;
use norm_soliton::io::critical_witness;
use norm_soliton::params::{gamma, P_BAR};
use norm_soliton::solvers::{
    continuation_mu_to_zero, continuation_q_to_critical, gaussian_init, ground_state_local_min, mountain_pass,
    SolveReport, SolverOptions,
};
use norm_soliton::spline::dilate;
use norm_soliton::{radial, FiberRegime, GridSpec, ProblemParams, RadialField, RadialGrid, Spacing};

// identity suite
const IDENTITY_TOL: f64 = 1e-5;
const RICHARDSON_MIN_SLOPE: f64 = 1.8;
// level ordering
const LEVEL_MONOTONE_TOL: f64 = 1e-6;
// sharp constants
const GN_EQUALITY_TOL: f64 = 1e-4;
const F_AT_A0_TOL: f64 = 1e-8;
const RANDOM_FIELDS: usize = 20;
const BARRIER_SAMPLES: usize = 100;
// multiplier sign
const K201_DRAWS: usize = 50;
// critical case
const CRITICAL_MASS_BELOW: f64 = 0.9;
const CRITICAL_MASS_ABOVE: f64 = 1.1;
const WITNESS_S_MAX: f64 = 8.0;
const WITNESS_TAIL: usize = 5;
// dynamics
const DT: f64 = 1e-3;
const MASS_DRIFT_RATE: f64 = 1e-10;
const ENERGY_DRIFT_RATE: f64 = 1e-6;
const STANDING_T: f64 = 5.0;
const MODULUS_TOL: f64 = 1e-4;
const VIRIAL_REL_TOL: f64 = 1e-2;
// stability / instability
const STAB_DELTA: f64 = 1e-3;
const STAB_T: f64 = 20.0;
const STAB_RUNS: usize = 8;
const STAB_FACTOR: f64 = 10.0;
const INSTAB_RHO: f64 = 0.1;
const INSTAB_GROWTH: f64 = 10.0;
// continuation
const CONTRACTION: f64 = 2.0;
const LIMIT_LEVEL_TOL: f64 = 1e-4;

struct Checks {
    items: Vec<(String, bool)>,
}

impl Checks {
    fn new() -> Self {
        Checks { items: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.items.push((what.into(), ok));
    }

    fn fail(&mut self, what: impl Into<String>) {
        self.check(false, what);
    }
}

fn grid(r_max: f64, n: usize, spacing: Spacing) -> Arc<RadialGrid> {
    Arc::new(GridSpec { r_max, n, spacing }.build().unwrap())
}

fn graded(r_max: f64, n: usize, stretch: f64) -> Arc<RadialGrid> {
    grid(r_max, n, Spacing::Graded { stretch })
}

fn prm(a: f64, mu: f64, p: f64, q: f64) -> ProblemParams {
    ProblemParams::new(a, mu, p, q).unwrap()
}

fn solve(p: &ProblemParams, g: Arc<RadialGrid>, mountain: bool, opts: &SolverOptions) -> norm_soliton::Result<SolveReport> {
    if mountain {
        mountain_pass(p, &gaussian_init(g, p.a, 1.0)?, opts)
    } else {
        ground_state_local_min(p, &gaussian_init(g, p.a, 3.0)?, opts)
    }
}

/// Signed relative Pohožaev-identity residual.
fn pi_signed(r: &SolveReport) -> f64 {
    let p = &r.params;
    r.energy.pohozaev_identity_residual(r.lambda, p) / r.energy.pohozaev_identity_scale(r.lambda, p)
}

/// Random radial field: a few Gaussian shells with random signs, widths and centres.
fn random_field(g: &Arc<RadialGrid>, rng: &mut ChaCha8Rng, a: f64) -> RadialField {
    let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..4))
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..4.0), rng.gen_range(0.5..3.0)))
        .collect();
    let u = RadialField::from_fn(g.clone(), |r| {
        bumps.iter().map(|(c, r0, w)| c * (-((r - r0) / w).powi(2)).exp()).sum()
    })
    .unwrap();
    u.normalized(a).unwrap()
}

fn gn_ratio(u: &RadialField, t: f64) -> f64 {
    let g = u.grid();
    let v = u.values();
    let m = u.mass2();
    let kin = radial::kinetic(g, v);
    let pow: f64 = g.weights().iter().zip(v).map(|(w, z)| w * z.norm().powf(t)).sum();
    let gt = gamma(t);
    pow / (gn_constant(t).unwrap() * m.powf(t * (1.0 - gt) / 2.0) * kin.powf(t * gt / 2.0))
}

/// Identity residuals on six parameter sets of both kinds, and the order of the
/// Pohožaev identity under refinement.
fn identities() -> Checks {
    let mut c = Checks::new();
    let sets = [
        ("th1 local min", false, prm(2.19, 1.0, 4.0, 2.2), 200.0, 7.0),
        ("th1 local min p=5", false, prm(0.8, 1.0, 5.0, 2.3), 200.0, 7.0),
        ("th2 mountain pass", true, prm(2.19, 1.0, 4.0, 2.2), 40.0, 6.0),
        ("th5 mountain pass", true, prm(2.0, -0.2, 4.0, 2.5), 40.0, 6.0),
        ("th5 mountain pass mu=0", true, prm(2.0, 0.0, 4.0, 2.2), 40.0, 6.0),
        ("th15 mountain pass", true, prm(2.0, 1.0, 4.0, P_BAR), 40.0, 6.0),
    ];
    let default = SolverOptions::default();
    let tight = SolverOptions { tol: 1e-11, ..Default::default() };
    for (name, mountain, p, r_max, stretch) in sets {
        match solve(&p, graded(r_max, 4095, stretch), mountain, &default) {
            Ok(r) => {
                let res = r.residuals;
                let worst = res.nehari.max(res.pohozaev_identity).max(res.pohozaev_p);
                c.check(worst < IDENTITY_TOL, format!("{name}: max residual {worst:.2e}"));
            }
            Err(e) => c.fail(format!("{name}: {e}")),
        }
        // local minima are smooth on these grids: coarser levels and a tighter
        // algebraic tolerance keep the discretization error dominant
        let (ns, opts) = if mountain { ([1023, 2047, 4095], &default) } else { ([255, 511, 1023], &tight) };
        let pis: Result<Vec<f64>, _> =
            ns.iter().map(|&n| solve(&p, graded(r_max, n, stretch), mountain, opts).map(|r| pi_signed(&r))).collect();
        match pis {
            Ok(v) => {
                let slope = (v[1] / v[2]).abs().log2();
                let first = (v[0] / v[1]).abs().log2();
                c.check(
                    slope >= RICHARDSON_MIN_SLOPE && first >= RICHARDSON_MIN_SLOPE,
                    format!("{name}: slopes {first:.3}, {slope:.3}"),
                );
            }
            Err(e) => c.fail(format!("{name} refinement: {e}")),
        }
    }
    c
}

fn fiber_geometry() -> Checks {
    let mut c = Checks::new();
    let g = grid(40.0, 2048, Spacing::Uniform);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in [prm(1.0, 1.0, 4.0, 2.2), prm(0.8, 1.0, 5.0, 2.5)] {
        let thr = thresholds(&p).unwrap();
        assert!(p.a < thr.abar0.unwrap());
        let mut bad = 0;
        for _ in 0..RANDOM_FIELDS {
            let u = random_field(&g, &mut rng, p.a);
            let f = energy(&u, &p).unwrap().fiber(&p);
            let pr = f.profile();
            let ok = pr.regime == FiberRegime::TwoCritical
                && pr.n_critical == 2
                && match (pr.s_u, pr.c_u, pr.t_u, pr.d_u) {
                    (Some(s), Some(cu), Some(t), Some(d)) => s < cu && cu < t && t < d && f.psi(s) < 0.0 && f.psi(t) > 0.0,
                    _ => false,
                };
            bad += usize::from(!ok);
        }
        c.check(bad == 0, format!("μ>0 (p={}, q={}): {bad}/{RANDOM_FIELDS} fields off", p.p, p.q));
    }
    for p in [prm(1.0, -1.0, 4.0, 2.2), prm(1.0, 0.0, 4.5, 2.5)] {
        let mut bad = 0;
        for _ in 0..RANDOM_FIELDS {
            let u = random_field(&g, &mut rng, p.a);
            let f = energy(&u, &p).unwrap().fiber(&p);
            let pr = f.profile();
            let ok = pr.regime == FiberRegime::OneCritical
                && pr.n_critical == 1
                && pr.t_u.is_some_and(|t| f.psi(t) > 0.0);
            bad += usize::from(!ok);
        }
        c.check(bad == 0, format!("μ={}: {bad}/{RANDOM_FIELDS} fields off", p.mu));
    }
    c
}

fn level_ordering() -> Checks {
    let mut c = Checks::new();
    let p = prm(2.19, 1.0, 4.0, 2.2);
    let opts = SolverOptions::default();
    let m = solve(&p, graded(200.0, 4095, 7.0), false, &opts);
    let mut levels = Vec::new();
    for mu in [0.0, 0.5, 1.0] {
        match solve(&p.with_mu(mu), graded(40.0, 2048, 6.0), true, &opts) {
            Ok(r) => levels.push(r.level),
            Err(e) => c.fail(format!("c_a at μ={mu}: {e}")),
        }
    }
    match (&m, levels.last()) {
        (Ok(m), Some(&ca)) => c.check(m.level < 0.0 && 0.0 < ca, format!("m(a) = {:.6}, c_a = {ca:.6}", m.level)),
        (Err(e), _) => c.fail(format!("m(a): {e}")),
        _ => {}
    }
    if levels.len() == 3 {
        let mono = levels.windows(2).all(|w| w[1] <= w[0] + LEVEL_MONOTONE_TOL);
        c.check(mono, format!("c at μ=0,0.5,1: {:.6} {:.6} {:.6}", levels[0], levels[1], levels[2]));
    }
    c
}

fn sharp_constants() -> Checks {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = grid(40.0, 2048, Spacing::Uniform);
    for t in [2.2, T_12_5, P_BAR, 4.0] {
        let q = solve_soliton(t, DEFAULT_TOL).unwrap();
        let eq = gn_ratio(&q.profile, t);
        c.check((eq - 1.0).abs() < GN_EQUALITY_TOL, format!("t={t:.4} equality {:.1e}", eq - 1.0));
        let worst = (0..RANDOM_FIELDS)
            .map(|_| gn_ratio(&random_field(&g, &mut rng, 1.0), t))
            .fold(0.0, f64::max);
        c.check(worst < 1.0, format!("t={t:.4} worst trial ratio {worst:.4}"));
    }
    for p in [prm(1.0, 1.0, 4.0, 2.2), prm(0.5, 2.0, 5.0, 2.5)] {
        let thr = thresholds(&p).unwrap();
        let (a0, rho0) = (thr.a0.unwrap(), thr.rho0.unwrap());
        let f0 = thr.f(a0, rho0);
        c.check(f0.abs() < F_AT_A0_TOL, format!("f(a0, ρ0) = {f0:.1e}"));
        let (r0, r1) = (thr.r0.unwrap(), thr.r1.unwrap());
        let (lo, hi) = ((r0 / 10.0).ln(), (r1 * 10.0).ln());
        let wrong = (0..BARRIER_SAMPLES)
            .filter(|&k| {
                let t = (lo + (hi - lo) * (k as f64 + 0.5) / BARRIER_SAMPLES as f64).exp();
                (thr.h(t) > 0.0) != (t > r0 && t < r1)
            })
            .count();
        c.check(wrong == 0, format!("h sign wrong at {wrong}/{BARRIER_SAMPLES} points"));
        c.check(p.a < thr.abar0.unwrap() && r0 < rho0 && rho0 < r1, format!("ρ0 = {rho0:.4} in ({r0:.4}, {r1:.4})"));
    }
    c
}

fn multiplier_sign() -> Checks {
    let mut c = Checks::new();
    let opts = SolverOptions::default();
    let k3 = prm(2.19, 1.0, 4.0, 2.2);
    let k201 = prm(2.0, 1.0, 4.0, P_BAR);
    assert_eq!(thresholds(&k3).unwrap().cond_k3, Some(true));
    assert_eq!(thresholds(&k201).unwrap().cond_k201, Some(true));
    for (name, p) in [("(k3)", k3), ("(k201)", k201)] {
        match solve(&p, graded(40.0, 2048, 6.0), true, &opts) {
            Ok(r) => c.check(r.lambda > 0.0, format!("{name} λ = {:.4}", r.lambda)),
            Err(e) => c.fail(format!("{name}: {e}")),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cq = gn_constant(P_BAR).unwrap();
    let (mut held, mut tries, mut broken) = (0, 0, 0);
    while held < K201_DRAWS && tries < 100 * K201_DRAWS {
        tries += 1;
        let p = prm(rng.gen_range(0.05..3.0), rng.gen_range(0.01..5.0), rng.gen_range(3.5..5.5), P_BAR);
        if thresholds(&p).unwrap().cond_k201 == Some(true) {
            held += 1;
            let holds = p.mu * p.a.powf(4.0 / 3.0) < P_BAR / (2.0 * cq);
            broken += usize::from(!holds);
        }
    }
    c.check(held == K201_DRAWS && broken == 0, format!("implication broken on {broken}/{held} draws"));
    c
}

fn critical_dichotomy() -> Checks {
    let mut c = Checks::new();
    let base = prm(1.0, 20.0, P_BAR, 2.4);
    let a_star = thresholds(&base).unwrap().a_star.unwrap();
    let g = grid(40.0, 2048, Spacing::Uniform);
    let below = base.with_a(CRITICAL_MASS_BELOW * a_star);
    match ground_state_local_min(&below, &gaussian_init(g.clone(), below.a, 3.0).unwrap(), &SolverOptions::default()) {
        Ok(r) => c.check(r.level < 0.0, format!("e(0.9a*) = {:.6}", r.level)),
        Err(e) => c.fail(format!("e(0.9a*): {e}")),
    }
    let above = base.with_a(CRITICAL_MASS_ABOVE * a_star);
    match critical_witness(&above, g, WITNESS_S_MAX, 33) {
        Ok(w) => {
            let n = w.samples.len();
            let tail = w.samples[n - WITNESS_TAIL..].windows(2).all(|p| p[1].1 < p[0].1);
            let end = w.samples[n - 1].1;
            c.check(
                w.e0 < 0.0 && tail && end < w.samples[0].1.min(0.0),
                format!("E0(w) = {:.4}, 𝒥(8⋆w) = {end:.3e}", w.e0),
            );
        }
        Err(e) => c.fail(format!("witness: {e}")),
    }
    c
}

fn dynamics() -> Checks {
    let mut c = Checks::new();
    let p = prm(2.19, 1.0, 4.0, 2.2);
    let g = graded(200.0, 2048, 6.0);
    let u = match solve(&p, g.clone(), false, &SolverOptions::default()) {
        Ok(u) => u,
        Err(e) => {
            c.fail(format!("ground state: {e}"));
            return c;
        }
    };
    for scheme in [Scheme::Strang, Scheme::Cn] {
        let opts = EvolveOptions { t_final: STANDING_T, dt: DT, scheme, sample_every: 50, ..Default::default() };
        let mut dev = 0.0f64;
        let st = evolve_with(&u.profile, &p, &opts, |_, phi| {
            let f = RadialField::new(g.clone(), phi.to_vec())?;
            dev = dev.max(modulus_deviation(&u.profile, &f)?);
            Ok(())
        });
        match st {
            Ok(st) => {
                c.check(
                    st.mass_drift_rate() < MASS_DRIFT_RATE && st.energy_drift_rate() < ENERGY_DRIFT_RATE,
                    format!("{scheme:?} standing drifts {:.1e}, {:.1e}", st.mass_drift_rate(), st.energy_drift_rate()),
                );
                c.check(dev < MODULUS_TOL, format!("{scheme:?} modulus deviation {dev:.1e}"));
            }
            Err(e) => c.fail(format!("{scheme:?}: {e}")),
        }
    }
    // breathing datum: the virial identity and the drifts away from equilibrium
    let b = dilate(&u.profile, 0.3).normalized(p.a).unwrap();
    match evolve(&b, &p, &EvolveOptions { t_final: 20.0, dt: DT, sample_every: 100, ..Default::default() }) {
        Ok(st) => {
            c.check(
                st.mass_drift_rate() < MASS_DRIFT_RATE && st.energy_drift_rate() < ENERGY_DRIFT_RATE,
                format!("breathing drifts {:.1e}, {:.1e}", st.mass_drift_rate(), st.energy_drift_rate()),
            );
            let l = &st.log;
            let (mut err, mut scale) = (0.0f64, 0.0f64);
            for k in 1..l.len() - 1 {
                let h = l[k + 1].t - l[k].t;
                let h2 = (l[k + 1].h - 2.0 * l[k].h + l[k - 1].h) / (h * h);
                err = err.max((h2 - 8.0 * l[k].pohozaev).abs());
                scale = scale.max((8.0 * l[k].pohozaev).abs());
            }
            c.check(err < VIRIAL_REL_TOL * scale, format!("H'' vs 8P {:.1e}", err / scale));
        }
        Err(e) => c.fail(format!("breathing: {e}")),
    }
    c
}

fn stability() -> Checks {
    let mut c = Checks::new();
    let p = prm(2.19, 1.0, 4.0, 2.2);
    let opts = SolverOptions::default();
    match solve(&p, graded(200.0, 2048, 6.0), false, &opts) {
        Ok(u) => {
            let so = StabilityOptions { dt: DT, epsilon_factor: STAB_FACTOR, ..Default::default() };
            match stability_experiment(&u, STAB_RUNS, STAB_DELTA, STAB_T, &so) {
                Ok(v) => c.check(
                    v.kind == VerdictKind::OrbitStable && v.max_orbit_distance.unwrap() <= STAB_FACTOR * STAB_DELTA,
                    format!("orbit distance {:.2e}", v.max_orbit_distance.unwrap()),
                ),
                Err(e) => c.fail(format!("stability: {e}")),
            }
        }
        Err(e) => c.fail(format!("ground state: {e}")),
    }
    match solve(&p, graded(40.0, 2048, 6.0), true, &opts) {
        Ok(u) => {
            let io = InstabilityOptions { growth: INSTAB_GROWTH, eta_slack: 0.0, ..Default::default() };
            match instability_experiment(&u, INSTAB_RHO, 5.0, &io) {
                Ok(v) => {
                    let eta = v.eta.unwrap_or(f64::NAN);
                    let detail = format!(
                        "η = {eta:.3}, sup P = {:.3}, blow-up at {:?} < {:?}",
                        v.max_pohozaev.unwrap_or(f64::NAN),
                        v.trigger_time,
                        v.envelope_root
                    );
                    c.check(
                        v.kind == VerdictKind::BlowUp
                            && eta > 0.0
                            && v.gradient_growth.unwrap() >= INSTAB_GROWTH
                            && v.concave == Some(true),
                        detail,
                    );
                }
                Err(e) => c.fail(format!("instability: {e}")),
            }
        }
        Err(e) => c.fail(format!("mountain pass: {e}")),
    }
    c
}

fn continuation() -> Checks {
    let mut c = Checks::new();
    let g = graded(40.0, 2048, 4.0);
    let opts = SolverOptions::default();
    let p = prm(2.0, 1.0, 4.0, 2.2);
    match continuation_mu_to_zero(&p, 5, &gaussian_init(g.clone(), p.a, 1.0).unwrap(), &opts) {
        Ok(cont) => {
            let r = cont.contraction_ratios();
            // the last ratio compares the jump to μ = 0, which is not a halving
            let halving = &r[..r.len() - 1];
            let h1 = halving.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
            let lam = halving.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
            c.check(h1 >= CONTRACTION, format!("μ→0 min H¹ ratio {h1:.5}"));
            c.check(lam >= CONTRACTION, format!("μ→0 min λ ratio {lam:.5}"));
        }
        Err(e) => c.fail(format!("μ→0: {e}")),
    }
    let p = prm(2.0, 1.0, 4.0, 3.6);
    match continuation_q_to_critical(&p, 5, &gaussian_init(g, p.a, 1.0).unwrap(), &opts) {
        Ok(cont) => {
            let r = cont.contraction_ratios();
            let h1 = r.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
            let lam = r.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
            c.check(h1 >= CONTRACTION && lam >= CONTRACTION, format!("q→10/3 min ratios {h1:.4}, {lam:.4}"));
            let err = cont.limit_relative_error.unwrap();
            c.check(err < LIMIT_LEVEL_TOL, format!("limit level error {err:.1e}"));
        }
        Err(e) => c.fail(format!("q→10/3: {e}")),
    }
    c
}

type Suite = fn() -> Checks;

fn main() -> ExitCode {
    let suites: [(&str, Suite); 9] = [
        ("identities", identities),
        ("fiber geometry", fiber_geometry),
        ("level ordering", level_ordering),
        ("sharp constants", sharp_constants),
        ("multiplier sign", multiplier_sign),
        ("critical dichotomy", critical_dichotomy),
        ("dynamics", dynamics),
        ("stability", stability),
        ("continuation", continuation),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in suites.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t0 = Instant::now();
        let checks = run();
        let ok = checks.items.iter().all(|(_, ok)| *ok);
        failed += usize::from(!ok);
        let detail: Vec<String> = checks
            .items
            .iter()
            .map(|(w, ok)| if *ok { w.clone() } else { format!("FAILED {w}") })
            .collect();
        println!(
            "criterion {} {:<18} {}  [{:.0?}]  {}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            t0.elapsed(),
            detail.join("; ")
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}

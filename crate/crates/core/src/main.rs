use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use norm_soliton::io::{run, Scenario, Task};
use norm_soliton::{Error, ProblemParams};

#[derive(Parser)]
#[command(name = "norm-soliton", version, about = "Prescribed-mass Schrödinger–Poisson standing waves")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `key.path=value`, applied in order after the file is read.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sharp Gagliardo–Nirenberg constants.
    Gn {
        #[command(flatten)]
        common: Common,
        #[arg(long = "t", num_args = 1..)]
        t: Vec<f64>,
    },
    /// Mass thresholds and the regime classification.
    Thresholds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
    },
    /// Fiber map of the initial field.
    Fiber(Common),
    /// Local minimizer on the gradient ball.
    Ground(Common),
    /// Mountain-pass solution.
    Mountain(Common),
    /// Time evolution.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// `ground`, `mountain` or a profile CSV.
        #[arg(long)]
        init: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<f64>,
        #[arg(long = "T")]
        t_final: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_parser = ["strang", "cn"])]
        scheme: Option<String>,
    },
    /// Orbit-distance runs from perturbed local minimizers.
    Stability(Common),
    /// Blow-up run from the dilated mountain-pass solution.
    Instability(Common),
    /// Regime map and level curves over (a, μ).
    Sweep(Common),
}

fn push<T: ToString>(out: &mut Vec<String>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        out.push(format!("{key}={}", v.to_string()));
    }
}

fn scenario(cmd: Cmd) -> Result<Scenario, Error> {
    let (task, common, mut extra) = match cmd {
        Cmd::Gn { common, t } => {
            let mut e = Vec::new();
            if !t.is_empty() {
                e.push(format!("gn.t={}", serde_json::to_string(&t)?));
            }
            (Task::Gn, common, e)
        }
        Cmd::Thresholds { common, a, mu, p, q } => {
            let mut e = Vec::new();
            push(&mut e, "params.a", a);
            push(&mut e, "params.mu", mu);
            push(&mut e, "params.p", p);
            push(&mut e, "params.q", q);
            (Task::Thresholds, common, e)
        }
        Cmd::Fiber(c) => (Task::Fiber, c, vec![]),
        Cmd::Ground(c) => (Task::Ground, c, vec![]),
        Cmd::Mountain(c) => (Task::Mountain, c, vec![]),
        Cmd::Evolve { common, init, rho, t_final, dt, scheme } => {
            let mut e = Vec::new();
            if let Some(i) = init {
                e.push(format!("evolve.init={}", serde_json::to_string(&i)?));
            }
            push(&mut e, "evolve.rho", rho);
            push(&mut e, "evolve.options.t_final", t_final);
            push(&mut e, "evolve.options.dt", dt);
            push(&mut e, "evolve.options.scheme", scheme);
            (Task::Evolve, common, e)
        }
        Cmd::Stability(c) => (Task::Stability, c, vec![]),
        Cmd::Instability(c) => (Task::Instability, c, vec![]),
        Cmd::Sweep(c) => (Task::Sweep, c, vec![]),
    };
    let mut overrides = common.overrides;
    overrides.append(&mut extra);
    overrides.push(format!("task={}", task.name()));
    match common.config {
        Some(path) => Scenario::load(path, &overrides),
        None => Scenario::new(task, ProblemParams::new(1.0, 1.0, 4.0, 2.2)?).with_overrides(&overrides),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = scenario(cli.cmd).and_then(|s| run(&s));
    match result {
        Ok(out) => {
            let v = json!({ "dir": out.dir, "manifest": out.manifest, "summary": out.summary });
            println!("{}", serde_json::to_string_pretty(&v).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let thresholds = match &e {
                Error::Regime { thresholds, .. } => thresholds.as_deref().map(|t| json!(t)),
                _ => None,
            };
            let v = json!({ "error": e.to_string(), "exit_code": e.exit_code(), "thresholds": thresholds });
            eprintln!("{}", serde_json::to_string_pretty(&v).expect("error serializes"));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

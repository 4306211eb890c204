use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{EvolveOptions, InstabilityOptions, StabilityOptions};
use crate::error::{Error, Result};
use crate::field::RadialField;
use crate::grid::{GridSpec, RadialGrid};
use crate::params::ProblemParams;
use crate::solvers::{exponential_init, gaussian_init, SolverOptions};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Gn,
    Thresholds,
    Fiber,
    Ground,
    Mountain,
    Evolve,
    Stability,
    Instability,
    Sweep,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Gn => "gn",
            Task::Thresholds => "thresholds",
            Task::Fiber => "fiber",
            Task::Ground => "ground",
            Task::Mountain => "mountain",
            Task::Evolve => "evolve",
            Task::Stability => "stability",
            Task::Instability => "instability",
            Task::Sweep => "sweep",
        }
    }
}

/// Starting field for the solvers and the fiber task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitSpec {
    Gaussian { width: f64 },
    Exponential { width: f64 },
    /// Profile CSV on the scenario grid.
    Profile { path: PathBuf },
}

impl InitSpec {
    pub fn build(&self, grid: Arc<RadialGrid>, a: f64) -> Result<RadialField> {
        match self {
            InitSpec::Gaussian { width } => gaussian_init(grid, a, *width),
            InitSpec::Exponential { width } => exponential_init(grid, a, *width),
            InitSpec::Profile { path } => {
                let u = RadialField::load_csv(path)?;
                if u.grid().spec() != grid.spec() {
                    return Err(Error::GridMismatch);
                }
                RadialField::new(grid, u.into_values())?.normalized(a)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GnTask {
    pub t: Vec<f64>,
    pub tol: f64,
    /// Also resolve `Q_t` on the scenario grid and write it out.
    pub profiles: bool,
}

impl Default for GnTask {
    fn default() -> Self {
        GnTask {
            t: vec![2.2, 2.4, 10.0 / 3.0, 4.0],
            tol: crate::constants::DEFAULT_TOL,
            profiles: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FiberTask {
    pub s_min: f64,
    pub s_max: f64,
    pub ds: f64,
}

impl Default for FiberTask {
    fn default() -> Self {
        FiberTask { s_min: -4.0, s_max: 4.0, ds: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveTask {
    /// `ground`, `mountain`, or a profile CSV path.
    pub init: String,
    /// Dilation `ϱ⋆φ₀` applied to the initial datum (0 leaves it alone).
    pub rho: f64,
    pub options: EvolveOptions,
}

impl Default for EvolveTask {
    fn default() -> Self {
        EvolveTask {
            init: "ground".into(),
            rho: 0.0,
            options: EvolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StabilityTask {
    pub perturbations: usize,
    pub delta: f64,
    pub t_final: f64,
    pub options: StabilityOptions,
}

impl Default for StabilityTask {
    fn default() -> Self {
        StabilityTask {
            perturbations: 8,
            delta: 1e-3,
            t_final: 20.0,
            options: StabilityOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstabilityTask {
    pub rho: f64,
    pub t_final: f64,
    pub options: InstabilityOptions,
}

impl Default for InstabilityTask {
    fn default() -> Self {
        InstabilityTask {
            rho: 0.1,
            t_final: 5.0,
            options: InstabilityOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepTask {
    pub a: Vec<f64>,
    pub mu: Vec<f64>,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
    /// Skip the solvers and only classify.
    pub classify_only: bool,
    /// Fiber samples `s ∈ [0, witness_s_max]` for the critical-case witness.
    pub witness_s_max: f64,
    pub witness_samples: usize,
}

impl Default for SweepTask {
    fn default() -> Self {
        SweepTask {
            a: vec![0.5, 1.0, 1.5, 2.0],
            mu: vec![-1.0, 0.0, 0.5, 1.0],
            workers: 0,
            classify_only: false,
            witness_s_max: 8.0,
            witness_samples: 33,
        }
    }
}

/// One fully specified job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub task: Task,
    pub params: ProblemParams,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub seed: u64,
    /// Falls back to `$NORM_SOLITON_OUT`, then `runs/`.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Solver start; defaults to a Gaussian of width 3 (ground) or 1 (mountain).
    #[serde(default)]
    pub init: Option<InitSpec>,
    #[serde(default)]
    pub gn: GnTask,
    #[serde(default)]
    pub fiber: FiberTask,
    #[serde(default)]
    pub evolve: EvolveTask,
    #[serde(default)]
    pub stability: StabilityTask,
    #[serde(default)]
    pub instability: InstabilityTask,
    #[serde(default)]
    pub sweep: SweepTask,
}

impl Scenario {
    pub fn new(task: Task, params: ProblemParams) -> Self {
        Scenario {
            schema_version: SCHEMA_VERSION,
            task,
            params,
            grid: GridSpec::default(),
            seed: 0,
            output_dir: None,
            solver: SolverOptions::default(),
            init: None,
            gn: GnTask::default(),
            fiber: FiberTask::default(),
            evolve: EvolveTask::default(),
            stability: StabilityTask::default(),
            instability: InstabilityTask::default(),
            sweep: SweepTask::default(),
        }
    }

    /// Parse a scenario document after applying `key=value` overrides to it.
    pub fn from_json(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: Value =
            serde_json::from_str(text).map_err(|e| Error::Parameter(format!("scenario is not JSON: {e}")))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        Self::from_value(doc)
    }

    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?, overrides)
    }

    pub fn from_value(doc: Value) -> Result<Self> {
        let version = doc.get("schema_version").and_then(Value::as_u64);
        if version != Some(SCHEMA_VERSION as u64) {
            return Err(Error::Parameter(format!(
                "schema_version must be {SCHEMA_VERSION}, got {}",
                version.map_or("nothing".into(), |v| v.to_string())
            )));
        }
        let s: Scenario = serde_json::from_value(doc).map_err(|e| Error::Parameter(format!("scenario: {e}")))?;
        s.params.validate()?;
        Ok(s)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("scenario serializes")
    }

    /// The scenario without its output location, which does not affect results.
    pub fn canonical(&self) -> Value {
        Scenario { output_dir: None, ..self.clone() }.to_value()
    }

    /// Apply overrides to an already parsed scenario.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut doc = self.to_value();
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        Self::from_value(doc)
    }

    pub fn build_grid(&self) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(self.grid.build()?))
    }

    pub fn init_or(&self, width: f64) -> InitSpec {
        self.init.clone().unwrap_or(InitSpec::Gaussian { width })
    }
}

/// `a.b.c=value`; the value is read as JSON when it parses, as a string otherwise.
pub fn apply_override(doc: &mut Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Parameter(format!("override '{spec}' is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::Parameter(format!("override '{spec}' has an empty key")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if !node.is_object() {
            if node.is_null() {
                *node = Value::Object(Default::default());
            } else {
                return Err(Error::Parameter(format!("override '{key}': '{part}' is not inside an object")));
            }
        }
        let obj = node.as_object_mut().unwrap();
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert(Value::Null);
    }
    unreachable!()
}

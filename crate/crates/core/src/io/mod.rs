//! Scenarios, regime classification, sweeps and persisted runs.

mod regime;
mod run;
mod scenario;
mod sweep;

pub use regime::{classify_regime, critical_witness, CriticalWitness, RegimeTag};
pub use run::{config_hash, execute, output_root, run, Artifact, Manifest, Outputs, RunOutcome, OUTPUT_ENV};
pub use scenario::{
    apply_override, EvolveTask, FiberTask, GnTask, InitSpec, InstabilityTask, Scenario, StabilityTask, SweepTask, Task,
    SCHEMA_VERSION,
};
pub use sweep::{sweep, SweepCell, SweepResult};

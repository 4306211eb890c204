//! Time evolution of the Schrödinger–Poisson flow, virial diagnostics and the
//! orbital stability / blow-up experiments.

mod evolve;
mod experiments;

pub use evolve::{evolve, evolve_with, virial_diagnostics, Diagnostics, EvolutionState, EvolveOptions, Scheme};
pub use experiments::{
    instability_experiment, modulus_deviation, orbit_distance, perturb, stability_experiment, InstabilityOptions,
    StabilityOptions, StabilityVerdict, VerdictKind,
};

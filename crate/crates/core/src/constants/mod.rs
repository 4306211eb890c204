//! Sharp Gagliardo–Nirenberg constants and the explicit mass thresholds.

mod cache;
mod soliton;
mod thresholds;

pub use cache::{cache_dir, gn_constant, shooting_data, CACHE_ENV, DEFAULT_TOL};
pub use soliton::{
    default_soliton_grid, gn_prefactor, shoot, solve_soliton, solve_soliton_on, GnSoliton, ShootingData,
};
pub use thresholds::{f_of, k201_sides, thresholds, GnConstants, ThresholdReport, T_12_5};

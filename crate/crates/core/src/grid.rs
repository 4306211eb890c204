use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node placement along the radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    /// `r = r_max sinh(stretch ξ) / sinh(stretch)`, which clusters nodes near the origin.
    Graded { stretch: f64 },
}

/// The serializable part of a grid: enough to rebuild it exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_max: f64,
    pub n: usize,
    pub spacing: Spacing,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r_max: 40.0,
            n: 2048,
            spacing: Spacing::Uniform,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<RadialGrid> {
        make_grid(self.r_max, self.n, self.spacing)
    }

    /// The same stretching with roughly twice the resolution; nodes of `self` are
    /// a subset of the refined nodes.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            n: 2 * self.n + 1,
            ..*self
        }
    }
}

/// Finite-volume discretization of a ball of radius `r_max`.
///
/// There are `n` interior nodes plus a boundary node at `r_max` where fields vanish.
/// Every node owns the spherical shell between the midpoints to its neighbours
/// (the first shell starts at the origin, the last ends at `r_max`), and `weights`
/// are the exact shell volumes.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    spec: GridSpec,
    nodes: Vec<f64>,
    faces: Vec<f64>,
    weights: Vec<f64>,
    conductance: Vec<f64>,
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

pub fn make_grid(r_max: f64, n: usize, spacing: Spacing) -> Result<RadialGrid> {
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::Parameter(format!("r_max must be positive, got {r_max}")));
    }
    if n < 16 {
        return Err(Error::Parameter(format!("need at least 16 nodes, got {n}")));
    }
    let m = (n + 1) as f64;
    let nodes: Vec<f64> = match spacing {
        Spacing::Uniform => (1..=n + 1).map(|i| r_max * i as f64 / m).collect(),
        Spacing::Graded { stretch } => {
            if !(stretch.is_finite() && stretch > 0.0 && stretch < 300.0) {
                return Err(Error::Parameter(format!(
                    "graded stretch must lie in (0, 300), got {stretch}"
                )));
            }
            let sb = stretch.sinh();
            let mut r: Vec<f64> = (1..=n + 1)
                .map(|i| r_max * (stretch * i as f64 / m).sinh() / sb)
                .collect();
            r[n] = r_max;
            r
        }
    };
    if nodes[0] <= 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter(
            "grid nodes are not strictly increasing (stretch too large for n)".into(),
        ));
    }

    let mut faces = Vec::with_capacity(n + 2);
    faces.push(0.0);
    faces.extend(nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    faces.push(r_max);

    let weights = faces
        .windows(2)
        .map(|f| 4.0 * PI / 3.0 * (f[1].powi(3) - f[0].powi(3)))
        .collect();
    let conductance = (0..n)
        .map(|i| 4.0 * PI * faces[i + 1].powi(2) / (nodes[i + 1] - nodes[i]))
        .collect();

    Ok(RadialGrid {
        spec: GridSpec { r_max, n, spacing },
        nodes,
        faces,
        weights,
        conductance,
    })
}

impl RadialGrid {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn r_max(&self) -> f64 {
        self.spec.r_max
    }

    /// Number of interior (free) nodes.
    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Total number of samples, boundary node included.
    pub fn len(&self) -> usize {
        self.spec.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cell boundaries: `faces[i]` and `faces[i + 1]` bound the shell of node `i`.
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `4π f² / Δr` on the face between node `i` and node `i + 1`.
    pub fn conductance(&self) -> &[f64] {
        &self.conductance
    }

    /// `Σ w_i g(r_i)` over nodes with `r_i ≤ radius`, completed by the exact partial
    /// shell volume of the cell containing `radius`.
    pub fn ball_integral(&self, radius: f64, g: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (i, &r) in self.nodes.iter().enumerate() {
            let (lo, hi) = (self.faces[i], self.faces[i + 1]);
            if lo >= radius {
                break;
            }
            let top = hi.min(radius);
            acc += 4.0 * PI / 3.0 * (top.powi(3) - lo.powi(3)) * g(r);
        }
        acc
    }

    /// Smallest node spacing, a proxy for the resolution scale near the origin.
    pub fn min_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(self.nodes[0], f64::min)
    }
}

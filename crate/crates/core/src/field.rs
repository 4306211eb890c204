use std::io::{BufRead, Write};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RadialGrid};

/// Scalar sample type shared by real profiles and complex wave functions.
pub trait Amplitude:
    Copy
    + Default
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn norm_sqr(self) -> f64;
    fn modulus(self) -> f64;
    /// `Re(conj(self) * other)`
    fn dot(self, other: Self) -> f64;
    fn to_complex(self) -> Complex64;
    fn is_finite(self) -> bool;
}

impl Amplitude for f64 {
    #[inline]
    fn norm_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn dot(self, other: f64) -> f64 {
        self * other
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Amplitude for Complex64 {
    #[inline]
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn dot(self, other: Complex64) -> f64 {
        self.re * other.re + self.im * other.im
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

/// A radial function sampled on a [`RadialGrid`], boundary node included.
///
/// The sample at `r_max` is always zero.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<Complex64>,
    real: bool,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, mut values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field samples"));
        }
        *values.last_mut().unwrap() = Complex64::new(0.0, 0.0);
        let real = values.iter().all(|v| v.im == 0.0);
        Ok(RadialField { grid, values, real })
    }

    pub fn from_real(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        let mut f = Self::new(grid, values.into_iter().map(|x| Complex64::new(x, 0.0)).collect())?;
        f.real = true;
        Ok(f)
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let v = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::from_real(grid, v)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        RadialField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
            real: true,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Whether every sample has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn modulus(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// `Σ w_i |u_i|²`
    pub fn mass2(&self) -> f64 {
        mass2(&self.grid, &self.values)
    }

    pub fn scaled(&self, c: f64) -> RadialField {
        RadialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            real: self.real,
        }
    }

    /// Rescale to `|u|₂ = a`.
    pub fn normalized(&self, a: f64) -> Result<RadialField> {
        let m = self.mass2();
        if m <= 0.0 {
            return Err(Error::Parameter("cannot normalize the zero field".into()));
        }
        Ok(self.scaled(a / m.sqrt()))
    }

    pub(crate) fn check_same_grid(&self, other: &RadialField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_profile_csv(out, &self.grid, &self.values)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    /// Read a profile written by [`RadialField::write_csv`]. The grid is rebuilt from
    /// the JSON header and checked against the `r` column.
    pub fn read_csv<R: BufRead>(mut input: R) -> Result<RadialField> {
        let mut first = String::new();
        input.read_line(&mut first)?;
        let header = first
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| Error::Format("profile CSV must start with a '# {grid json}' line".into()))?;
        let spec: GridSpec = serde_json::from_str(header.trim())?;
        let grid = Arc::new(spec.build()?);
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let mut values = Vec::with_capacity(grid.len());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::Format(format!("row {i}: missing column {k}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("row {i}: {e}")))
            };
            let r = parse(0)?;
            let node = *grid
                .nodes()
                .get(i)
                .ok_or_else(|| Error::Format("more rows than grid nodes".into()))?;
            if (r - node).abs() > 1e-12 * node.max(1.0) {
                return Err(Error::Format(format!("row {i}: r = {r} does not match grid node {node}")));
            }
            values.push(Complex64::new(parse(1)?, parse(2)?));
        }
        RadialField::new(grid, values)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<RadialField> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}

pub(crate) fn write_profile_csv<W: Write, T: Amplitude>(
    mut out: W,
    grid: &RadialGrid,
    values: &[T],
) -> Result<()> {
    writeln!(out, "# {}", serde_json::to_string(&grid.spec())?)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "re_u", "im_u"]).map_err(|e| Error::Format(e.to_string()))?;
    for (r, v) in grid.nodes().iter().zip(values) {
        let c = v.to_complex();
        w.write_record([format!("{r:e}"), format!("{:e}", c.re), format!("{:e}", c.im)])
            .map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn mass2<T: Amplitude>(grid: &RadialGrid, u: &[T]) -> f64 {
    grid.weights().iter().zip(u).map(|(w, v)| w * v.norm_sqr()).sum()
}

/// `Re Σ w_i conj(u_i) v_i`
pub(crate) fn inner<T: Amplitude>(grid: &RadialGrid, u: &[T], v: &[T]) -> f64 {
    grid.weights()
        .iter()
        .zip(u.iter().zip(v))
        .map(|(w, (a, b))| w * a.dot(*b))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Spacing};
    use std::f64::consts::PI;

    #[test]
    fn gaussian_mass() {
        let exact = 4.0 * PI * 0.125 * (PI / 2.0).sqrt();
        let m = |n| {
            let g = Arc::new(make_grid(40.0, n, Spacing::Uniform).unwrap());
            RadialField::from_fn(g, |r| (-r * r).exp()).unwrap().mass2()
        };
        let (m1, m2) = (m(2048), m(4097));
        assert!((m1 / exact - 1.0).abs() < 1e-3);
        // second order: one Richardson step removes the leading error
        assert!(((4.0 * m2 - m1) / 3.0 / exact - 1.0).abs() < 1e-7);
    }

    #[test]
    fn boundary_sample_is_zeroed() {
        let g = Arc::new(make_grid(5.0, 32, Spacing::Uniform).unwrap());
        let u = RadialField::from_fn(g, |_| 1.0).unwrap();
        assert_eq!(u.values().last().unwrap().re, 0.0);
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let g = Arc::new(make_grid(7.0, 40, Spacing::Graded { stretch: 2.5 }).unwrap());
        let vals = g
            .nodes()
            .iter()
            .map(|&r| Complex64::new((-r).exp() / 3.0, (r * 1.7).sin() * 1e-7))
            .collect();
        let u = RadialField::new(g, vals).unwrap();
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let back = RadialField::read_csv(&buf[..]).unwrap();
        assert_eq!(back.values(), u.values());
        let mut buf2 = Vec::new();
        back.write_csv(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn mismatched_grids_detected() {
        let g1 = Arc::new(make_grid(5.0, 32, Spacing::Uniform).unwrap());
        let g2 = Arc::new(make_grid(5.0, 33, Spacing::Uniform).unwrap());
        let g3 = Arc::new(make_grid(5.0, 32, Spacing::Uniform).unwrap());
        let a = RadialField::zeros(g1);
        assert!(a.check_same_grid(&RadialField::zeros(g2)).is_err());
        assert!(a.check_same_grid(&RadialField::zeros(g3)).is_ok());
    }
}

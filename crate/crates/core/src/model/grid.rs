use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::{invalid, Error, Result};

/// Rectangular grid of sample points `(x_j, t_i)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawGrid", into = "RawGrid"))]
pub struct SpaceTimeGrid {
    x: Vec<f64>,
    t: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct RawGrid {
    x: Vec<f64>,
    t: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawGrid> for SpaceTimeGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        Self::new(raw.x, raw.t)
    }
}

#[cfg(feature = "serde")]
impl From<SpaceTimeGrid> for RawGrid {
    fn from(g: SpaceTimeGrid) -> Self {
        Self { x: g.x, t: g.t }
    }
}

impl SpaceTimeGrid {
    /// `x` strictly increasing, `t` non-decreasing and non-negative, both non-empty and finite.
    pub fn new(x: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        if x.is_empty() || t.is_empty() {
            return Err(invalid("grid", "x and t must both be non-empty"));
        }
        if x.iter().chain(&t).any(|v| !v.is_finite()) {
            return Err(invalid("grid", "grid values must be finite"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("x", "x values must be strictly increasing"));
        }
        if t[0] < 0.0 {
            return Err(invalid("t", "t values must be non-negative"));
        }
        if t.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("t", "t values must be non-decreasing"));
        }
        Ok(Self { x, t })
    }

    /// `n` equispaced points on `[lo, hi]` (inclusive); `n = 1` gives `lo`.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => alloc::vec![lo],
            _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid coordinates `(t, x)` of the flat row-major index.
    pub fn point(&self, index: usize) -> (f64, f64) {
        let nx = self.x.len();
        (self.t[index / nx], self.x[index % nx])
    }
}

/// Where a field came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FieldSource {
    Utm,
    Oracle,
    Free,
}

/// Complex samples `u(x_j, t_i)`, stored row-major with one row per time.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    grid: SpaceTimeGrid,
    values: Vec<Complex64>,
    source: FieldSource,
}

impl SolutionField {
    pub fn new(grid: SpaceTimeGrid, values: Vec<Complex64>, source: FieldSource) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.t().len(),
                grid.x().len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            let (t, x) = grid.point(i);
            return Err(Error::NonFinite(format!("t = {t}, x = {x}")));
        }
        Ok(Self { grid, values, source })
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn source(&self) -> FieldSource {
        self.source
    }

    pub fn get(&self, it: usize, ix: usize) -> Complex64 {
        self.values[it * self.grid.x().len() + ix]
    }

    pub fn row(&self, it: usize) -> &[Complex64] {
        let nx = self.grid.x().len();
        &self.values[it * nx..(it + 1) * nx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn grid_invariants_are_enforced() {
        assert!(SpaceTimeGrid::new(vec![0.0, 1.0], vec![0.0, 0.0, 1.0]).is_ok());
        assert!(SpaceTimeGrid::new(vec![1.0, 1.0], vec![0.0]).is_err());
        assert!(SpaceTimeGrid::new(vec![0.0], vec![-0.1]).is_err());
        assert!(SpaceTimeGrid::new(vec![0.0], vec![1.0, 0.5]).is_err());
        assert!(SpaceTimeGrid::new(vec![], vec![1.0]).is_err());
    }

    #[test]
    fn field_checks_dimensions_and_finiteness() {
        let g = SpaceTimeGrid::new(vec![0.0, 1.0], vec![0.0]).unwrap();
        let z = Complex64::new(0.0, 0.0);
        assert!(matches!(SolutionField::new(g.clone(), vec![z], FieldSource::Utm), Err(Error::GridMismatch(_))));
        assert!(matches!(
            SolutionField::new(g.clone(), vec![z, Complex64::new(f64::NAN, 0.0)], FieldSource::Utm),
            Err(Error::NonFinite(_))
        ));
        let f = SolutionField::new(g, vec![z, Complex64::new(1.0, 0.0)], FieldSource::Oracle).unwrap();
        assert_eq!(f.get(0, 1).re, 1.0);
        assert_eq!(f.row(0).len(), 2);
    }
}

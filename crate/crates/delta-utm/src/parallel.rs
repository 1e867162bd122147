//! Parallel evaluation over grids and sample sets, one solver worker per thread.

use delta_utm_core::model::{FieldSource, SolutionField, SpaceTimeGrid};
use delta_utm_core::utm::UtmSolver;
use delta_utm_core::{Error, PointFailure};
use num_complex::Complex64;
use rayon::prelude::*;

/// Values at arbitrary `(x, t)` points, in input order.
pub fn evaluate_points(solver: &UtmSolver, points: &[(f64, f64)]) -> Result<Vec<Complex64>, Error> {
    let results: Vec<Result<Complex64, Error>> =
        points.par_iter().map_init(|| solver.worker(), |w, &(x, t)| w.evaluate(x, t)).collect();
    let mut values = Vec::with_capacity(points.len());
    let mut failures = Vec::new();
    for (&(x, t), r) in points.iter().zip(results) {
        match r {
            Ok(v) => values.push(v),
            Err(error) => failures.push(PointFailure { t, x, error }),
        }
    }
    if failures.is_empty() {
        Ok(values)
    } else {
        Err(Error::Field(failures))
    }
}

/// Parallel counterpart of [`UtmSolver::evaluate_field`].
pub fn evaluate_field(solver: &UtmSolver, grid: &SpaceTimeGrid) -> Result<SolutionField, Error> {
    let points: Vec<(f64, f64)> = (0..grid.len()).map(|i| grid.point(i)).map(|(t, x)| (x, t)).collect();
    let values = evaluate_points(solver, &points)?;
    SolutionField::new(grid.clone(), values, FieldSource::Utm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use delta_utm_core::model::{InitialProfile, PotentialParams};
    use delta_utm_core::quadrature::QuadratureConfig;

    #[test]
    fn matches_sequential_evaluation() {
        let s = UtmSolver::new(
            InitialProfile::gaussian(0.0, 1.0, 1.0).unwrap(),
            PotentialParams { q: 1.0, a: 0.0 },
            QuadratureConfig::default(),
        )
        .unwrap();
        let grid = SpaceTimeGrid::new(vec![-1.0, 0.0, 0.5], vec![0.0, 0.3]).unwrap();
        assert_eq!(evaluate_field(&s, &grid).unwrap(), s.evaluate_field(&grid).unwrap());
    }
}

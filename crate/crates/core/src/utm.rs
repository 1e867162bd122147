//! The transform representation of `u(x, t)`.
//!
//! For `x ≤ a`
//! ```text
//! u = (1/2π) ∫ e^{ikx - ik²t} F(k) dk,  F = û1(k) - (iq e^{-2ika} û1(-k) - k û2(k)) / (iq + k),
//! ```
//! for `x > a`
//! ```text
//! u = (1/2π) ∫ e^{ikx - ik²t} H(k) dk,  H = û2(k) - (k û1(k) + iq e^{-2ika} û2(-k)) / (iq - k),
//! ```
//! plus `B e^{-q|x-a|} e^{iq²t}` when `q > 0`. Here `û1`, `û2` are the half-line
//! transforms of `u0` about `a`. For `q = 0` both reduce to the free propagator.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::model::{FieldSource, InitialProfile, PotentialParams, Side, SolutionField, SpaceTimeGrid};
use crate::oracle::BoundaryTraces;
use crate::quadrature::{
    oscillatory_integral_with, AsymptoticSeries, Feature, QuadratureConfig, QuadratureReport, SpectralIntegrand,
    TailModel,
};
use crate::transforms::{half_transform_series, integrate_profile, HalfTransforms};
use crate::{invalid, Error, PointFailure, Result};

/// Below this `|q|` the integrand denominators `iq ± k` are treated as singular
/// and the `q → 0` limit is used instead.
pub const SMALL_Q: f64 = 1e-6;

/// The bound-state contribution `B e^{-q|x-a|} e^{iq²t}`, present for `q > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStateTerm {
    pub coefficient: Complex64,
    pub q: f64,
    pub a: f64,
}

impl BoundStateTerm {
    pub fn value(&self, x: f64, t: f64) -> Complex64 {
        self.coefficient * (-self.q * (x - self.a).abs()).exp() * Complex64::from_polar(1.0, self.q * self.q * t)
    }
}

/// `B = q (∫_{-∞}^a e^{q(y-a)} u0 dy + ∫_a^∞ e^{-q(y-a)} u0 dy)`.
pub fn bound_state_coefficient(profile: &InitialProfile, params: &PotentialParams) -> Result<Complex64> {
    params.validate()?;
    let PotentialParams { q, a } = *params;
    if q <= 0.0 {
        return Err(Error::Domain { what: "bound-state coefficient", q });
    }
    let (lo, hi) = profile.support_interval(crate::transforms::TRUNCATION);
    let tol = 1e-13;
    let mut sum = Complex64::new(0.0, 0.0);
    if lo < a {
        let w = |y: f64| Complex64::new((q * (y - a)).exp(), 0.0);
        sum += integrate_profile(profile, lo, a.min(hi), w, 0.0, tol)?;
    }
    if hi > a {
        let w = |y: f64| Complex64::new((-q * (y - a)).exp(), 0.0);
        sum += integrate_profile(profile, a.max(lo), hi, w, 0.0, tol)?;
    }
    Ok(sum * q)
}

/// Free evolution of `A e^{-((x-c)/w)²}`: `A (1 + 4it/w²)^{-1/2} e^{-(x-c)²/(w² + 4it)}`.
pub fn free_gaussian(center: f64, width: f64, amplitude: f64, x: f64, t: f64) -> Complex64 {
    let w2 = width * width;
    let z = Complex64::new(w2, 4.0 * t);
    let d = x - center;
    (Complex64::new(w2, 0.0) / z).sqrt() * (-(d * d) / z).exp() * amplitude
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Left,
    Right,
    Free,
}

/// `F`, `H` or `û0`, depending on the branch.
#[derive(Debug)]
struct UtmIntegrand<'a, 'p> {
    transforms: &'a HalfTransforms<'p>,
    q: f64,
    branch: Branch,
}

impl SpectralIntegrand for UtmIntegrand<'_, '_> {
    fn eval(&self, k: f64) -> Result<Complex64> {
        let a = self.transforms.a();
        let iq = Complex64::new(0.0, self.q);
        match self.branch {
            Branch::Free => {
                let (l, r) = self.transforms.pair(k)?;
                Ok(l + r)
            }
            Branch::Left => {
                let [l, r, lm, _] = self.transforms.quad(k)?;
                let m = Complex64::from_polar(1.0, -2.0 * k * a);
                Ok(l - (iq * m * lm - r * k) / (iq + k))
            }
            Branch::Right => {
                let [l, r, _, rm] = self.transforms.quad(k)?;
                let m = Complex64::from_polar(1.0, -2.0 * k * a);
                Ok(r - (l * k + iq * m * rm) / (iq - k))
            }
        }
    }

    fn asymptotics(&self) -> AsymptoticSeries {
        let p = self.transforms.profile();
        let a = self.transforms.a();
        let s1 = half_transform_series(p, a, Side::Left);
        let s2 = half_transform_series(p, a, Side::Right);
        let iq = Complex64::new(0.0, self.q);
        let mut out = AsymptoticSeries::new();
        match self.branch {
            Branch::Free => {
                out.add(&s1);
                out.add(&s2);
            }
            Branch::Left => {
                out.add(&s1);
                out.add(&s1.reflected().modulated(2.0 * a).times_geometric(iq, 1).scaled(-iq));
                out.add(&s2.times_geometric(iq, 0));
            }
            Branch::Right => {
                out.add(&s2);
                out.add(&s1.times_geometric(-iq, 0));
                out.add(&s2.reflected().modulated(2.0 * a).times_geometric(-iq, 1).scaled(iq));
            }
        }
        out
    }

    fn features(&self) -> Vec<Feature> {
        match self.branch {
            Branch::Free => Vec::new(),
            _ => alloc::vec![Feature { center: 0.0, scale: self.q.abs() }],
        }
    }

    fn phase_center(&self) -> f64 {
        self.transforms.a()
    }
}

/// Evaluator of the representation for one profile and potential.
#[derive(Debug, Clone)]
pub struct UtmSolver {
    profile: InitialProfile,
    params: PotentialParams,
    cfg: QuadratureConfig,
    free: bool,
    left: TailModel,
    right: TailModel,
    bound: Option<BoundStateTerm>,
}

impl UtmSolver {
    /// Prepares the integrands and certifies their tails beyond `cfg.k_max`.
    pub fn new(profile: InitialProfile, params: PotentialParams, cfg: QuadratureConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        let q = params.q;
        let free = q == 0.0 || q.abs() < SMALL_Q;
        if free && q != 0.0 {
            log::warn!("|q| = {:e} is below {SMALL_Q:e}: using the q = 0 limit", q.abs());
        }
        let transforms = HalfTransforms::new(&profile, params.a);
        let (left, right) = if free {
            let f = UtmIntegrand { transforms: &transforms, q: 0.0, branch: Branch::Free };
            let m = TailModel::new(&f, &cfg)?;
            (m.clone(), m)
        } else {
            let l = UtmIntegrand { transforms: &transforms, q, branch: Branch::Left };
            let r = UtmIntegrand { transforms: &transforms, q, branch: Branch::Right };
            (TailModel::new(&l, &cfg)?, TailModel::new(&r, &cfg)?)
        };
        let bound = if !free && q > 0.0 {
            let coefficient = bound_state_coefficient(&profile, &params)?;
            Some(BoundStateTerm { coefficient, q, a: params.a })
        } else {
            None
        };
        Ok(Self { profile, params, cfg, free, left, right, bound })
    }

    pub fn profile(&self) -> &InitialProfile {
        &self.profile
    }

    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    /// True when the free propagator is used (`q = 0` or `|q|` below [`SMALL_Q`]).
    pub fn is_free(&self) -> bool {
        self.free
    }

    pub fn bound_state(&self) -> Option<&BoundStateTerm> {
        self.bound.as_ref()
    }

    /// An evaluator with its own transform cache, for use on one thread.
    pub fn worker(&self) -> UtmWorker<'_> {
        UtmWorker { solver: self, transforms: HalfTransforms::new(&self.profile, self.params.a) }
    }

    /// `u(x, t)`.
    pub fn evaluate(&self, x: f64, t: f64) -> Result<Complex64> {
        self.worker().evaluate(x, t)
    }

    /// `u(x, t)` without the bound-state term, with quadrature diagnostics.
    pub fn dispersive_part(&self, x: f64, t: f64) -> Result<QuadratureReport> {
        self.worker().dispersive_part(x, t)
    }

    /// Sequential evaluation over a grid; failures are collected with their coordinates.
    pub fn evaluate_field(&self, grid: &SpaceTimeGrid) -> Result<SolutionField> {
        let worker = self.worker();
        let mut values = Vec::with_capacity(grid.len());
        let mut failures = Vec::new();
        for i in 0..grid.len() {
            let (t, x) = grid.point(i);
            match worker.evaluate(x, t) {
                Ok(v) => values.push(v),
                Err(error) => {
                    failures.push(PointFailure { t, x, error });
                    values.push(Complex64::new(0.0, 0.0));
                }
            }
        }
        if !failures.is_empty() {
            return Err(Error::Field(failures));
        }
        SolutionField::new(grid.clone(), values, FieldSource::Utm)
    }
}

/// Single-threaded evaluator borrowed from a [`UtmSolver`].
#[derive(Debug)]
pub struct UtmWorker<'s> {
    solver: &'s UtmSolver,
    transforms: HalfTransforms<'s>,
}

impl UtmWorker<'_> {
    pub fn dispersive_part(&self, x: f64, t: f64) -> Result<QuadratureReport> {
        let s = self.solver;
        let (branch, tail) = if s.free {
            (Branch::Free, &s.left)
        } else if x <= s.params.a {
            (Branch::Left, &s.left)
        } else {
            (Branch::Right, &s.right)
        };
        let q = if s.free { 0.0 } else { s.params.q };
        let f = UtmIntegrand { transforms: &self.transforms, q, branch };
        oscillatory_integral_with(&f, tail, x, t, &s.cfg)
    }

    pub fn evaluate(&self, x: f64, t: f64) -> Result<Complex64> {
        let mut u = self.dispersive_part(x, t)?.value;
        if let Some(b) = &self.solver.bound {
            u += b.value(x, t);
        }
        Ok(u)
    }
}

/// `u(x, t)` for a single point; builds a solver each call.
pub fn evaluate_utm(
    profile: &InitialProfile,
    params: &PotentialParams,
    x: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    UtmSolver::new(profile.clone(), *params, *cfg)?.evaluate(x, t)
}

/// Batch evaluation over a grid; see [`UtmSolver::evaluate_field`].
pub fn evaluate_field(
    profile: &InitialProfile,
    params: &PotentialParams,
    grid: &SpaceTimeGrid,
    cfg: &QuadratureConfig,
) -> Result<SolutionField> {
    UtmSolver::new(profile.clone(), *params, *cfg)?.evaluate_field(grid)
}

/// Residuals of the two global relations at spectral parameter `k` and time `t`:
///
/// ```text
/// û^(1)(-k,t) - e^{-ik²t} û0^(1)(-k) - e^{ika} [(iq + k) h1 + i h2]
/// û^(2)(k,t)  - e^{-ik²t} û0^(2)(k)  - e^{-ika}[(iq + k) h1 - i h2]
/// ```
///
/// with `h1`, `h2` the time transforms of `g1`, `φ1`. The space transforms are
/// taken from the rows of `field` at `t = 0` and at `t`; its x-grid must contain `a`.
pub fn global_relation_residual(
    field: &SolutionField,
    traces: &BoundaryTraces,
    params: &PotentialParams,
    k: f64,
    t: f64,
) -> Result<(Complex64, Complex64)> {
    params.validate()?;
    if !k.is_finite() {
        return Err(invalid("k", "must be finite"));
    }
    let PotentialParams { q, a } = *params;
    let grid = field.grid();
    let times = grid.t();
    if times[0] != 0.0 {
        return Err(Error::GridMismatch(format!("field starts at t = {}, the relations need t = 0", times[0])));
    }
    let tol = 1e-9 * t.abs().max(1.0);
    let it = times
        .iter()
        .position(|&s| (s - t).abs() <= tol)
        .ok_or_else(|| Error::GridMismatch(format!("field has no row at t = {t}")))?;
    let xs = grid.x();
    let ia = xs
        .iter()
        .position(|&x| (x - a).abs() <= 1e-9 * a.abs().max(1.0))
        .ok_or_else(|| Error::GridMismatch(format!("x grid does not contain a = {a}")))?;

    let (h1, h2) = traces.time_transforms(k, t)?;
    let phase = Complex64::from_polar(1.0, -k * k * t);
    let iq = Complex64::new(0.0, q);
    let i = Complex64::i();

    let left_t = row_transform(&xs[..=ia], &field.row(it)[..=ia], -k);
    let left_0 = row_transform(&xs[..=ia], &field.row(0)[..=ia], -k);
    let r1 = left_t - phase * left_0 - Complex64::from_polar(1.0, k * a) * ((iq + k) * h1 + i * h2);

    let right_t = row_transform(&xs[ia..], &field.row(it)[ia..], k);
    let right_0 = row_transform(&xs[ia..], &field.row(0)[ia..], k);
    let r2 = right_t - phase * right_0 - Complex64::from_polar(1.0, -k * a) * ((iq + k) * h1 - i * h2);
    Ok((r1, r2))
}

/// `∫ e^{-ikx} u dx` over the sampled interval: composite Simpson on uniform
/// spacing (with a closing 3/8 panel for an odd interval count), trapezoid otherwise.
pub(crate) fn row_transform(x: &[f64], u: &[Complex64], k: f64) -> Complex64 {
    let n = x.len();
    if n < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let g = |j: usize| u[j] * Complex64::from_polar(1.0, -k * x[j]);
    let h = (x[n - 1] - x[0]) / (n - 1) as f64;
    let uniform = x.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    if !uniform || n < 4 {
        return (1..n).fold(Complex64::new(0.0, 0.0), |acc, j| acc + (g(j) + g(j - 1)) * (0.5 * (x[j] - x[j - 1])));
    }
    let intervals = n - 1;
    let simpson_end = if intervals.is_multiple_of(2) { n - 1 } else { n - 4 };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut j = 0;
    while j + 2 <= simpson_end {
        acc += (g(j) + g(j + 1) * 4.0 + g(j + 2)) * (h / 3.0);
        j += 2;
    }
    if intervals % 2 == 1 {
        let j = n - 4;
        acc += (g(j) + g(j + 1) * 3.0 + g(j + 2) * 3.0 + g(j + 3)) * (3.0 * h / 8.0);
    }
    acc
}

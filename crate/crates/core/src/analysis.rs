//! Long-time decay fits, bound-state extraction and residual diagnostics.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::model::{PotentialParams, SolutionField};
use crate::utm::UtmSolver;
use crate::{invalid, Error, Result};

/// Magnitudes below this make a log fit meaningless.
pub const UNDERFLOW: f64 = 1e-13;
/// Fits worse than this are redone without the earliest fifth of the samples.
pub const TRANSIENT_RMS: f64 = 0.05;

/// Least-squares fit of `ln|u| = c - p ln t`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    /// Samples actually used by the fit.
    pub t_samples: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// `p`, positive for decay.
    pub fitted_exponent: f64,
    /// `c`.
    pub fitted_log_amplitude: f64,
    pub residual_rms: f64,
    /// Leading samples dropped as transient.
    pub discarded: usize,
}

impl DecayFit {
    /// Fits already evaluated samples. Needs at least eight positive times.
    pub fn from_samples(t: &[f64], magnitudes: &[f64]) -> Result<Self> {
        if t.len() != magnitudes.len() {
            return Err(Error::GridMismatch(alloc::format!("{} times, {} magnitudes", t.len(), magnitudes.len())));
        }
        if t.len() < 8 {
            return Err(invalid("n_samples", "a decay fit needs at least 8 samples"));
        }
        if t.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(invalid("t_range", "sample times must be positive"));
        }
        for (&s, &m) in t.iter().zip(magnitudes) {
            if !m.is_finite() {
                return Err(Error::NonFinite(alloc::format!("|u| at t = {s}")));
            }
            if m < UNDERFLOW {
                return Err(Error::Underflow { t: s, magnitude: m });
            }
        }
        let fit = Self::least_squares(t, magnitudes, 0);
        if fit.residual_rms <= TRANSIENT_RMS {
            return Ok(fit);
        }
        let skip = (t.len() as f64 * 0.2).ceil() as usize;
        Ok(Self::least_squares(&t[skip..], &magnitudes[skip..], skip))
    }

    fn least_squares(t: &[f64], m: &[f64], discarded: usize) -> Self {
        let xs: Vec<f64> = t.iter().map(|s| s.ln()).collect();
        let ys: Vec<f64> = m.iter().map(|v| v.ln()).collect();
        let (slope, intercept) = line_fit(&xs, &ys);
        let n = xs.len() as f64;
        let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        Self {
            t_samples: t.to_vec(),
            magnitudes: m.to_vec(),
            fitted_exponent: -slope,
            fitted_log_amplitude: intercept,
            residual_rms: (ss / n).sqrt(),
            discarded,
        }
    }
}

/// `(slope, intercept)` of the least-squares line through the points.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `n` logarithmically spaced times covering `[t0, t1]`.
pub fn log_spaced(t0: f64, t1: f64, n: usize) -> Result<Vec<f64>> {
    if !(t0 > 0.0 && t1 > t0 && t1.is_finite()) {
        return Err(invalid("t_range", "need 0 < t0 < t1"));
    }
    if n < 2 {
        return Err(invalid("n_samples", "need at least two samples"));
    }
    let (l0, l1) = (t0.ln(), t1.ln());
    Ok((0..n).map(|j| (l0 + (l1 - l0) * j as f64 / (n - 1) as f64).exp()).collect())
}

/// Fits the decay of `|u(x, t)|` on `n_samples` log-spaced times in `t_range`.
///
/// The evaluator should already exclude any bound-state term, e.g.
/// [`UtmSolver::dispersive_part`] when `q > 0`.
pub fn fit_decay<F>(mut eval: F, x: f64, t_range: (f64, f64), n_samples: usize) -> Result<DecayFit>
where
    F: FnMut(f64, f64) -> Result<Complex64>,
{
    if n_samples < 8 {
        return Err(invalid("n_samples", "a decay fit needs at least 8 samples"));
    }
    let ts = log_spaced(t_range.0, t_range.1, n_samples)?;
    let mags = ts.iter().map(|&t| eval(x, t).map(|u| u.norm())).collect::<Result<Vec<_>>>()?;
    DecayFit::from_samples(&ts, &mags)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundStateReport {
    pub x_probe: f64,
    /// Mean of `u e^{-iq²t}` over the later half of the samples.
    pub measured_amplitude: Complex64,
    /// `B e^{-q|x-a|}`.
    pub predicted_amplitude: Complex64,
    /// Slope of the unwrapped phase of `u` over the later half.
    pub phase_rate: f64,
    pub predicted_phase_rate: f64,
    /// Largest `|u - bound term|` over the samples.
    pub remainder_max: f64,
    /// Decay of `|u - bound term|`; absent when the remainder underflows.
    pub remainder_envelope: Option<DecayFit>,
}

/// Samples `u(x_probe, t)` log-spaced over `t_range` and separates the bound state
/// from the dispersive remainder.
pub fn bound_state_report(
    solver: &UtmSolver,
    x_probe: f64,
    t_range: (f64, f64),
    n_samples: usize,
) -> Result<BoundStateReport> {
    let ts = log_spaced(t_range.0, t_range.1, n_samples.max(8))?;
    let worker = solver.worker();
    let samples = ts.iter().map(|&t| worker.evaluate(x_probe, t)).collect::<Result<Vec<_>>>()?;
    bound_state_report_from_samples(solver, x_probe, &ts, &samples)
}

/// As [`bound_state_report`] for values `u(x_probe, ts[j])` evaluated elsewhere.
pub fn bound_state_report_from_samples(
    solver: &UtmSolver,
    x_probe: f64,
    ts: &[f64],
    samples: &[Complex64],
) -> Result<BoundStateReport> {
    let q = solver.params().q;
    let bound = *solver.bound_state().ok_or(Error::Domain { what: "bound-state report", q })?;
    if ts.len() != samples.len() || ts.len() < 8 {
        return Err(invalid("n_samples", "need at least 8 samples, one per time"));
    }
    let omega = q * q;
    let late = ts.len() / 2;
    let mut mean = Complex64::new(0.0, 0.0);
    for (&t, &u) in ts[late..].iter().zip(&samples[late..]) {
        mean += u * Complex64::from_polar(1.0, -omega * t);
    }
    mean /= (ts.len() - late) as f64;

    let mut phases = Vec::with_capacity(ts.len() - late);
    for (&t, &u) in ts[late..].iter().zip(&samples[late..]) {
        // unwrap against the expected rotation so coarse sampling still works
        let mut ph = u.arg();
        if let Some(&(tp, pp)) = phases.last() {
            let guess: f64 = pp + omega * (t - tp);
            ph += 2.0 * PI * ((guess - ph) / (2.0 * PI)).round();
        }
        phases.push((t, ph));
    }
    let (px, py): (Vec<f64>, Vec<f64>) = phases.into_iter().unzip();
    let (phase_rate, _) = line_fit(&px, &py);

    let rem: Vec<f64> = ts.iter().zip(samples).map(|(&t, &u)| (u - bound.value(x_probe, t)).norm()).collect();
    let remainder_max = rem.iter().fold(0.0f64, |m, &v| m.max(v));
    let remainder_envelope = match DecayFit::from_samples(ts, &rem) {
        Ok(fit) => Some(fit),
        Err(Error::Underflow { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(BoundStateReport {
        x_probe,
        measured_amplitude: mean,
        predicted_amplitude: bound.coefficient * (-q * (x_probe - bound.a).abs()).exp(),
        phase_rate,
        predicted_phase_rate: omega,
        remainder_max,
        remainder_envelope,
    })
}

/// `|u_x(a+) - u_x(a-) + 2q u(a)|` at a fixed time, with second-order one-sided
/// differences of spacing `step`. `eval` maps `x` to `u(x, t)`.
pub fn jump_residual<F>(mut eval: F, params: &PotentialParams, step: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid("step", "must be positive"));
    }
    let a = params.a;
    let u0 = eval(a)?;
    let right = (-u0 * 3.0 + eval(a + step)? * 4.0 - eval(a + 2.0 * step)?) / (2.0 * step);
    let left = (u0 * 3.0 - eval(a - step)? * 4.0 + eval(a - 2.0 * step)?) / (2.0 * step);
    Ok((right - left + u0 * (2.0 * params.q)).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointError {
    pub t: f64,
    pub x: f64,
    pub value: Complex64,
    pub reference: Complex64,
    pub abs_error: f64,
    /// Pointwise relative error; infinite where the reference vanishes.
    pub rel_error: f64,
}

/// Differences of a field against a reference field on the same grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    pub linf_abs: f64,
    /// `max|f1 - f2| / max|f2|`.
    pub linf_rel: f64,
    /// Root mean square of `|f1 - f2|`.
    pub l2_abs: f64,
    /// `(Σ|f1 - f2|² / Σ|f2|²)^{1/2}`.
    pub l2_rel: f64,
    pub mean_abs: f64,
    /// Mean pointwise relative error over points with a non-zero reference.
    pub mean_rel: f64,
    pub points: Vec<PointError>,
}

/// Compares `f1` against the reference `f2`.
pub fn compare_fields(f1: &SolutionField, f2: &SolutionField) -> Result<ComparisonReport> {
    if f1.grid() != f2.grid() {
        return Err(Error::GridMismatch(alloc::format!(
            "{}x{} grid against {}x{} grid, or different nodes",
            f1.grid().t().len(),
            f1.grid().x().len(),
            f2.grid().t().len(),
            f2.grid().x().len()
        )));
    }
    let grid = f1.grid();
    let mut points = Vec::with_capacity(grid.len());
    let (mut linf, mut peak, mut ss, mut ss_ref, mut sum, mut sum_rel, mut n_rel) =
        (0.0f64, 0.0f64, 0.0, 0.0, 0.0, 0.0, 0usize);
    for (i, (&v, &r)) in f1.values().iter().zip(f2.values()).enumerate() {
        let (t, x) = grid.point(i);
        let d = (v - r).norm();
        let rel = if r.norm() > 0.0 {
            d / r.norm()
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        linf = linf.max(d);
        peak = peak.max(r.norm());
        ss += d * d;
        ss_ref += r.norm_sqr();
        sum += d;
        if rel.is_finite() {
            sum_rel += rel;
            n_rel += 1;
        }
        points.push(PointError { t, x, value: v, reference: r, abs_error: d, rel_error: rel });
    }
    let n = points.len() as f64;
    let ratio = |num: f64, den: f64| {
        if den > 0.0 {
            num / den
        } else if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    Ok(ComparisonReport {
        linf_abs: linf,
        linf_rel: ratio(linf, peak),
        l2_abs: (ss / n).sqrt(),
        l2_rel: ratio(ss.sqrt(), ss_ref.sqrt()),
        mean_abs: sum / n,
        mean_rel: if n_rel > 0 { sum_rel / n_rel as f64 } else { 0.0 },
        points,
    })
}

/// `∫ |u|² dx` over `[lo, hi]` by 16-point Gauss–Legendre on `panels` equal panels
/// per side of `split`, which should be the interaction point.
pub fn mass<F>(mut eval: F, lo: f64, hi: f64, split: f64, panels: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let nodes = mass_nodes(lo, hi, split, panels)?;
    let mut total = 0.0;
    for (x, w) in nodes {
        total += w * eval(x)?.norm_sqr();
    }
    Ok(total)
}

/// Quadrature nodes and weights used by [`mass`].
pub fn mass_nodes(lo: f64, hi: f64, split: f64, panels: usize) -> Result<Vec<(f64, f64)>> {
    if !(lo < hi) || panels == 0 {
        return Err(invalid("x_range", "need lo < hi and at least one panel"));
    }
    let (gx, gw) = crate::special::gauss_legendre(16);
    let mut pieces = Vec::new();
    if split > lo && split < hi {
        pieces.push((lo, split));
        pieces.push((split, hi));
    } else {
        pieces.push((lo, hi));
    }
    let mut out = Vec::new();
    for (a, b) in pieces {
        let width = (b - a) / panels as f64;
        for p in 0..panels {
            let (pa, pb) = (a + p as f64 * width, a + (p + 1) as f64 * width);
            let (mid, half) = (0.5 * (pa + pb), 0.5 * (pb - pa));
            out.extend(gx.iter().zip(&gw).map(|(x, w)| (mid + half * x, half * w)));
        }
    }
    Ok(out)
}

//! Global adaptive panel engine shared by the plain and Filon rules.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use num_complex::Complex64;

use crate::special::{gauss_legendre, legendre_values};
use crate::{Error, Result};

/// Gauss–Legendre rule with the Legendre polynomials tabulated at its nodes,
/// so that panel samples can be turned into Legendre coefficients.
#[derive(Debug, Clone)]
pub(crate) struct GaussRule {
    pub(crate) nodes: Vec<f64>,
    pub(crate) weights: Vec<f64>,
    // legendre[i * n + j] = P_j(nodes[i])
    legendre: Vec<f64>,
}

impl GaussRule {
    pub(crate) fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        let mut legendre = alloc::vec![0.0; n * n];
        for (i, &x) in nodes.iter().enumerate() {
            legendre_values(x, &mut legendre[i * n..(i + 1) * n]);
        }
        Self { nodes, weights, legendre }
    }

    pub(crate) fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Legendre coefficients `a_j` of the degree `n-1` interpolant of `values`.
    pub(crate) fn coefficients(&self, values: &[Complex64], out: &mut [Complex64]) {
        let n = self.len();
        for (j, a) in out.iter_mut().enumerate().take(n) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, v) in values.iter().enumerate().take(n) {
                acc += v * (self.weights[i] * self.legendre[i * n + j]);
            }
            *a = acc * (0.5 * (2 * j + 1) as f64);
        }
    }

    /// Integral over `[lo, hi]` with the usual coefficient-based error estimate.
    pub(crate) fn panel<F>(&self, lo: f64, hi: f64, mut f: F) -> Result<(Complex64, f64)>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let n = self.len();
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut values = [Complex64::new(0.0, 0.0); MAX_NODES];
        let mut sum = Complex64::new(0.0, 0.0);
        for (i, slot) in values.iter_mut().enumerate().take(n) {
            let v = f(mid + half * self.nodes[i])?;
            *slot = v;
            sum += v * self.weights[i];
        }
        let mut coeffs = [Complex64::new(0.0, 0.0); MAX_NODES];
        self.coefficients(&values[..n], &mut coeffs[..n]);
        let err = 2.0 * half * (coeffs[n - 1].norm() + coeffs[n - 2].norm());
        Ok((sum * half, err))
    }
}

/// Largest supported rule size.
pub(crate) const MAX_NODES: usize = 64;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub(crate) lo: f64,
    pub(crate) hi: f64,
    pub(crate) tag: u8,
}

struct Entry {
    err: f64,
    value: Complex64,
    panel: Panel,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome {
    pub(crate) value: Complex64,
    pub(crate) error: f64,
    pub(crate) panels: usize,
}

/// Splits the worst panel until the summed error estimate drops below `tol`.
pub(crate) fn integrate<E>(initial: &[Panel], mut eval: E, tol: f64, max_panels: usize) -> Result<Outcome>
where
    E: FnMut(&Panel) -> Result<(Complex64, f64)>,
{
    let mut heap = BinaryHeap::with_capacity(initial.len() * 2);
    let mut total_err = 0.0;
    for p in initial.iter().filter(|p| p.hi > p.lo) {
        let (value, err) = eval(p)?;
        total_err += err;
        heap.push(Entry { err, value, panel: *p });
    }
    let mut steps = 0usize;
    while total_err > tol {
        let worst = match heap.peek() {
            Some(e) => e,
            None => break,
        };
        let Panel { lo, hi, tag } = worst.panel;
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) || (hi - lo) <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            // cannot be refined further
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::ToleranceNotMet { estimate: total_err, tolerance: tol, panels: heap.len() });
        }
        let worst = heap.pop().expect("peeked entry");
        let left = Panel { lo, hi: mid, tag };
        let right = Panel { lo: mid, hi, tag };
        let (lv, le) = eval(&left)?;
        let (rv, re) = eval(&right)?;
        total_err += le + re - worst.err;
        heap.push(Entry { err: le, value: lv, panel: left });
        heap.push(Entry { err: re, value: rv, panel: right });
        steps += 1;
        if steps.is_multiple_of(256) {
            total_err = heap.iter().map(|e| e.err).sum();
        }
    }
    let total_err: f64 = heap.iter().map(|e| e.err).sum();
    if total_err > tol {
        return Err(Error::ToleranceNotMet { estimate: total_err, tolerance: tol, panels: heap.len() });
    }
    let panels = heap.len();
    let value = heap.into_iter().fold(Complex64::new(0.0, 0.0), |acc, e| acc + e.value);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite(alloc::string::String::from("quadrature sum")));
    }
    Ok(Outcome { value, error: total_err, panels })
}

/// Breakpoints on `[lo, hi]` such that a linear-derivative phase `φ'(k) = slope0 + slope1 k`
/// changes by at most `per_panel` on each panel.
pub(crate) fn phase_partition(lo: f64, hi: f64, slope0: f64, slope1: f64, per_panel: f64, out: &mut Vec<f64>) {
    let rate = |k: f64| (slope0 + slope1 * k).abs().max(1e-300);
    out.push(lo);
    let mut k = lo;
    while k < hi {
        let mut h = per_panel / rate(k);
        h = h.min(per_panel / rate((k + h).min(hi)));
        k = if k + h >= hi { hi } else { k + h };
        out.push(k);
    }
}

/// Sorted, deduplicated breakpoints restricted to `[lo, hi]`.
pub(crate) fn clean_breaks(points: &mut Vec<f64>, lo: f64, hi: f64) {
    points.retain(|p| p.is_finite() && *p >= lo && *p <= hi);
    points.push(lo);
    points.push(hi);
    points.sort_by(|a, b| a.total_cmp(b));
    let scale = (hi - lo).abs().max(1e-300);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * scale);
    if let Some(last) = points.last_mut() {
        *last = hi;
    }
    points[0] = lo;
}

/// Plain adaptive Gauss–Legendre integration of `f` over the given breakpoints.
pub(crate) fn integrate_plain<F>(
    rule: &GaussRule,
    breaks: &[f64],
    mut f: F,
    tol: f64,
    max_panels: usize,
) -> Result<Outcome>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let panels: Vec<Panel> = breaks.windows(2).map(|w| Panel { lo: w[0], hi: w[1], tag: 0 }).collect();
    integrate(&panels, |p| rule.panel(p.lo, p.hi, &mut f), tol, max_panels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn integrates_oscillatory_exponential() {
        let rule = GaussRule::new(16);
        let omega = 40.0;
        let out =
            integrate_plain(&rule, &[0.0, 1.0], |x| Ok(Complex64::new(0.0, omega * x).exp()), 1e-12, 10_000).unwrap();
        let exact = (Complex64::new(0.0, omega).exp() - 1.0) / Complex64::new(0.0, omega);
        assert!((out.value - exact).norm() < 1e-13);
    }

    #[test]
    fn reports_tolerance_failure() {
        let rule = GaussRule::new(8);
        let err = integrate_plain(&rule, &[0.0, 1.0], |x| Ok(Complex64::new(x.sqrt(), 0.0)), 1e-15, 4);
        assert!(matches!(err, Err(Error::ToleranceNotMet { .. })));
    }

    #[test]
    fn phase_partition_respects_budget() {
        let mut out = Vec::new();
        phase_partition(-3.0, 5.0, 2.0, -4.0, PI / 4.0, &mut out);
        for w in out.windows(2) {
            let r = (2.0 - 4.0 * w[0]).abs().max((2.0 - 4.0 * w[1]).abs());
            assert!(r * (w[1] - w[0]) <= PI / 4.0 * (1.0 + 1e-9) || w[1] - w[0] < 1e-9);
        }
        assert_eq!(*out.last().unwrap(), 5.0);
    }
}

//! Half-line Fourier transforms `û0^(1)(k) = ∫_{-∞}^a e^{-iky} u0(y) dy` and
//! `û0^(2)(k) = ∫_a^∞ e^{-iky} u0(y) dy`.
//!
//! Gaussian and exponential kinds have closed forms (through the Faddeeva
//! function for the Gaussians). Sampled profiles are integrated numerically with
//! adaptive Gauss–Legendre panels; those results are memoized by [`HalfTransforms`].

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::model::{InitialProfile, Side};
use crate::quadrature::{integrate_plain, AsymptoticSeries, ORDERS};
use crate::special::gaussian_upper_integral;
use crate::{invalid, Result};

/// Target absolute error of the numerical transforms.
pub const NUMERIC_TOL: f64 = 1e-10;
/// The numerical transforms ignore the profile where `|u0|` is below this.
pub const TRUNCATION: f64 = 1e-14;
const NUMERIC_MAX_PANELS: usize = 50_000;

/// A transform value at a real spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDatum {
    pub k: f64,
    pub value: Complex64,
}

fn check_args(a: f64, k: f64) -> Result<()> {
    if !a.is_finite() {
        return Err(invalid("a", "split point must be finite"));
    }
    if !k.is_finite() {
        return Err(invalid("k", "spectral parameter must be finite"));
    }
    Ok(())
}

/// `∫_{-∞}^{a} e^{-iky} u0(y) dy`.
pub fn half_transform_left(profile: &InitialProfile, a: f64, k: f64) -> Result<Complex64> {
    half_transform(profile, a, k, Side::Left)
}

/// `∫_{a}^{∞} e^{-iky} u0(y) dy`.
pub fn half_transform_right(profile: &InitialProfile, a: f64, k: f64) -> Result<Complex64> {
    half_transform(profile, a, k, Side::Right)
}

/// `û0(k)`, the sum of the two half transforms.
pub fn full_transform(profile: &InitialProfile, k: f64) -> Result<Complex64> {
    let (lo, hi) = profile.support_interval(TRUNCATION);
    let split = 0.5 * (lo + hi);
    Ok(half_transform_left(profile, split, k)? + half_transform_right(profile, split, k)?)
}

/// Half transform on the given side of `a`.
pub fn half_transform(profile: &InitialProfile, a: f64, k: f64, side: Side) -> Result<Complex64> {
    check_args(a, k)?;
    if let Some((odd, c, w, amp)) = profile.gaussian_params() {
        let b = (a - c) / w;
        let kappa = k * w;
        let pre = Complex64::from_polar(amp * w, -k * c);
        let g = match side {
            Side::Right => gaussian_upper_integral(b, kappa),
            Side::Left => gaussian_upper_integral(-b, -kappa),
        };
        if !odd {
            return Ok(pre * g);
        }
        let edge = Complex64::from_polar(0.5 * (-b * b).exp(), -kappa * b);
        let ik2 = Complex64::new(0.0, 0.5 * kappa);
        let v = match side {
            Side::Right => edge - ik2 * g,
            Side::Left => -edge - ik2 * g,
        };
        return Ok(pre * v);
    }
    if let Some((c, r, amp)) = profile.exponential_params() {
        return Ok(match side {
            Side::Right => exponential_right(c, r, amp, a, k),
            // reflection y -> -y maps the left transform onto a right one
            Side::Left => exponential_right(-c, r, amp, -a, -k),
        });
    }
    half_transform_numeric(profile, a, k, side)
}

/// `∫_a^∞ e^{-iky} A e^{-r|y-c|} dy`.
fn exponential_right(c: f64, r: f64, amp: f64, a: f64, k: f64) -> Complex64 {
    let plus = Complex64::new(r, k);
    let at_a = Complex64::from_polar(amp, -k * a);
    if a >= c {
        at_a * (-r * (a - c)).exp() / plus
    } else {
        let minus = Complex64::new(r, -k);
        let at_c = Complex64::from_polar(amp, -k * c);
        (at_c - at_a * (-r * (c - a)).exp()) / minus + at_c / plus
    }
}

/// Adaptive Gauss–Legendre evaluation of a half transform, for any kind.
pub fn half_transform_numeric(profile: &InitialProfile, a: f64, k: f64, side: Side) -> Result<Complex64> {
    check_args(a, k)?;
    let (lo, hi) = match side {
        Side::Left => (profile.support_interval(TRUNCATION).0, a),
        Side::Right => (a, profile.support_interval(TRUNCATION).1),
    };
    if hi <= lo {
        return Ok(Complex64::new(0.0, 0.0));
    }
    integrate_profile(profile, lo, hi, |y| Complex64::from_polar(1.0, -k * y), k.abs(), NUMERIC_TOL)
}

/// `∫_lo^hi w(y) u0(y) dy` by adaptive panels, with `u0` evaluated from the
/// side interior to each panel. `freq` bounds the oscillation rate of `w`.
pub(crate) fn integrate_profile<W>(
    profile: &InitialProfile,
    lo: f64,
    hi: f64,
    weight: W,
    freq: f64,
    tol: f64,
) -> Result<Complex64>
where
    W: Fn(f64) -> Complex64,
{
    let mut breaks: Vec<f64> = profile.singular_points();
    if let Some(s) = profile.sampled() {
        breaks.extend_from_slice(s.knots());
    }
    breaks.retain(|p| *p > lo && *p < hi);
    breaks.push(lo);
    breaks.push(hi);
    breaks.sort_by(|x, y| x.total_cmp(y));
    breaks.dedup();
    // keep the oscillation per initial panel near one period
    let mut refined = Vec::with_capacity(breaks.len());
    for w in breaks.windows(2) {
        let pieces = ((w[1] - w[0]) * freq / (2.0 * PI)).ceil().clamp(1.0, 1e5) as usize;
        for j in 0..pieces {
            refined.push(w[0] + (w[1] - w[0]) * j as f64 / pieces as f64);
        }
    }
    refined.push(hi);
    let rule = crate::quadrature::gauss_rule(16);
    let f = |y: f64| Ok(weight(y) * profile.evaluate(y));
    Ok(integrate_plain(&rule, &refined, f, tol, NUMERIC_MAX_PANELS)?.value)
}

/// Large-`|k|` expansion of a half transform from the one-sided jets of `u0`
/// at `a` and at the profile's own singular points.
pub fn half_transform_series(profile: &InitialProfile, a: f64, side: Side) -> AsymptoticSeries {
    let mut series = AsymptoticSeries::new();
    // jump Δ_n = u^(n)(p-) - u^(n)(p+) contributes e^{-ikp} (-1)^n i^{n+1} Δ_n / k^{n+1}
    let mut add = |p: f64, delta: [Complex64; 4]| {
        let mut c = [Complex64::new(0.0, 0.0); ORDERS];
        let mut factor = Complex64::i();
        for n in 0..4 {
            c[n + 1] = factor * delta[n];
            factor *= -Complex64::i();
        }
        series.push(p, c);
    };
    match side {
        Side::Left => add(a, profile.jet(a, Side::Left)),
        Side::Right => add(a, profile.jet(a, Side::Right).map(|v| -v)),
    }
    for p in profile.singular_points() {
        let inside = match side {
            Side::Left => p < a,
            Side::Right => p > a,
        };
        if inside {
            let l = profile.jet(p, Side::Left);
            let r = profile.jet(p, Side::Right);
            add(p, [l[0] - r[0], l[1] - r[1], l[2] - r[2], l[3] - r[3]]);
        }
    }
    series
}

/// Both half transforms about a fixed `a`, memoized per `k` when computed numerically.
///
/// The cache uses interior mutability and is meant to be owned by one worker.
#[derive(Debug)]
pub struct HalfTransforms<'p> {
    profile: &'p InitialProfile,
    a: f64,
    real: bool,
    cache: Option<RefCell<BTreeMap<u64, (Complex64, Complex64)>>>,
}

impl<'p> HalfTransforms<'p> {
    pub fn new(profile: &'p InitialProfile, a: f64) -> Self {
        let cache = (!profile.has_analytic_transforms()).then(|| RefCell::new(BTreeMap::new()));
        Self { profile, a, real: profile.is_real(), cache }
    }

    pub fn profile(&self) -> &'p InitialProfile {
        self.profile
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `(û0^(1)(k), û0^(2)(k))`.
    pub fn pair(&self, k: f64) -> Result<(Complex64, Complex64)> {
        let Some(cache) = &self.cache else {
            return Ok((half_transform_left(self.profile, self.a, k)?, half_transform_right(self.profile, self.a, k)?));
        };
        let key = k.to_bits();
        if let Some(v) = cache.borrow().get(&key) {
            return Ok(*v);
        }
        let v = (half_transform_left(self.profile, self.a, k)?, half_transform_right(self.profile, self.a, k)?);
        cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    /// `(û0^(1)(k), û0^(2)(k), û0^(1)(-k), û0^(2)(-k))`, using conjugation symmetry for real data.
    pub fn quad(&self, k: f64) -> Result<[Complex64; 4]> {
        let (l, r) = self.pair(k)?;
        let (lm, rm) = if self.real { (l.conj(), r.conj()) } else { self.pair(-k)? };
        Ok([l, r, lm, rm])
    }

    /// Number of memoized entries.
    pub fn cached(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.borrow().len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(v: Complex64, re: f64, im: f64, tol: f64) {
        let e = Complex64::new(re, im);
        assert!((v - e).norm() <= tol, "{v} vs {e}");
    }

    #[test]
    fn gaussian_examples() {
        let g = InitialProfile::gaussian(0.0, 1.0, 1.0).unwrap();
        let sqrt_pi = PI.sqrt();
        close(half_transform_left(&g, 0.0, 0.0).unwrap(), 0.5 * sqrt_pi, 0.0, 1e-15);
        close(half_transform_right(&g, 0.0, 0.0).unwrap(), 0.5 * sqrt_pi, 0.0, 1e-15);
        close(half_transform_left(&g, 40.0, 0.0).unwrap(), sqrt_pi, 0.0, 1e-15);
        let full = half_transform_left(&g, 0.3, 1.0).unwrap() + half_transform_right(&g, 0.3, 1.0).unwrap();
        close(full, 1.380_388_447_043_143, 0.0, 1e-14);
        close(full_transform(&g, 0.0).unwrap(), sqrt_pi, 0.0, 1e-14);
    }

    // Reference values from mpmath quadrature.
    #[test]
    fn gaussian_matches_reference_values() {
        let cases: [(f64, f64, f64, f64, f64, [f64; 4]); 5] = [
            (
                0.0,
                1.0,
                1.0,
                0.0,
                2.0,
                [0.326_024_666_086_646_1, 0.538_079_506_912_768_4, 0.326_024_666_086_646_1, -0.538_079_506_912_768_4],
            ),
            (
                0.0,
                1.0,
                1.0,
                0.7,
                3.3,
                [0.29529884395294728, -0.03256636578805787, -0.17883041712680616, 0.03256636578805787],
            ),
            (
                0.4,
                1.5,
                2.0,
                -0.3,
                -1.7,
                [0.10732074598547121, -0.944_508_346_430_783_5, 0.706_328_523_443_499_2, 1.6024750835309583],
            ),
            (0.0, 1.0, 1.0, 0.0, 25.0, [0.0, 0.040129248914351473, 0.0, -0.040129248914351473]),
            (
                -1.0,
                0.5,
                1.0,
                1.2,
                8.0,
                [-0.002_361_729_078_250_009, 0.016_059_077_285_908_31, -1.6600464425135272e-10, 1.1037902358108598e-10],
            ),
        ];
        for (c, w, amp, a, k, v) in cases {
            let g = InitialProfile::gaussian(c, w, amp).unwrap();
            close(half_transform_left(&g, a, k).unwrap(), v[0], v[1], 1e-13);
            close(half_transform_right(&g, a, k).unwrap(), v[2], v[3], 1e-13);
        }
    }

    #[test]
    fn odd_gaussian_matches_reference_values() {
        let g = InitialProfile::odd_gaussian(0.0, 1.0, 1.0).unwrap();
        close(half_transform_left(&g, 0.0, 1.5).unwrap(), -0.10774042419161131, -0.378_717_660_702_805_2, 1e-13);
        close(half_transform_right(&g, 0.0, 1.5).unwrap(), 0.10774042419161131, -0.378_717_660_702_805_2, 1e-13);
        let g = InitialProfile::odd_gaussian(0.3, 0.8, 1.5).unwrap();
        close(half_transform_left(&g, 0.1, -2.2).unwrap(), -0.25431725715791351, 0.335_560_924_633_838_7, 1e-13);
        close(half_transform_right(&g, 0.1, -2.2).unwrap(), -0.274_693_448_451_339_5, 0.346_061_748_866_509_9, 1e-13);
    }

    #[test]
    fn exponential_examples() {
        let e = InitialProfile::two_sided_exponential(0.0, 1.0, 1.0).unwrap();
        close(half_transform_right(&e, 0.0, 1.0).unwrap(), 0.5, -0.5, 1e-15);
        close(full_transform(&e, 0.0).unwrap(), 2.0, 0.0, 1e-14);
    }

    #[test]
    fn closed_forms_match_numeric_path() {
        let profiles = [
            InitialProfile::gaussian(0.2, 0.9, 1.3).unwrap(),
            InitialProfile::odd_gaussian(-0.3, 1.1, 0.7).unwrap(),
            InitialProfile::two_sided_exponential(0.4, 1.7, 1.2).unwrap(),
            InitialProfile::bound_state(1.5, -0.2).unwrap(),
        ];
        for p in &profiles {
            for &a in &[-0.8, 0.4, 1.1] {
                for &k in &[-7.0, -0.5, 0.0, 2.0, 30.0] {
                    for side in [Side::Left, Side::Right] {
                        let exact = half_transform(p, a, k, side).unwrap();
                        let num = half_transform_numeric(p, a, k, side).unwrap();
                        assert!((exact - num).norm() < 1e-9, "{:?} a={a} k={k} {side:?}", p.spec());
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_profile_uses_numeric_path_and_cache() {
        let x: Vec<f64> = (0..401).map(|i| -8.0 + 0.04 * i as f64).collect();
        let re: Vec<f64> = x.iter().map(|v| (-v * v).exp()).collect();
        let p = InitialProfile::custom_sampled(x, re, vec![]).unwrap();
        let g = InitialProfile::gaussian(0.0, 1.0, 1.0).unwrap();
        for &k in &[0.0, 1.0, 3.0] {
            let s = half_transform_right(&p, 0.25, k).unwrap();
            let e = half_transform_right(&g, 0.25, k).unwrap();
            assert!((s - e).norm() < 1e-5);
        }
        let h = HalfTransforms::new(&p, 0.0);
        let a = h.pair(1.5).unwrap();
        let b = h.pair(1.5).unwrap();
        assert_eq!(a, b);
        assert_eq!(h.cached(), 1);
        assert_eq!(HalfTransforms::new(&g, 0.0).cached(), 0);
    }

    #[test]
    fn split_point_independence() {
        let g = InitialProfile::gaussian(0.1, 1.0, 1.0).unwrap();
        let k = 1.7;
        let s1 = half_transform_left(&g, -0.5, k).unwrap() + half_transform_right(&g, -0.5, k).unwrap();
        let s2 = half_transform_left(&g, 0.9, k).unwrap() + half_transform_right(&g, 0.9, k).unwrap();
        assert!((s1 - s2).norm() < 1e-10);
    }

    #[test]
    fn series_matches_transforms_at_large_k() {
        let profiles = [
            InitialProfile::gaussian(0.2, 0.9, 1.3).unwrap(),
            InitialProfile::two_sided_exponential(0.4, 1.7, 1.2).unwrap(),
            InitialProfile::odd_gaussian(0.0, 1.0, 1.0).unwrap(),
        ];
        for p in &profiles {
            for side in [Side::Left, Side::Right] {
                let s = half_transform_series(p, 0.1, side);
                for &k in &[300.0, -450.0] {
                    let v = half_transform(p, 0.1, k, side).unwrap();
                    let e = s.eval(k);
                    // first neglected order is k^{-5}
                    assert!((v - e).norm() < 50.0 / k.abs().powi(5), "{:?} {side:?} k={k}", p.spec());
                }
            }
        }
    }
}

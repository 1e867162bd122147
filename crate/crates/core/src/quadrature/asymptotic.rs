//! Large-`|k|` expansions of spectral integrands and the exact oscillatory
//! integrals of their terms beyond the truncation radius.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::adaptive::{integrate_plain, phase_partition, GaussRule};
use crate::{Error, Result};

/// Number of orders `k^0 … k^{-(ORDERS-1)}` kept in an expansion.
pub const ORDERS: usize = 5;

/// One group `e^{-ikp} Σ_n c_n k^{-n}` of an expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTerm {
    pub shift: f64,
    pub coeffs: [Complex64; ORDERS],
}

/// Expansion `f(k) ~ Σ_j e^{-ik p_j} Σ_n c_{jn} k^{-n}` as `|k| → ∞`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AsymptoticSeries {
    terms: Vec<SeriesTerm>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl AsymptoticSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[SeriesTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds a group, merging with an existing group at the same shift.
    pub fn push(&mut self, shift: f64, coeffs: [Complex64; ORDERS]) {
        if coeffs.iter().all(|c| *c == ZERO) {
            return;
        }
        if let Some(t) = self.terms.iter_mut().find(|t| t.shift == shift) {
            for (a, b) in t.coeffs.iter_mut().zip(coeffs) {
                *a += b;
            }
        } else {
            self.terms.push(SeriesTerm { shift, coeffs });
        }
    }

    pub fn add(&mut self, other: &Self) {
        for t in &other.terms {
            self.push(t.shift, t.coeffs);
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = Self::new();
        for t in &self.terms {
            out.push(t.shift, t.coeffs.map(|c| c * s));
        }
        out
    }

    /// Expansion of `f(-k)`.
    pub fn reflected(&self) -> Self {
        let mut out = Self::new();
        for t in &self.terms {
            let mut c = t.coeffs;
            for (n, v) in c.iter_mut().enumerate() {
                if n % 2 == 1 {
                    *v = -*v;
                }
            }
            out.push(-t.shift, c);
        }
        out
    }

    /// Expansion of `e^{-iks} f(k)`.
    pub fn modulated(&self, s: f64) -> Self {
        let mut out = Self::new();
        for t in &self.terms {
            out.push(t.shift + s, t.coeffs);
        }
        out
    }

    /// Expansion of `k^{-lead} f(k) / (1 + β/k)`, i.e. `f(k) k^{1-lead} / (k + β)`.
    pub fn times_geometric(&self, beta: Complex64, lead: usize) -> Self {
        let mut out = Self::new();
        for t in &self.terms {
            let mut c = [ZERO; ORDERS];
            for (n, &cn) in t.coeffs.iter().enumerate() {
                let mut factor = Complex64::new(1.0, 0.0);
                let mut m = 0;
                while n + lead + m < ORDERS {
                    c[n + lead + m] += cn * factor;
                    factor *= -beta;
                    m += 1;
                }
            }
            out.push(t.shift, c);
        }
        out
    }

    pub fn eval(&self, k: f64) -> Complex64 {
        let inv = 1.0 / k;
        self.terms.iter().fold(ZERO, |acc, t| {
            let mut poly = ZERO;
            for c in t.coeffs.iter().rev() {
                poly = poly * inv + c;
            }
            acc + poly * Complex64::from_polar(1.0, -k * t.shift)
        })
    }

    /// Largest `|c_0|`; a nonzero value means the integrand does not decay.
    pub fn constant_magnitude(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.coeffs[0].norm()))
    }

    /// Largest coefficient magnitude, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.terms.iter().flat_map(|t| t.coeffs.iter()).fold(0.0, |m, c| m.max(c.norm()))
    }

    /// `∫_{|k|>K} e^{ikx - ik²t} f_series(k) dk` (no `1/2π`).
    pub(crate) fn tail_integral(&self, k_cut: f64, x: f64, t: f64, rule: &GaussRule) -> Result<Complex64> {
        let mut acc = ZERO;
        for term in &self.terms {
            for (n, &c) in term.coeffs.iter().enumerate().skip(1) {
                if c != ZERO {
                    acc += c * two_sided_tail_with(k_cut, x - term.shift, t, n, rule)?;
                }
            }
        }
        Ok(acc)
    }
}

/// `∫_K^∞ e^{ikX - ik²t} k^{-n} dk + ∫_{-∞}^{-K} (same)` for `n ≥ 1`, `t ≥ 0`.
pub fn two_sided_tail(k_cut: f64, x: f64, t: f64, n: usize) -> Result<Complex64> {
    two_sided_tail_with(k_cut, x, t, n, &GaussRule::new(16))
}

pub(crate) fn two_sided_tail_with(k_cut: f64, x: f64, t: f64, n: usize, rule: &GaussRule) -> Result<Complex64> {
    if t == 0.0 {
        return two_sided_tail_static(k_cut, x, n, rule);
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(ray(k_cut, x, t, n, rule)? + ray(k_cut, -x, t, n, rule)? * sign)
}

fn two_sided_tail_static(k_cut: f64, x: f64, n: usize, rule: &GaussRule) -> Result<Complex64> {
    let z = k_cut * x;
    let scale = k_cut.powi(1 - n as i32);
    if z.abs() <= 4.0 {
        let (c, s) = cos_sin_tails(z, n);
        return Ok(if n.is_multiple_of(2) {
            Complex64::new(2.0 * scale * c, 0.0)
        } else {
            Complex64::new(0.0, 2.0 * scale * s)
        });
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(ray_static(k_cut, x, n, rule)? + ray_static(k_cut, -x, n, rule)? * sign)
}

/// `(∫_1^∞ cos(zu) u^{-n} du, ∫_1^∞ sin(zu) u^{-n} du)`, by upward recursion from
/// the sine and cosine integrals; intended for moderate `|z|`.
fn cos_sin_tails(z: f64, n: usize) -> (f64, f64) {
    if z == 0.0 {
        return if n >= 2 { (1.0 / (n - 1) as f64, 0.0) } else { (f64::INFINITY, 0.0) };
    }
    let (si, ci) = sine_cosine_integrals(z.abs());
    let mut c = -ci;
    let mut s = z.signum() * (FRAC_PI_2 - si);
    let (sz, cz) = z.sin_cos();
    for m in 2..=n {
        let d = (m - 1) as f64;
        let c_next = cz / d - z / d * s;
        let s_next = sz / d + z / d * c;
        c = c_next;
        s = s_next;
    }
    (c, s)
}

/// `(Si(z), Ci(z))` by their power series, for `0 < z ≤ 4`.
fn sine_cosine_integrals(z: f64) -> (f64, f64) {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let z2 = z * z;
    let mut si = 0.0;
    let mut term = z; // (-1)^m z^{2m+1}/(2m+1)!
    let mut m = 0usize;
    loop {
        let add = term / (2 * m + 1) as f64;
        si += add;
        if add.abs() < 1e-18 * si.abs() {
            break;
        }
        m += 1;
        term *= -z2 / ((2 * m) as f64 * (2 * m + 1) as f64);
    }
    let mut ci = EULER_GAMMA + z.ln();
    let mut term = 1.0; // (-1)^m z^{2m}/(2m)!
    let mut m = 0usize;
    loop {
        m += 1;
        term *= -z2 / ((2 * m - 1) as f64 * (2 * m) as f64);
        let add = term / (2 * m) as f64;
        ci += add;
        if add.abs() < 1e-18 * ci.abs().max(1e-300) {
            break;
        }
    }
    (si, ci)
}

/// `∫_K^∞ e^{ikX} k^{-n} dk` for `|KX| > 0`, rotating into the half plane where `e^{ikX}` decays.
fn ray_static(k_cut: f64, x: f64, n: usize, rule: &GaussRule) -> Result<Complex64> {
    let dir = Complex64::new(0.0, x.signum());
    let reach = 40.0 / x.abs();
    let mag = k_cut.powi(-(n as i32)) / x.abs();
    let f = |r: f64| {
        let k = k_cut + dir * r;
        Ok((-r * x.abs()).exp() * k.powi(-(n as i32)) * dir)
    };
    let breaks = geometric_breaks(reach, 1.0 / x.abs());
    Ok(integrate_plain(rule, &breaks, f, 1e-11 * mag, 20_000)?.value * Complex64::from_polar(1.0, k_cut * x))
}

/// `∫_K^∞ e^{i(kX - k²t)} k^{-n} dk` for `t > 0`.
///
/// The path is rotated to `k = K' - ir`, along which the integrand decays like
/// `e^{-(2K't - X) r}`. If the stationary point `X/2t` lies beyond `K`, the real
/// segment `[K, K']` past it is integrated first.
pub(crate) fn ray(k_cut: f64, x: f64, t: f64, n: usize, rule: &GaussRule) -> Result<Complex64> {
    let rho_min = t.sqrt().max(0.05);
    let mut start = k_cut;
    let mut acc = ZERO;
    // e^{i(kX - k²t)} k^{-n} at k = k0 + z, with the constant phase of k0 split off
    let kernel = |k0: f64, z: Complex64| {
        let local = z * (x - 2.0 * k0 * t) - z * z * t;
        (Complex64::i() * local).exp() * (k0 + z).powi(-(n as i32))
    };
    let base = |k0: f64| Complex64::from_polar(1.0, k0 * x - k0 * k0 * t);
    if 2.0 * k_cut * t - x < rho_min {
        let k_far = (x + rho_min) / (2.0 * t);
        if k_far > 1e7 {
            return Err(Error::StationaryPointOutOfRange { k: x / (2.0 * t) });
        }
        let mut breaks = Vec::new();
        phase_partition(0.0, k_far - k_cut, x - 2.0 * k_cut * t, -2.0 * t, 2.0 * PI, &mut breaks);
        let mag = k_cut.powi(-(n as i32)) * (k_far - k_cut);
        let real = integrate_plain(rule, &breaks, |z| Ok(kernel(k_cut, Complex64::new(z, 0.0))), 1e-11 * mag, 200_000)?;
        acc += real.value * base(k_cut);
        start = k_far;
    }
    let rho = 2.0 * start * t - x;
    let reach = 40.0 / rho;
    let mag = start.powi(-(n as i32)) / rho;
    let f = |r: f64| Ok(kernel(start, Complex64::new(0.0, -r)) * Complex64::new(0.0, -1.0));
    let breaks = geometric_breaks(reach, 1.0 / rho);
    acc += integrate_plain(rule, &breaks, f, 1e-11 * mag, 20_000)?.value * base(start);
    Ok(acc)
}

fn geometric_breaks(reach: f64, first: f64) -> Vec<f64> {
    let mut out = alloc::vec![0.0];
    let mut r = first.min(reach);
    while r < reach {
        out.push(r);
        r *= 2.0;
    }
    out.push(reach);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule() -> GaussRule {
        GaussRule::new(16)
    }

    fn close(a: Complex64, re: f64, im: f64, tol: f64) {
        let b = Complex64::new(re, im);
        assert!((a - b).norm() <= tol * b.norm(), "{a} vs {b}");
    }

    // Reference values from mpmath quadrature.
    #[test]
    fn ray_matches_reference_values() {
        let r = rule();
        close(ray(20.0, 1.0, 0.1, 2, &r).unwrap(), -0.000_738_150_211_535_004_3, -0.00038000615128071664, 1e-10);
        close(ray(20.0, -3.0, 0.1, 3, &r).unwrap(), 9.426_062_209_994_855e-6, -1.5154071372306071e-5, 1e-10);
        close(ray(200.0, 1.0, 0.5, 2, &r).unwrap(), -1.2483785763698304e-7, 1.4069073427103572e-8, 1e-9);
        close(ray_static(50.0, 0.5, 2, &r).unwrap(), 0.00016716833980182366, 0.000_777_263_587_895_834_9, 1e-10);
        close(ray_static(50.0, -2.0, 1, &r).unwrap(), 0.005_148_825_142_610_492, -0.008_570_859_905_840_326, 1e-10);
    }

    #[test]
    fn static_tail_series_matches_rotation() {
        let r = rule();
        for n in 1..5 {
            for &x in &[0.05, -0.07] {
                let k = 50.0;
                let (c, s) = cos_sin_tails(k * x, n);
                let series = Complex64::new(c, s) * k.powi(1 - n as i32);
                let rotated = ray_static(k, x, n, &r).unwrap();
                assert!((series - rotated).norm() < 1e-12 * rotated.norm(), "n={n} x={x}");
            }
        }
        // closed form at X = 0
        let v = two_sided_tail(10.0, 0.0, 0.0, 2).unwrap();
        assert!((v.re - 0.2).abs() < 1e-15 && v.im == 0.0);
        assert_eq!(two_sided_tail(10.0, 0.0, 0.0, 1).unwrap(), ZERO);
    }

    #[test]
    fn ray_crosses_distant_stationary_point() {
        let r = rule();
        // stationary point at k = 250 beyond the cut at 100; compare with a long real-line sum
        let (k_cut, x, t, n) = (100.0, 50.0, 0.1, 2);
        let v = ray(k_cut, x, t, n, &r).unwrap();
        let mut breaks = Vec::new();
        phase_partition(k_cut, 400.0, x, -2.0 * t, 1.0, &mut breaks);
        let head = integrate_plain(
            &r,
            &breaks,
            |k| Ok((Complex64::i() * (k * x - k * k * t)).exp() / (k * k)),
            1e-13,
            100_000,
        )
        .unwrap()
        .value;
        let rest = ray(400.0, x, t, n, &r).unwrap();
        assert!((v - head - rest).norm() < 1e-11 * v.norm());
    }

    #[test]
    fn series_operations() {
        let mut s = AsymptoticSeries::new();
        let mut c = [ZERO; ORDERS];
        c[1] = Complex64::new(1.0, 0.5);
        c[2] = Complex64::new(-0.3, 2.0);
        s.push(0.7, c);
        let k = 370.0;
        let beta = Complex64::new(0.0, 1.3);
        let g = s.times_geometric(beta, 1);
        let exact = s.eval(k) / (k + beta);
        assert!((g.eval(k) - exact).norm() < 1e-6 * exact.norm());
        assert!((s.reflected().eval(k) - s.eval(-k)).norm() < 1e-15);
        let m = s.modulated(0.4);
        assert!((m.eval(k) - s.eval(k) * Complex64::from_polar(1.0, -0.4 * k)).norm() < 1e-14);
        assert_eq!(s.constant_magnitude(), 0.0);
    }
}

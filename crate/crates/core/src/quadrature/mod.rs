//! Oscillatory spectral integrals `(1/2π) ∫ e^{ikx - ik²t} f(k) dk`.
//!
//! The integral over `[-k_max, k_max]` is computed by adaptive panels, either
//! directly in `k` or, for large `t k_max²`, in the shifted variable
//! `l = k - x/(2t)` with a Filon rule in `s = l²` away from the stationary point.
//! Beyond `k_max` the integrand is replaced by its large-`|k|` expansion, whose
//! terms are integrated exactly along rotated rays; what the expansion misses is
//! bounded by [`tail_bound`].

mod adaptive;
mod asymptotic;
mod filon;

pub use asymptotic::{two_sided_tail, AsymptoticSeries, SeriesTerm, ORDERS};

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use adaptive::{clean_breaks, integrate, phase_partition, GaussRule, Panel};
use filon::filon_panel;

use crate::{invalid, Error, Result};

pub(crate) use adaptive::integrate_plain;

pub(crate) fn gauss_rule(n: usize) -> GaussRule {
    GaussRule::new(n)
}

/// Above this value of `t k_max²` the shifted Filon path is used.
const FILON_SWITCH: f64 = 1.0e3;

/// Which evaluation path [`oscillatory_integral`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PathChoice {
    #[default]
    Auto,
    Direct,
    Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct QuadratureConfig {
    /// Truncation radius of the numerical integral.
    pub k_max: f64,
    /// Gauss nodes per panel.
    pub base_nodes: usize,
    /// Absolute tolerance on the result (after the `1/2π`).
    pub abs_tol: f64,
    /// Times above this always use the shifted path.
    pub large_t_threshold: f64,
    /// Budget for the part of the tail beyond `k_max` not captured by the expansion.
    pub tail_tol: f64,
    /// Panel budget of the adaptive engine.
    pub max_panels: usize,
    pub path: PathChoice,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            k_max: 200.0,
            base_nodes: 16,
            abs_tol: 1e-8,
            large_t_threshold: 5.0,
            tail_tol: 1e-6,
            max_panels: 200_000,
            path: PathChoice::Auto,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_max.is_finite() && self.k_max > 0.0) {
            return Err(invalid("k_max", "must be finite and positive"));
        }
        if !(8..=adaptive::MAX_NODES).contains(&self.base_nodes) {
            return Err(invalid("base_nodes", alloc::format!("must lie in 8..={}", adaptive::MAX_NODES)));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(invalid("abs_tol", "must be finite and positive"));
        }
        if !(self.large_t_threshold.is_finite() && self.large_t_threshold > 0.0) {
            return Err(invalid("large_t_threshold", "must be finite and positive"));
        }
        if !(self.tail_tol.is_finite() && self.tail_tol > 0.0) {
            return Err(invalid("tail_tol", "must be finite and positive"));
        }
        if self.max_panels < 16 {
            return Err(invalid("max_panels", "must be at least 16"));
        }
        Ok(())
    }

    fn uses_shifted_path(&self, t: f64) -> bool {
        match self.path {
            PathChoice::Direct => false,
            PathChoice::Shifted => t > 0.0,
            PathChoice::Auto => t > self.large_t_threshold || t * self.k_max * self.k_max > FILON_SWITCH,
        }
    }
}

/// A localized feature of an integrand (for instance a nearby pole at
/// `center ± i·scale`) around which panels are graded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub center: f64,
    pub scale: f64,
}

/// A spectral function `f(k)` on the real line.
pub trait SpectralIntegrand {
    fn eval(&self, k: f64) -> Result<Complex64>;

    /// Large-`|k|` expansion; empty when unknown.
    fn asymptotics(&self) -> AsymptoticSeries {
        AsymptoticSeries::new()
    }

    fn features(&self) -> Vec<Feature> {
        Vec::new()
    }

    /// A point `c` such that `e^{ikc} f(k)` oscillates slowly.
    fn phase_center(&self) -> f64 {
        0.0
    }
}

impl<F: Fn(f64) -> Complex64> SpectralIntegrand for F {
    fn eval(&self, k: f64) -> Result<Complex64> {
        Ok(self(k))
    }
}

/// Integrand data that does not depend on `(x, t)`: the expansion used beyond
/// `k_max` and the certified bound on what it leaves out.
#[derive(Debug, Clone, PartialEq)]
pub struct TailModel {
    pub series: AsymptoticSeries,
    /// `(1/2π) × (tail_bound of the residual on both sides)`.
    pub residual_bound: f64,
    pub features: Vec<Feature>,
    pub phase_center: f64,
}

impl TailModel {
    /// Builds and certifies the tail model of `f`.
    pub fn new<I: SpectralIntegrand + ?Sized>(f: &I, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        let series = f.asymptotics();
        let c0 = series.constant_magnitude();
        if c0 > 1e-12 * series.scale().max(1.0) {
            return Err(Error::NonDecaying { magnitude: c0 });
        }
        let k = cfg.k_max;
        let mut err = None;
        let mut residual = |kk: f64| match f.eval(kk) {
            Ok(v) => v - series.eval(kk),
            Err(e) => {
                err.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        };
        let right = tail_bound(&mut residual, k);
        let left = tail_bound(|kk| residual(-kk), k);
        if let Some(e) = err {
            return Err(e);
        }
        let residual_bound = (right + left) / (2.0 * PI);
        if !(residual_bound <= cfg.tail_tol) {
            return Err(Error::TailBound { k_max: k, estimate: residual_bound, budget: cfg.tail_tol });
        }
        Ok(Self { series, residual_bound, features: f.features(), phase_center: f.phase_center() })
    }
}

/// `C / k_max` with `C` the largest sampled `|f(k)| k²` on `[k_max, 2 k_max]`:
/// an estimate of `∫_{k_max}^∞ |f|` under a `1/k²` envelope.
pub fn tail_bound<F: FnMut(f64) -> Complex64>(mut f: F, k_max: f64) -> f64 {
    const SAMPLES: usize = 129;
    let mut c = 0.0f64;
    for i in 0..SAMPLES {
        let k = k_max * (1.0 + i as f64 / (SAMPLES - 1) as f64);
        let v = f(k).norm() * k * k;
        c = if v.is_nan() { f64::INFINITY } else { c.max(v) };
    }
    c / k_max
}

/// Path taken by an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadraturePath {
    Direct,
    Shifted,
}

/// Result of an evaluation with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureReport {
    pub value: Complex64,
    /// Estimated error of the panel sum (after `1/2π`).
    pub error_estimate: f64,
    /// Contribution of the expansion beyond `k_max` (included in `value`).
    pub tail_correction: Complex64,
    /// Bound on the neglected tail residual.
    pub tail_residual: f64,
    pub panels: usize,
    pub path: QuadraturePath,
}

/// `(1/2π) ∫ e^{ikx - ik²t} f(k) dk` to `cfg.abs_tol`.
pub fn oscillatory_integral<I: SpectralIntegrand + ?Sized>(
    f: &I,
    x: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let tail = TailModel::new(f, cfg)?;
    Ok(oscillatory_integral_with(f, &tail, x, t, cfg)?.value)
}

/// As [`oscillatory_integral`] with a tail model built once for many `(x, t)`.
pub fn oscillatory_integral_with<I: SpectralIntegrand + ?Sized>(
    f: &I,
    tail: &TailModel,
    x: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureReport> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", "time must be finite and non-negative"));
    }
    if !x.is_finite() {
        return Err(invalid("x", "must be finite"));
    }
    let rule = GaussRule::new(cfg.base_nodes);
    let tol = PI * cfg.abs_tol; // half of the 2π-scaled budget; the rest covers the tails
    let c = tail.phase_center;
    let xr = x - c;
    let folded = |k: f64| -> Result<Complex64> { Ok(f.eval(k)? * Complex64::from_polar(1.0, k * c)) };

    let (raw, path) = if cfg.uses_shifted_path(t) {
        (shifted(&rule, &folded, tail, xr, t, cfg, tol)?, QuadraturePath::Shifted)
    } else {
        (direct(&rule, &folded, tail, xr, t, cfg, tol)?, QuadraturePath::Direct)
    };
    let ray_rule = GaussRule::new(16);
    let tail_raw = tail.series.tail_integral(cfg.k_max, x, t, &ray_rule)?;
    let scale = 1.0 / (2.0 * PI);
    let value = (raw.value + tail_raw) * scale;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite(alloc::format!("x = {x}, t = {t}")));
    }
    Ok(QuadratureReport {
        value,
        error_estimate: raw.error * scale,
        tail_correction: tail_raw * scale,
        tail_residual: tail.residual_bound,
        panels: raw.panels,
        path,
    })
}

/// Breakpoints graded geometrically towards each feature.
fn feature_points(features: &[Feature], out: &mut Vec<f64>) {
    for f in features {
        out.push(f.center);
        if f.scale > 0.0 {
            let mut d = f.scale;
            while d < 4.0 {
                out.push(f.center - d);
                out.push(f.center + d);
                d *= 4.0;
            }
        }
    }
}

fn direct<F>(
    rule: &GaussRule,
    f: &F,
    tail: &TailModel,
    x: f64,
    t: f64,
    cfg: &QuadratureConfig,
    tol: f64,
) -> Result<adaptive::Outcome>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let k = cfg.k_max;
    let mut points = alloc::vec![0.0];
    feature_points(&tail.features, &mut points);
    if t > 0.1 {
        let ks = x / (2.0 * t);
        let d = (PI / t).sqrt();
        points.extend([ks - d, ks, ks + d]);
    }
    clean_breaks(&mut points, -k, k);
    // e^{ikx} goes into the Filon weight, so panels only need to resolve e^{-ik²t}
    let per_panel = 0.25 * PI * cfg.base_nodes as f64;
    let mut breaks = Vec::new();
    for w in points.windows(2) {
        let mut seg = Vec::new();
        phase_partition(w[0], w[1], 0.0, -2.0 * t, per_panel, &mut seg);
        if breaks.is_empty() {
            breaks.extend(seg);
        } else {
            breaks.extend(seg.into_iter().skip(1));
        }
    }
    let panels: Vec<Panel> = breaks.windows(2).map(|w| Panel { lo: w[0], hi: w[1], tag: 0 }).collect();
    let eval =
        |p: &Panel| filon_panel(rule, p.lo, p.hi, -x, |kk| Ok(f(kk)? * Complex64::from_polar(1.0, -kk * kk * t)));
    integrate(&panels, eval, tol, cfg.max_panels)
}

const CENTRAL: u8 = 0;
const RIGHT: u8 = 1;
const LEFT: u8 = 2;

fn shifted<F>(
    rule: &GaussRule,
    f: &F,
    tail: &TailModel,
    x: f64,
    t: f64,
    cfg: &QuadratureConfig,
    tol: f64,
) -> Result<adaptive::Outcome>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let k = cfg.k_max;
    let ks = x / (2.0 * t);
    let delta = (4.0 * PI / t).sqrt();
    let (l_lo, l_hi) = (-k - ks, k - ks);

    let mut feats = alloc::vec![0.0];
    feature_points(&tail.features, &mut feats);
    let feats_l: Vec<f64> = feats.iter().map(|p| p - ks).collect();

    let mut panels = Vec::new();
    // central window, plain rule in l
    let (c_lo, c_hi) = (l_lo.max(-delta), l_hi.min(delta));
    if c_hi > c_lo {
        let mut pts = feats_l.clone();
        pts.push(0.0);
        clean_breaks(&mut pts, c_lo, c_hi);
        panels.extend(pts.windows(2).map(|w| Panel { lo: w[0], hi: w[1], tag: CENTRAL }));
    }
    // outer regions in s = l², one per side
    let sides = [(RIGHT, l_lo.max(delta), l_hi), (LEFT, (-l_hi).max(delta), -l_lo)];
    for (tag, a, b) in sides {
        if b <= a {
            continue;
        }
        let (s_lo, s_hi) = (a * a, b * b);
        let mut pts = Vec::new();
        let mut s = s_lo;
        while s < s_hi {
            pts.push(s);
            s *= 2.0;
        }
        for &p in &feats_l {
            let l = if tag == RIGHT { p } else { -p };
            if l > 0.0 {
                pts.push(l * l);
            }
        }
        clean_breaks(&mut pts, s_lo, s_hi);
        panels.extend(pts.windows(2).map(|w| Panel { lo: w[0], hi: w[1], tag }));
    }

    let eval = |p: &Panel| -> Result<(Complex64, f64)> {
        match p.tag {
            CENTRAL => rule.panel(p.lo, p.hi, |l| Ok(f(ks + l)? * Complex64::from_polar(1.0, -t * l * l))),
            RIGHT => filon_panel(rule, p.lo, p.hi, t, |s| {
                let r = s.sqrt();
                Ok(f(ks + r)? / (2.0 * r))
            }),
            _ => filon_panel(rule, p.lo, p.hi, t, |s| {
                let r = s.sqrt();
                Ok(f(ks - r)? / (2.0 * r))
            }),
        }
    };
    let out = integrate(&panels, eval, tol, cfg.max_panels)?;
    let phase = Complex64::from_polar(1.0, x * x / (4.0 * t));
    Ok(adaptive::Outcome { value: out.value * phase, ..out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(k: f64) -> Complex64 {
        Complex64::new((-k * k).exp(), 0.0)
    }

    #[test]
    fn gaussian_examples() {
        let cfg = QuadratureConfig::default();
        let v = oscillatory_integral(&gauss, 0.0, 0.0, &cfg).unwrap();
        assert!((v.re - 0.28209479177387814).abs() < 1e-10 && v.im.abs() < 1e-12);
        let v = oscillatory_integral(&gauss, 0.0, 1.0, &cfg).unwrap();
        assert!((v - Complex64::new(0.21915577283383726, -0.090_777_293_380_132_5)).norm() < 1e-9);
        let zero = |_k: f64| Complex64::new(0.0, 0.0);
        assert_eq!(oscillatory_integral(&zero, 1.0, 2.0, &cfg).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gaussian_closed_form_on_both_paths() {
        // (1/2π) ∫ e^{ikx - ik²t - k²} dk = e^{-x²/(4(1+it))} / (2 √(π(1+it)))
        for &(x, t) in &[(0.3, 0.01), (-2.0, 0.5), (4.0, 3.0), (1.0, 7.5), (-30.0, 40.0)] {
            let z = Complex64::new(1.0, t);
            let exact = (-(x * x) / (4.0 * z)).exp() / (2.0 * (PI * z).sqrt());
            for path in [PathChoice::Direct, PathChoice::Shifted] {
                if path == PathChoice::Direct && t > 3.0 {
                    continue;
                }
                let cfg = QuadratureConfig { path, ..Default::default() };
                let v = oscillatory_integral(&gauss, x, t, &cfg).unwrap();
                assert!((v - exact).norm() < 1e-9, "x={x} t={t} {path:?}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn tail_bound_examples() {
        let b = tail_bound(|k| Complex64::new(1.0 / (k * k), 0.0), 100.0);
        assert!((b - 0.01).abs() < 1e-15);
        assert!(tail_bound(gauss, 10.0) < 1e-40);
        let b = tail_bound(|k| Complex64::new(1.0 / (1.0 + k * k), 0.0), 50.0);
        let exact = 2.0 * (FRAC_PI_2_CONST - 50.0f64.atan());
        assert!((b - 0.02).abs() < 1e-4 && b <= exact && 2.0 * b >= exact);
    }

    const FRAC_PI_2_CONST: f64 = core::f64::consts::FRAC_PI_2;

    #[test]
    fn slowly_decaying_integrand_without_expansion_is_rejected() {
        let f = |k: f64| Complex64::new(1.0 / (1.0 + k * k), 0.0);
        let err = oscillatory_integral(&f, 0.0, 0.0, &QuadratureConfig::default()).unwrap_err();
        assert!(matches!(err, Error::TailBound { .. }));
    }

    struct Lorentz;

    impl SpectralIntegrand for Lorentz {
        fn eval(&self, k: f64) -> Result<Complex64> {
            Ok(Complex64::new(1.0 / (1.0 + k * k), 0.0))
        }
        fn asymptotics(&self) -> AsymptoticSeries {
            // 1/(1+k²) = k^{-2} - k^{-4} + …
            let z = Complex64::new(0.0, 0.0);
            let mut s = AsymptoticSeries::new();
            s.push(0.0, [z, z, Complex64::new(1.0, 0.0), z, Complex64::new(-1.0, 0.0)]);
            s
        }
        fn features(&self) -> Vec<Feature> {
            alloc::vec![Feature { center: 0.0, scale: 1.0 }]
        }
    }

    #[test]
    fn expansion_tail_recovers_lorentzian_inverse() {
        // (1/2π) ∫ e^{ikx}/(1+k²) dk = e^{-|x|}/2
        let cfg = QuadratureConfig::default();
        for &x in &[0.0, 0.5, -2.0] {
            let v = oscillatory_integral(&Lorentz, x, 0.0, &cfg).unwrap();
            assert!((v.re - 0.5 * (-x.abs()).exp()).abs() < 1e-9, "x={x}: {v}");
        }
    }

    #[test]
    fn non_decaying_expansion_is_rejected() {
        struct Flat;
        impl SpectralIntegrand for Flat {
            fn eval(&self, _k: f64) -> Result<Complex64> {
                Ok(Complex64::new(1.0, 0.0))
            }
            fn asymptotics(&self) -> AsymptoticSeries {
                let z = Complex64::new(0.0, 0.0);
                let mut s = AsymptoticSeries::new();
                s.push(0.0, [Complex64::new(1.0, 0.0), z, z, z, z]);
                s
            }
        }
        assert!(matches!(
            oscillatory_integral(&Flat, 0.0, 1.0, &QuadratureConfig::default()),
            Err(Error::NonDecaying { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let bad = QuadratureConfig { base_nodes: 4, ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::InvalidParameter { field: "base_nodes", .. })));
    }
}

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::spline::ComplexSpline;
use crate::{invalid, Result};

/// Side of a point from which one-sided limits are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Serializable description of an initial datum.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ProfileSpec {
    /// `A e^{-((x-c)/w)²}`
    Gaussian { center: f64, width: f64, amplitude: f64 },
    /// `A e^{-r|x-c|}`
    TwoSidedExponential { center: f64, rate: f64, amplitude: f64 },
    /// `e^{-q|x-a|}`, the eigenmode of an attractive interaction at `a`.
    BoundState { q: f64, a: f64 },
    /// `A ((x-c)/w) e^{-((x-c)/w)²}`
    OddGaussian { center: f64, width: f64, amplitude: f64 },
    /// Natural cubic spline through `(x, re + i im)`, zero outside `[x_0, x_n]`.
    /// An empty `im` means real samples.
    CustomSampled {
        x: Vec<f64>,
        re: Vec<f64>,
        #[cfg_attr(feature = "serde", serde(default))]
        im: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Gaussian { center: f64, width: f64, amplitude: f64 },
    Exponential { center: f64, rate: f64, amplitude: f64 },
    OddGaussian { center: f64, width: f64, amplitude: f64 },
    Sampled(ComplexSpline),
}

/// An initial datum `u0` with its one-sided derivative jets.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialProfile {
    spec: ProfileSpec,
    shape: Shape,
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, alloc::format!("must be finite and positive, got {v}")))
    }
}

fn finite(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, alloc::format!("must be finite, got {v}")))
    }
}

impl InitialProfile {
    /// Validates the parameters of `spec` and builds the profile.
    pub fn new(spec: ProfileSpec) -> Result<Self> {
        let shape = match &spec {
            &ProfileSpec::Gaussian { center, width, amplitude } => {
                finite("center", center)?;
                positive("width", width)?;
                finite("amplitude", amplitude)?;
                Shape::Gaussian { center, width, amplitude }
            }
            &ProfileSpec::OddGaussian { center, width, amplitude } => {
                finite("center", center)?;
                positive("width", width)?;
                finite("amplitude", amplitude)?;
                Shape::OddGaussian { center, width, amplitude }
            }
            &ProfileSpec::TwoSidedExponential { center, rate, amplitude } => {
                finite("center", center)?;
                positive("rate", rate)?;
                finite("amplitude", amplitude)?;
                Shape::Exponential { center, rate, amplitude }
            }
            &ProfileSpec::BoundState { q, a } => {
                positive("q", q)?;
                finite("a", a)?;
                Shape::Exponential { center: a, rate: q, amplitude: 1.0 }
            }
            ProfileSpec::CustomSampled { x, re, im } => {
                if x.len() < 2 {
                    return Err(invalid("x", "custom profile needs at least two samples"));
                }
                if re.len() != x.len() {
                    return Err(invalid("re", "length differs from x"));
                }
                if !im.is_empty() && im.len() != x.len() {
                    return Err(invalid("im", "length differs from x"));
                }
                if x.iter().chain(re).chain(im).any(|v| !v.is_finite()) {
                    return Err(invalid("x", "samples must be finite"));
                }
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(invalid("x", "sample locations must be strictly increasing"));
                }
                let y = (0..x.len()).map(|i| Complex64::new(re[i], im.get(i).copied().unwrap_or(0.0))).collect();
                Shape::Sampled(ComplexSpline::new(x.clone(), y))
            }
        };
        Ok(Self { spec, shape })
    }

    pub fn gaussian(center: f64, width: f64, amplitude: f64) -> Result<Self> {
        Self::new(ProfileSpec::Gaussian { center, width, amplitude })
    }

    pub fn two_sided_exponential(center: f64, rate: f64, amplitude: f64) -> Result<Self> {
        Self::new(ProfileSpec::TwoSidedExponential { center, rate, amplitude })
    }

    pub fn bound_state(q: f64, a: f64) -> Result<Self> {
        Self::new(ProfileSpec::BoundState { q, a })
    }

    pub fn odd_gaussian(center: f64, width: f64, amplitude: f64) -> Result<Self> {
        Self::new(ProfileSpec::OddGaussian { center, width, amplitude })
    }

    pub fn custom_sampled(x: Vec<f64>, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        Self::new(ProfileSpec::CustomSampled { x, re, im })
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    /// True when `u0` is real-valued, so that `û(-k) = conj(û(k))`.
    pub fn is_real(&self) -> bool {
        match &self.spec {
            ProfileSpec::CustomSampled { im, .. } => im.iter().all(|&v| v == 0.0),
            _ => true,
        }
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        match &self.shape {
            Shape::Exponential { center, rate, amplitude } => {
                Complex64::new(amplitude * (-rate * (x - center).abs()).exp(), 0.0)
            }
            Shape::Sampled(s) => s.jet(x, x > s.lower())[0],
            _ => self.jet(x, Side::Left)[0],
        }
    }

    /// `u0'(x)`; at a kink the mean of the one-sided derivatives.
    pub fn evaluate_derivative(&self, x: f64) -> Complex64 {
        let l = self.jet(x, Side::Left)[1];
        let r = self.jet(x, Side::Right)[1];
        if l == r {
            l
        } else {
            (l + r) * 0.5
        }
    }

    /// One-sided derivatives `u0^{(n)}(x±)` for `n = 0..=3`.
    pub fn jet(&self, x: f64, side: Side) -> [Complex64; 4] {
        let real = |v: [f64; 4]| v.map(|r| Complex64::new(r, 0.0));
        match &self.shape {
            &Shape::Gaussian { center, width, amplitude } => {
                let s = (x - center) / width;
                let e = amplitude * (-s * s).exp();
                let (w1, w2, w3) = (width, width * width, width * width * width);
                real([e, -2.0 * s * e / w1, (4.0 * s * s - 2.0) * e / w2, (12.0 * s - 8.0 * s * s * s) * e / w3])
            }
            &Shape::OddGaussian { center, width, amplitude } => {
                let s = (x - center) / width;
                let e = amplitude * (-s * s).exp();
                let s2 = s * s;
                let (w1, w2, w3) = (width, width * width, width * width * width);
                real([
                    s * e,
                    (1.0 - 2.0 * s2) * e / w1,
                    (4.0 * s2 * s - 6.0 * s) * e / w2,
                    (-8.0 * s2 * s2 + 24.0 * s2 - 6.0) * e / w3,
                ])
            }
            &Shape::Exponential { center, rate, amplitude } => {
                let d = x - center;
                let e = amplitude * (-rate * d.abs()).exp();
                // derivatives of e^{∓r d} on each side
                let left = d < 0.0 || (d == 0.0 && side == Side::Left);
                let r = if left { rate } else { -rate };
                real([e, r * e, r * r * e, r * r * r * e])
            }
            Shape::Sampled(s) => s.jet(x, side == Side::Left),
        }
    }

    /// Points where `u0` or one of its first three derivatives jumps.
    ///
    /// Interior spline knots only carry third-derivative jumps and are left out;
    /// they enter the large-`k` expansion of the transforms at order `k^{-4}` only.
    pub fn singular_points(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Exponential { center, .. } => alloc::vec![*center],
            Shape::Sampled(s) => alloc::vec![s.lower(), s.upper()],
            _ => Vec::new(),
        }
    }

    /// Interval outside of which `|u0| < tol` (for samples: the knot range).
    pub fn support_interval(&self, tol: f64) -> (f64, f64) {
        let tol = tol.max(f64::MIN_POSITIVE);
        match &self.shape {
            &Shape::Gaussian { center, width, amplitude } | &Shape::OddGaussian { center, width, amplitude } => {
                let ratio = (amplitude.abs() / tol).max(1.0);
                // the extra term covers the linear prefactor of the odd kind
                let r = width * (ratio.ln() + 2.0).sqrt();
                (center - r, center + r)
            }
            &Shape::Exponential { center, rate, amplitude } => {
                let ratio = (amplitude.abs() / tol).max(1.0);
                let r = ratio.ln() / rate;
                (center - r, center + r)
            }
            Shape::Sampled(s) => (s.lower(), s.upper()),
        }
    }

    /// Distance from the origin within which the bulk of `u0` lives.
    pub fn support_radius(&self) -> f64 {
        match &self.shape {
            &Shape::Gaussian { center, width, .. } | &Shape::OddGaussian { center, width, .. } => center.abs() + width,
            &Shape::Exponential { center, rate, .. } => center.abs() + 1.0 / rate,
            Shape::Sampled(s) => s.lower().abs().max(s.upper().abs()),
        }
    }

    /// Largest `|u0|`, attained or bounded from the closed form.
    pub fn peak(&self) -> f64 {
        match &self.shape {
            Shape::Gaussian { amplitude, .. } | Shape::Exponential { amplitude, .. } => amplitude.abs(),
            // max of s e^{-s²} is at s = 1/√2
            Shape::OddGaussian { amplitude, .. } => amplitude.abs() * (0.5f64).sqrt() * (-0.5f64).exp(),
            Shape::Sampled(s) => s.max_abs(),
        }
    }

    pub(crate) fn sampled(&self) -> Option<&ComplexSpline> {
        match &self.shape {
            Shape::Sampled(s) => Some(s),
            _ => None,
        }
    }

    /// Whether the kind has closed-form half-line transforms.
    pub fn has_analytic_transforms(&self) -> bool {
        !matches!(self.shape, Shape::Sampled(_))
    }

    pub(crate) fn gaussian_params(&self) -> Option<(bool, f64, f64, f64)> {
        match self.shape {
            Shape::Gaussian { center, width, amplitude } => Some((false, center, width, amplitude)),
            Shape::OddGaussian { center, width, amplitude } => Some((true, center, width, amplitude)),
            _ => None,
        }
    }

    pub(crate) fn exponential_params(&self) -> Option<(f64, f64, f64)> {
        match self.shape {
            Shape::Exponential { center, rate, amplitude } => Some((center, rate, amplitude)),
            _ => None,
        }
    }
}

//! Filon–Legendre panel rule for `∫ g(s) e^{-its} ds` with smooth `g`.

use num_complex::Complex64;

use super::adaptive::{GaussRule, MAX_NODES};
use crate::special::spherical_bessel_j;
use crate::Result;

/// Integrates `g(s) e^{-its}` over `[lo, hi]`: `g` is replaced by its Legendre
/// interpolant on the Gauss nodes and each polynomial is integrated exactly
/// against the exponential, `∫_{-1}^{1} P_j(σ) e^{iωσ} dσ = 2 i^j j_j(ω)`.
pub(crate) fn filon_panel<G>(rule: &GaussRule, lo: f64, hi: f64, t: f64, mut g: G) -> Result<(Complex64, f64)>
where
    G: FnMut(f64) -> Result<Complex64>,
{
    let n = rule.len();
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut values = [Complex64::new(0.0, 0.0); MAX_NODES];
    for (v, &node) in values.iter_mut().zip(&rule.nodes[..n]) {
        *v = g(mid + half * node)?;
    }
    let mut coeffs = [Complex64::new(0.0, 0.0); MAX_NODES];
    rule.coefficients(&values[..n], &mut coeffs[..n]);

    let omega = -t * half;
    let mut bessel = [0.0; 2 * MAX_NODES + 1];
    let m = 2 * n + 1;
    spherical_bessel_j(omega, &mut bessel[..m]);

    let mut sum = Complex64::new(0.0, 0.0);
    let mut i_pow = Complex64::new(1.0, 0.0);
    for (j, c) in coeffs.iter().enumerate().take(n) {
        sum += c * i_pow * (2.0 * bessel[j]);
        i_pow *= Complex64::i();
    }
    let max_moment = bessel[..m].iter().fold(0.0f64, |acc, b| acc.max(2.0 * b.abs()));
    let phase = Complex64::from_polar(half, -t * mid);
    let err = half * (coeffs[n - 1].norm() + coeffs[n - 2].norm()) * max_moment;
    Ok((sum * phase, err))
}

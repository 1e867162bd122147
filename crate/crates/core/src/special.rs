//! Special functions used by the transforms and the quadrature rules.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

// Weideman's rational expansion, N = 36 terms, L = sqrt(N / sqrt 2).
const WEIDEMAN_L: f64 = 5.045_378_491_522_287;
const WEIDEMAN_COEFFS: [f64; 36] = [
    5.3563994898241596e-14,
    -8.046291993603708e-14,
    -3.2388620880973123e-13,
    4.431618285200439e-13,
    2.0980449880972978e-12,
    -2.1170683482393027e-12,
    -1.4312519349833836e-11,
    6.346271847688272e-12,
    9.939318013576688e-11,
    3.1971919451129265e-11,
    -6.634847173398884e-10,
    -9.092238350363812e-10,
    3.773443123698583e-09,
    1.1883887267366118e-08,
    -1.0962277865590496e-08,
    -1.1303157194258477e-07,
    -1.2894842920245868e-07,
    6.741655663822087e-07,
    2.765408665743547e-06,
    1.4187058478742445e-06,
    -2.174118656552708e-05,
    -8.817797141863543e-05,
    -0.00011396630644463269,
    0.0004629031693998175,
    0.0035484447086995613,
    0.013898253763251473,
    0.04105104301657709,
    0.10084293371847967,
    0.2150163632010741,
    0.4073424189503343,
    0.6956621918971003,
    1.081358037176589,
    1.5401625788153654,
    2.0193976436113505,
    2.445378492851921,
    2.74074502740986,
];

/// Faddeeva function `w(z) = e^{-z²} erfc(-iz)`.
///
/// Upper half plane: Weideman's rational expansion for `|z| < 8`, the Laplace
/// continued fraction beyond. The lower half plane uses
/// `w(z) = 2 e^{-z²} - w(-z)`, which overflows once `Im(z)² - Re(z)²` exceeds ~700.
pub fn faddeeva(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return (-z * z).exp() * 2.0 - faddeeva_upper(-z);
    }
    faddeeva_upper(z)
}

fn faddeeva_upper(z: Complex64) -> Complex64 {
    if z.norm_sqr() >= 64.0 {
        // w(z) = (i/√π) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...))))
        let terms = if z.norm_sqr() > 1.0e4 { 12 } else { 60 };
        let mut r = Complex64::new(0.0, 0.0);
        for k in (1..=terms).rev() {
            r = (0.5 * k as f64) / (z - r);
        }
        return Complex64::new(0.0, FRAC_1_SQRT_PI) / (z - r);
    }
    let iz = Complex64::i() * z;
    let denom = WEIDEMAN_L - iz;
    let big_z = (WEIDEMAN_L + iz) / denom;
    let mut p = Complex64::new(0.0, 0.0);
    for &c in WEIDEMAN_COEFFS.iter() {
        p = p * big_z + c;
    }
    p * 2.0 / (denom * denom) + FRAC_1_SQRT_PI / denom
}

/// `∫_b^∞ e^{-s² - iκs} ds`, evaluated without overflow for large `|κ|`.
pub fn gaussian_upper_integral(b: f64, kappa: f64) -> Complex64 {
    if b >= 0.0 {
        // (√π/2) e^{-κ²/4} erfc(b + iκ/2) = (√π/2) e^{-b² - ibκ} w(-κ/2 + ib)
        let w = faddeeva_upper(Complex64::new(-0.5 * kappa, b));
        let pre = Complex64::from_polar((-b * b).exp(), -b * kappa);
        pre * w * (0.5 * PI.sqrt())
    } else {
        let full = PI.sqrt() * (-0.25 * kappa * kappa).exp();
        Complex64::new(full, 0.0) - gaussian_upper_integral(-b, -kappa)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, x);
            dp = nf * (x * p - p_prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, p_prev) = legendre_pair(n, x);
        dp = if p.is_finite() { nf * (x * p - p_prev) / (x * x - 1.0) } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Fills `out[j] = P_j(x)` for `j < out.len()`.
pub fn legendre_values(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Spherical Bessel functions `j_0(ω), …, j_{m}(ω)` with `m = out.len() - 1`.
pub fn spherical_bessel_j(omega: f64, out: &mut [f64]) {
    let m = out.len();
    if m == 0 {
        return;
    }
    if omega < 0.0 {
        spherical_bessel_j(-omega, out);
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
        return;
    }
    if omega < 1e-6 {
        // j_n(ω) ≈ ω^n / (2n+1)!! (1 - ω²/(2(2n+3)))
        let mut lead = 1.0;
        for (n, v) in out.iter_mut().enumerate() {
            if n > 0 {
                lead *= omega / (2 * n + 1) as f64;
            }
            *v = lead * (1.0 - omega * omega / (2.0 * (2 * n + 3) as f64));
        }
        return;
    }
    let (s, c) = omega.sin_cos();
    let j0 = s / omega;
    let j1 = s / (omega * omega) - c / omega;
    if omega >= m as f64 {
        out[0] = j0;
        if m > 1 {
            out[1] = j1;
        }
        for n in 1..m - 1 {
            out[n + 1] = (2 * n + 1) as f64 / omega * out[n] - out[n - 1];
        }
        return;
    }
    // Miller's downward recurrence, normalised with Σ (2n+1) j_n² = 1.
    let start = m + 20 + omega as usize;
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut norm = 0.0;
    for n in (0..=start).rev() {
        if n < m {
            out[n] = cur;
        }
        norm += (2 * n + 1) as f64 * cur * cur;
        if n == 0 {
            break;
        }
        let prev = (2 * n + 1) as f64 / omega * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e150 {
            let scale = 1e-150;
            cur *= scale;
            next *= scale;
            norm *= scale * scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    let mut factor = 1.0 / norm.sqrt();
    let reference = if j0.abs() > j1.abs() { (out[0], j0) } else { (out.get(1).copied().unwrap_or(out[0]), j1) };
    if reference.0 * reference.1 < 0.0 {
        factor = -factor;
    }
    for v in out.iter_mut() {
        *v *= factor;
    }
}

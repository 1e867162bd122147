//! Crank–Nicolson reference solver on `[-L, L]` with homogeneous Dirichlet ends.
//!
//! Nodes sit at `x_j = a + j h`, so the interaction always falls on a node. The
//! discrete operator is the three-point Laplacian plus `2q/h` at that node. With
//! [`InterfaceHandling::JumpStencil`] the time-derivative weight at the node is
//! `1 - qh/3`, which cancels the `O(h)` error the kink in `u_xxx` leaves in the
//! three-point stencil; [`InterfaceHandling::CellAverage`] keeps the plain weight.
//! Either way the scheme conserves the weighted norm `Σ m_j |u_j|² h` exactly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::model::{FieldSource, InitialProfile, PotentialParams, SolutionField, SpaceTimeGrid};
use crate::{invalid, Error, Result};

/// How the point interaction enters the stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InterfaceHandling {
    /// `2q/h` at the node, first order near `a`.
    CellAverage,
    /// `2q/h` at the node with a corrected mass weight, second order.
    #[default]
    JumpStencil,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct FdConfig {
    /// Domain is `[-L, L]`.
    pub half_width: f64,
    pub h: f64,
    pub dt: f64,
    pub final_time: f64,
    pub interface: InterfaceHandling,
    /// Abort once `|u|` next to either wall exceeds this fraction of the initial peak.
    pub boundary_guard: f64,
    pub boundary: BoundaryCondition,
    /// Leading steps taken as two backward-Euler half-steps each. They damp the
    /// grid-scale modes a kink in the data excites, which Crank–Nicolson alone
    /// carries along undamped. Those steps do not conserve the norm.
    pub startup_steps: usize,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            half_width: 30.0,
            h: 1e-3,
            dt: 1e-4,
            final_time: 1.0,
            interface: InterfaceHandling::JumpStencil,
            boundary_guard: DOMAIN_GUARD,
            boundary: BoundaryCondition::Dirichlet,
            startup_steps: 2,
        }
    }
}

/// Treatment of the two ends of the computational domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundaryCondition {
    /// `u = 0` just outside `[-L, L]`; the scheme is exactly unitary.
    #[default]
    Dirichlet,
    /// Discrete transparent condition, exact for the scheme applied to the free
    /// equation outside `[-L, L]` with zero data there. Outgoing waves leave
    /// without reflection, so the norm is no longer conserved.
    Transparent,
}

/// Default boundary-to-peak ratio above which a run is aborted. Data that violate the
/// interface condition radiate algebraic tails of order `q u(a) / x²`, so a much
/// smaller ratio would reject perfectly usable runs.
pub const DOMAIN_GUARD: f64 = 5e-3;

impl FdConfig {
    pub fn validate(&self, profile: &InitialProfile, params: &PotentialParams) -> Result<()> {
        params.validate()?;
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and positive, got {v}")))
            }
        };
        positive("h", self.h)?;
        positive("dt", self.dt)?;
        positive("half_width", self.half_width)?;
        positive("boundary_guard", self.boundary_guard)?;
        if !(self.final_time.is_finite() && self.final_time >= 0.0) {
            return Err(invalid("final_time", "must be finite and non-negative"));
        }
        let need = params.a.abs() + 5.0 * (profile.support_radius() + 2.0 * self.final_time.sqrt());
        if self.half_width <= need {
            return Err(invalid(
                "half_width",
                format!("L = {} does not exceed |a| + 5 (support radius + 2 sqrt T) = {need}", self.half_width),
            ));
        }
        if self.interface == InterfaceHandling::JumpStencil && params.q * self.h >= 1.5 {
            return Err(invalid("h", "q h must stay below 1.5 for the jump stencil"));
        }
        if (self.half_width - params.a.abs()) / self.h < 8.0 {
            return Err(invalid("h", "fewer than eight nodes between a and the boundary"));
        }
        Ok(())
    }
}

/// Sampled interface data `g1(t) = u(a,t)` and `φ1(t)`, the mean of the one-sided
/// estimates `u_x(a-,t) - q u(a,t)` and `u_x(a+,t) + q u(a,t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTraces {
    pub t_values: Vec<f64>,
    pub g1: Vec<Complex64>,
    pub phi1: Vec<Complex64>,
    /// `|u_x(a+) - u_x(a-) + 2q u(a)|` from the same one-sided differences, which is
    /// also the gap between the two `φ1` estimates. Zero for traces built with [`BoundaryTraces::new`].
    pub jump_residual: Vec<f64>,
}

impl BoundaryTraces {
    /// `t_values` must start at 0 and increase strictly.
    pub fn new(t_values: Vec<f64>, g1: Vec<Complex64>, phi1: Vec<Complex64>) -> Result<Self> {
        if t_values.is_empty() || t_values.len() != g1.len() || t_values.len() != phi1.len() {
            return Err(Error::GridMismatch(format!(
                "{} times, {} g1 samples, {} phi1 samples",
                t_values.len(),
                g1.len(),
                phi1.len()
            )));
        }
        if t_values[0] != 0.0 {
            return Err(invalid("t_values", "traces must start at t = 0"));
        }
        if t_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("t_values", "times must be strictly increasing"));
        }
        let jump_residual = alloc::vec![0.0; t_values.len()];
        Ok(Self { t_values, g1, phi1, jump_residual })
    }

    /// `h1(k,t) = ∫_0^t e^{ik²(τ-t)} g1(τ) dτ` and the same for `φ1`, with the
    /// traces linear on each sampling interval and the exponential integrated exactly.
    pub fn time_transforms(&self, k: f64, t: f64) -> Result<(Complex64, Complex64)> {
        let last = *self.t_values.last().expect("traces are non-empty");
        if !(t >= 0.0 && t <= last * (1.0 + 1e-12)) {
            return Err(Error::InsufficientSampling(format!("traces end at t = {last}, asked for t = {t}")));
        }
        let omega = k * k;
        let mut h1 = Complex64::new(0.0, 0.0);
        let mut h2 = Complex64::new(0.0, 0.0);
        for n in 0..self.t_values.len() - 1 {
            let (t0, mut t1) = (self.t_values[n], self.t_values[n + 1]);
            if t0 >= t {
                break;
            }
            let (mut g_end, mut p_end) = (self.g1[n + 1], self.phi1[n + 1]);
            if t1 > t {
                let s = (t - t0) / (t1 - t0);
                g_end = self.g1[n] + (self.g1[n + 1] - self.g1[n]) * s;
                p_end = self.phi1[n] + (self.phi1[n + 1] - self.phi1[n]) * s;
                t1 = t;
            }
            let dt = t1 - t0;
            let theta = omega * dt;
            if theta > core::f64::consts::PI {
                return Err(Error::InsufficientSampling(format!(
                    "k² Δτ = {theta:.3} exceeds π at τ = {t0}; sample the traces more densely"
                )));
            }
            let (e0, e1) = filon_weights(theta);
            let pre = Complex64::from_polar(dt, omega * (t0 - t));
            h1 += pre * (self.g1[n] * e0 + (g_end - self.g1[n]) * e1);
            h2 += pre * (self.phi1[n] * e0 + (p_end - self.phi1[n]) * e1);
        }
        Ok((h1, h2))
    }
}

/// `(∫_0^1 e^{iθs} ds, ∫_0^1 s e^{iθs} ds)`.
fn filon_weights(theta: f64) -> (Complex64, Complex64) {
    if theta.abs() < 1e-3 {
        let th2 = theta * theta;
        let e0 = Complex64::new(1.0 - th2 / 6.0, theta / 2.0 - th2 * theta / 24.0);
        let e1 = Complex64::new(0.5 - th2 / 8.0, theta / 3.0 - th2 * theta / 30.0);
        return (e0, e1);
    }
    let e = Complex64::from_polar(1.0, theta);
    let it = Complex64::new(0.0, theta);
    ((e - 1.0) / it, e / it + (e - 1.0) / (theta * theta))
}

/// Complete state of a run at a set of times.
#[derive(Debug, Clone)]
pub struct FdRun {
    /// Node positions of the unknowns.
    pub x: Vec<f64>,
    /// Index of the node at `a`.
    pub interface_index: usize,
    /// `(t, u)` at the requested times.
    pub snapshots: Vec<(f64, Vec<Complex64>)>,
    pub traces: BoundaryTraces,
    /// Weighted discrete norm `Σ m_j |u_j|² h` after every step, starting at `t = 0`.
    pub norms: Vec<f64>,
}

/// Coefficients `ℓ_m` of `ν(z) = Σ ℓ_m z^{-m}`, the decaying root of
/// `ν + 1/ν = 2 - i (z-1) / (r (z+1))`, by inverse z-transform on a circle `|z| = ρ > 1`.
/// With them `u_{J+1}^n = Σ_m ℓ_m u_J^{n-m}` at either end.
fn transparent_kernel(r: f64, count: usize) -> Vec<Complex64> {
    let n = 2 * count.max(8);
    // aliasing falls like ρ^{-n}, roundoff grows like ρ^m
    let rho = 1e8f64.powf(1.0 / n as f64);
    let roots: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * k as f64 / n as f64)).collect();
    let nu: Vec<Complex64> = roots
        .iter()
        .map(|w| {
            let z = w * rho;
            let sigma = Complex64::new(0.0, -1.0) * (z - 1.0) / ((z + 1.0) * r);
            let b = sigma + 2.0;
            let d = (b * b - 4.0).sqrt();
            let (r1, r2) = ((b + d) * 0.5, (b - d) * 0.5);
            if r1.norm() < r2.norm() {
                r1
            } else {
                r2
            }
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    let mut scale = 1.0 / n as f64;
    for m in 0..count {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, v) in nu.iter().enumerate() {
            acc += v * roots[(k * m) % n];
        }
        out.push(acc * scale);
        scale *= rho;
    }
    out
}

/// History of the two end nodes needed by the transparent condition.
struct EdgeHistory {
    kernel: Vec<Complex64>,
    // u at the first and last unknown, one entry per completed step
    left: Vec<Complex64>,
    right: Vec<Complex64>,
    // ghost values just outside the domain at the current step
    ghost_left: Complex64,
    ghost_right: Complex64,
}

impl EdgeHistory {
    fn new(kernel: Vec<Complex64>, u: &[Complex64]) -> Self {
        let (l, r) = (u[0], u[u.len() - 1]);
        Self { ghost_left: kernel[0] * l, ghost_right: kernel[0] * r, kernel, left: vec![l], right: vec![r] }
    }

    /// `Σ_{m≥1} ℓ_m u^{n+1-m}` for the step about to be taken.
    fn memory(&self, hist: &[Complex64]) -> Complex64 {
        let n = hist.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 1..=n.min(self.kernel.len() - 1) {
            acc += self.kernel[m] * hist[n - m];
        }
        acc
    }
}

struct Stepper {
    x: Vec<f64>,
    ia: usize,
    h: f64,
    q: f64,
    mass: Vec<f64>,
    // Thomas factorization of M - i dt/2 L: modified super-diagonal and pivots
    c_prime: Vec<Complex64>,
    pivot: Vec<Complex64>,
    off: Complex64,
    diag_rhs: Vec<Complex64>,
    off_rhs: Complex64,
}

impl Stepper {
    fn new(params: &PotentialParams, cfg: &FdConfig, ell0: Complex64) -> Self {
        let (a, h, l) = (params.a, cfg.h, cfg.half_width);
        let j_lo = ((-l - a) / h).floor() as i64 + 1;
        let j_hi = ((l - a) / h).ceil() as i64 - 1;
        let x: Vec<f64> = (j_lo..=j_hi).map(|j| a + j as f64 * h).filter(|v| v.abs() < l).collect();
        let ia = x.iter().position(|v| (v - a).abs() < 0.5 * h).expect("a lies inside the domain");
        let n = x.len();
        let mut mass = vec![1.0; n];
        if cfg.interface == InterfaceHandling::JumpStencil {
            mass[ia] = 1.0 - params.q * h / 3.0;
        }
        let r = 0.5 * cfg.dt / (h * h);
        let mut lap_diag = vec![-2.0; n];
        lap_diag[ia] += 2.0 * params.q * h;
        // A = M - i r (h² L), B = M + i r (h² L)
        let i = Complex64::i();
        let diag_lhs: Vec<Complex64> = (0..n).map(|j| mass[j] - i * r * lap_diag[j]).collect();
        let diag_rhs: Vec<Complex64> = (0..n).map(|j| mass[j] + i * r * lap_diag[j]).collect();
        let off = -i * r;
        let off_rhs = i * r;
        let mut diag_lhs = diag_lhs;
        diag_lhs[0] += off * ell0;
        diag_lhs[n - 1] += off * ell0;
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut pivot = vec![Complex64::new(0.0, 0.0); n];
        pivot[0] = diag_lhs[0];
        c_prime[0] = off / pivot[0];
        for j in 1..n {
            pivot[j] = diag_lhs[j] - off * c_prime[j - 1];
            c_prime[j] = off / pivot[j];
        }
        Self { x, ia, h, q: params.q, mass, c_prime, pivot, off, diag_rhs, off_rhs }
    }

    fn step(&self, u: &mut [Complex64], rhs: &mut [Complex64], edges: Option<&mut EdgeHistory>) {
        let n = u.len();
        for j in 0..n {
            let mut v = self.diag_rhs[j] * u[j];
            if j > 0 {
                v += self.off_rhs * u[j - 1];
            }
            if j + 1 < n {
                v += self.off_rhs * u[j + 1];
            }
            rhs[j] = v;
        }
        let mut memory = None;
        if let Some(e) = edges.as_deref() {
            let (ml, mr) = (e.memory(&e.left), e.memory(&e.right));
            // the new ghost value is ℓ_0 u^{n+1} (moved into the matrix) plus the memory term
            rhs[0] += self.off_rhs * (e.ghost_left + ml);
            rhs[n - 1] += self.off_rhs * (e.ghost_right + mr);
            memory = Some((ml, mr));
        }
        // forward sweep, then back substitution into u
        rhs[0] /= self.pivot[0];
        for j in 1..n {
            let prev = rhs[j - 1];
            rhs[j] = (rhs[j] - self.off * prev) / self.pivot[j];
        }
        u[n - 1] = rhs[n - 1];
        for j in (0..n - 1).rev() {
            u[j] = rhs[j] - self.c_prime[j] * u[j + 1];
        }
        if let (Some(e), Some((ml, mr))) = (edges, memory) {
            e.ghost_left = e.kernel[0] * u[0] + ml;
            e.ghost_right = e.kernel[0] * u[n - 1] + mr;
            e.left.push(u[0]);
            e.right.push(u[n - 1]);
        }
    }

    /// Two backward-Euler steps of `dt/2`; `M - i (dt/2) L` is the Crank–Nicolson matrix.
    fn damped_step(&self, u: &mut [Complex64], rhs: &mut [Complex64], edges: Option<&mut EdgeHistory>) {
        let n = u.len();
        for _ in 0..2 {
            for j in 0..n {
                rhs[j] = u[j] * self.mass[j];
            }
            rhs[0] /= self.pivot[0];
            for j in 1..n {
                let prev = rhs[j - 1];
                rhs[j] = (rhs[j] - self.off * prev) / self.pivot[j];
            }
            u[n - 1] = rhs[n - 1];
            for j in (0..n - 1).rev() {
                u[j] = rhs[j] - self.c_prime[j] * u[j + 1];
            }
        }
        if let Some(e) = edges {
            let (ml, mr) = (e.memory(&e.left), e.memory(&e.right));
            e.ghost_left = e.kernel[0] * u[0] + ml;
            e.ghost_right = e.kernel[0] * u[n - 1] + mr;
            e.left.push(u[0]);
            e.right.push(u[n - 1]);
        }
    }

    fn norm(&self, u: &[Complex64]) -> f64 {
        u.iter().zip(&self.mass).map(|(v, m)| m * v.norm_sqr()).sum::<f64>() * self.h
    }

    /// `(g1, φ1 mean, |φ1 left - φ1 right|)` from second-order one-sided differences.
    fn trace(&self, u: &[Complex64]) -> (Complex64, Complex64, f64) {
        let ia = self.ia;
        let g = u[ia];
        let dl = (u[ia] * 3.0 - u[ia - 1] * 4.0 + u[ia - 2]) / (2.0 * self.h);
        let dr = (-u[ia] * 3.0 + u[ia + 1] * 4.0 - u[ia + 2]) / (2.0 * self.h);
        let left = dl - g * self.q;
        let right = dr + g * self.q;
        (g, (left + right) * 0.5, (left - right).norm())
    }

    /// Four-point Lagrange interpolation that does not reach across `a`.
    fn sample(&self, u: &[Complex64], x: f64) -> Complex64 {
        let n = self.x.len();
        let pos = (x - self.x[0]) / self.h;
        let j = pos.round();
        if (pos - j).abs() < 1e-9 && j >= 0.0 && (j as usize) < n {
            return u[j as usize];
        }
        let base = pos.floor() as i64;
        let (lo_lim, hi_lim) = if x < self.x[self.ia] { (0, self.ia as i64) } else { (self.ia as i64, n as i64 - 1) };
        let start = (base - 1).clamp(lo_lim, (hi_lim - 3).max(lo_lim));
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..4 {
            let jm = start + m;
            if jm > hi_lim {
                break;
            }
            let mut w = 1.0;
            for l in 0..4 {
                if l != m {
                    let jl = start + l;
                    w *= (pos - jl as f64) / ((jm - jl) as f64);
                }
            }
            acc += u[jm as usize] * w;
        }
        acc
    }
}

/// Runs the scheme and keeps the full state at each of `times` (sorted, within `[0, final_time]`).
/// Times off the step lattice are interpolated linearly between steps.
pub fn fd_run(profile: &InitialProfile, params: &PotentialParams, cfg: &FdConfig, times: &[f64]) -> Result<FdRun> {
    fd_run_inner(profile, params, cfg, times, None).map(|(run, _)| run)
}

type Probes<'a> = Option<(&'a [f64], &'a mut Vec<Vec<Complex64>>)>;

fn fd_run_inner(
    profile: &InitialProfile,
    params: &PotentialParams,
    cfg: &FdConfig,
    times: &[f64],
    probes: Probes<'_>,
) -> Result<(FdRun, ())> {
    cfg.validate(profile, params)?;
    run_steps(profile, params, cfg, times, probes)
}

fn run_steps(
    profile: &InitialProfile,
    params: &PotentialParams,
    cfg: &FdConfig,
    times: &[f64],
    mut probes: Probes<'_>,
) -> Result<(FdRun, ())> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|&t| !(t >= 0.0)) {
        return Err(invalid("t", "sample times must be non-negative and sorted"));
    }
    let t_end = times.last().copied().unwrap_or(0.0);
    if t_end > cfg.final_time * (1.0 + 1e-12) {
        return Err(invalid("final_time", format!("sample time {t_end} beyond final_time {}", cfg.final_time)));
    }
    let steps = (t_end / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    let kernel = match cfg.boundary {
        BoundaryCondition::Dirichlet => None,
        BoundaryCondition::Transparent => Some(transparent_kernel(0.5 * cfg.dt / (cfg.h * cfg.h), steps + 1)),
    };
    let ell0 = kernel.as_ref().map_or(Complex64::new(0.0, 0.0), |k| k[0]);
    let st = Stepper::new(params, cfg, ell0);
    let n = st.x.len();
    let mut u: Vec<Complex64> = st.x.iter().map(|&x| profile.evaluate(x)).collect();
    let peak = u.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(f64::MIN_POSITIVE);
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    let mut edges = kernel.map(|k| EdgeHistory::new(k, &u));

    let mut snapshots = Vec::new();
    let mut t_values = Vec::with_capacity(steps + 1);
    let mut g1 = Vec::with_capacity(steps + 1);
    let mut phi1 = Vec::with_capacity(steps + 1);
    let mut jumps = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    let mut record = |t: f64, u: &[Complex64], st: &Stepper| {
        let (g, p, d) = st.trace(u);
        t_values.push(t);
        g1.push(g);
        phi1.push(p);
        jumps.push(d);
        norms.push(st.norm(u));
    };
    record(0.0, &u, &st);

    let mut next = 0usize;
    let emit = |t: f64, state: &[Complex64], snapshots: &mut Vec<(f64, Vec<Complex64>)>, probes: &mut Probes<'_>| {
        if let Some((xs, out)) = probes {
            out.push(xs.iter().map(|&x| st.sample(state, x)).collect());
        } else {
            snapshots.push((t, state.to_vec()));
        }
    };
    while next < times.len() && times[next] <= 0.0 {
        emit(0.0, &u, &mut snapshots, &mut probes);
        next += 1;
    }
    let mut prev = u.clone();
    for s in 1..=steps {
        prev.copy_from_slice(&u);
        if s <= cfg.startup_steps {
            st.damped_step(&mut u, &mut rhs, edges.as_mut());
        } else {
            st.step(&mut u, &mut rhs, edges.as_mut());
        }
        let t = s as f64 * cfg.dt;
        let edge = u[0].norm().max(u[n - 1].norm()) / peak;
        if cfg.boundary == BoundaryCondition::Dirichlet && edge > cfg.boundary_guard {
            return Err(Error::DomainTooSmall { time: t, ratio: edge });
        }
        record(t, &u, &st);
        let t_prev = t - cfg.dt;
        while next < times.len() && times[next] <= t + 1e-9 * cfg.dt {
            let tau = times[next];
            let w = ((tau - t_prev) / cfg.dt).clamp(0.0, 1.0);
            if (1.0 - w).abs() < 1e-9 {
                emit(tau, &u, &mut snapshots, &mut probes);
            } else {
                let mixed: Vec<Complex64> = prev.iter().zip(&u).map(|(a, b)| a * (1.0 - w) + b * w).collect();
                emit(tau, &mixed, &mut snapshots, &mut probes);
            }
            next += 1;
        }
    }
    let traces = BoundaryTraces { t_values, g1, phi1, jump_residual: jumps };
    Ok((FdRun { x: st.x, interface_index: st.ia, snapshots, traces, norms }, ()))
}

/// Solves and samples the solution on `grid`; traces are recorded every step.
pub fn fd_solve(
    profile: &InitialProfile,
    params: &PotentialParams,
    cfg: &FdConfig,
    grid: &SpaceTimeGrid,
) -> Result<(SolutionField, BoundaryTraces)> {
    let l = cfg.half_width;
    if let Some(x) = grid.x().iter().find(|x| x.abs() >= l) {
        return Err(invalid("x", format!("x = {x} lies outside the domain (-{l}, {l})")));
    }
    let mut rows = Vec::with_capacity(grid.t().len());
    let (run, ()) = fd_run_inner(profile, params, cfg, grid.t(), Some((grid.x(), &mut rows)))?;
    let values = rows.into_iter().flatten().collect();
    let field = SolutionField::new(grid.clone(), values, FieldSource::Oracle)?;
    Ok((field, run.traces))
}

/// Largest difference at the probe points `(x, t)` between runs at `(h, dt)` and `(h/2, dt/2)`.
/// For a second-order scheme the fine run's error is about a third of this.
pub fn richardson_error_estimate(
    profile: &InitialProfile,
    params: &PotentialParams,
    cfg: &FdConfig,
    probes: &[(f64, f64)],
) -> Result<f64> {
    if probes.is_empty() {
        return Ok(0.0);
    }
    let mut xs: Vec<f64> = probes.iter().map(|p| p.0).collect();
    let mut ts: Vec<f64> = probes.iter().map(|p| p.1).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    ts.sort_by(|a, b| a.total_cmp(b));
    ts.dedup();
    let grid = SpaceTimeGrid::new(xs.clone(), ts.clone())?;
    let fine_cfg = FdConfig { h: 0.5 * cfg.h, dt: 0.5 * cfg.dt, ..*cfg };
    let (coarse, _) = fd_solve(profile, params, cfg, &grid)?;
    let (fine, _) = fd_solve(profile, params, &fine_cfg, &grid)?;
    let mut worst = 0.0f64;
    for &(x, t) in probes {
        let ix = xs.iter().position(|&v| v == x).expect("probe x on grid");
        let it = ts.iter().position(|&v| v == t).expect("probe t on grid");
        worst = worst.max((coarse.get(it, ix) - fine.get(it, ix)).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utm::free_gaussian;

    // skips the margin check so the boundaries are actually exercised
    fn fd_run_unchecked(
        g: &InitialProfile,
        p: &PotentialParams,
        cfg: &FdConfig,
        grid: &SpaceTimeGrid,
    ) -> (SolutionField, BoundaryTraces) {
        let mut rows = Vec::new();
        let (run, ()) = run_steps(g, p, cfg, grid.t(), Some((grid.x(), &mut rows))).unwrap();
        let field =
            SolutionField::new(grid.clone(), rows.into_iter().flatten().collect(), FieldSource::Oracle).unwrap();
        (field, run.traces)
    }

    fn coarse() -> FdConfig {
        FdConfig { half_width: 20.0, h: 2e-3, dt: 2e-4, final_time: 0.25, ..FdConfig::default() }
    }

    #[test]
    fn free_gaussian_matches_closed_form() {
        let g = InitialProfile::gaussian(0.0, 1.0, 1.0).unwrap();
        let p = PotentialParams { q: 0.0, a: 0.0 };
        let grid = SpaceTimeGrid::new(vec![-1.0, 0.0, 0.37], vec![0.0, 0.1, 0.25]).unwrap();
        let (field, _) = fd_solve(&g, &p, &coarse(), &grid).unwrap();
        for (it, &t) in grid.t().iter().enumerate() {
            for (ix, &x) in grid.x().iter().enumerate() {
                let e = free_gaussian(0.0, 1.0, 1.0, x, t);
                assert!((field.get(it, ix) - e).norm() < 1e-4, "x={x} t={t}");
            }
        }
    }

    #[test]
    fn norm_is_conserved_per_step() {
        let g = InitialProfile::gaussian(0.2, 0.8, 1.0).unwrap();
        let p = PotentialParams { q: 1.5, a: 0.1 };
        let cfg = coarse();
        let run = fd_run(&g, &p, &cfg, &[0.25]).unwrap();
        let n0 = run.norms[0];
        for w in run.norms[cfg.startup_steps..].windows(2) {
            assert!((w[1] - w[0]).abs() <= 1e-12 * n0);
        }
        let plain = fd_run(&g, &p, &FdConfig { startup_steps: 0, ..cfg }, &[0.25]).unwrap();
        for w in plain.norms.windows(2) {
            assert!((w[1] - w[0]).abs() <= 1e-12 * n0);
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let z = InitialProfile::gaussian(0.0, 1.0, 0.0).unwrap();
        let p = PotentialParams { q: 1.0, a: 0.0 };
        let grid = SpaceTimeGrid::new(vec![-1.0, 0.5], vec![0.0, 0.2]).unwrap();
        let (field, traces) = fd_solve(&z, &p, &coarse(), &grid).unwrap();
        assert!(field.values().iter().all(|v| v.norm() == 0.0));
        assert!(traces.g1.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn bound_state_is_stationary() {
        let b = InitialProfile::bound_state(2.0, 0.0).unwrap();
        let p = PotentialParams { q: 2.0, a: 0.0 };
        let cfg = FdConfig { final_time: 0.5, ..coarse() };
        let grid = SpaceTimeGrid::new(vec![-0.5, 0.0, 0.3], vec![0.0, 0.25, 0.5]).unwrap();
        let (field, traces) = fd_solve(&b, &p, &cfg, &grid).unwrap();
        for it in 0..3 {
            for ix in 0..3 {
                assert!((field.get(it, ix).norm() - field.get(0, ix).norm()).abs() < 1e-3);
            }
        }
        // phase of u(0, t) turns at q² = 4
        let n = traces.t_values.len() - 1;
        let rate = (traces.g1[n] / traces.g1[0]).arg() / traces.t_values[n];
        assert!((rate - 4.0).abs() < 1e-2, "rate {rate}");
        assert!(traces.jump_residual.iter().all(|&j| j < 1e-2));
    }

    #[test]
    fn small_domain_is_rejected() {
        let g = InitialProfile::gaussian(0.0, 1.0, 1.0).unwrap();
        let p = PotentialParams { q: 0.0, a: 0.0 };
        let cfg = FdConfig { half_width: 8.0, ..coarse() };
        assert!(matches!(cfg.validate(&g, &p), Err(Error::InvalidParameter { field: "half_width", .. })));
    }

    #[test]
    fn domain_guard_reports_time() {
        // a packet moving at speed 200 reaches the wall well before t = 0.5
        let x: Vec<f64> = (0..=2400).map(|j| -6.0 + 0.005 * j as f64).collect();
        let re: Vec<f64> = x.iter().map(|v| (-v * v).exp() * (100.0 * v).cos()).collect();
        let im: Vec<f64> = x.iter().map(|v| (-v * v).exp() * (100.0 * v).sin()).collect();
        let p = InitialProfile::custom_sampled(x, re, im).unwrap();
        let params = PotentialParams { q: 0.0, a: 0.0 };
        let cfg = FdConfig { half_width: 45.0, h: 5e-3, dt: 1e-4, final_time: 0.5, ..FdConfig::default() };
        let err = fd_run(&p, &params, &cfg, &[0.5]).unwrap_err();
        assert!(matches!(err, Error::DomainTooSmall { time, .. } if time > 0.1 && time < 0.5), "{err:?}");
    }

    #[test]
    fn transparent_ends_let_a_packet_leave() {
        let g = InitialProfile::gaussian(0.0, 1.0, 1.0).unwrap();
        let p = PotentialParams { q: 0.0, a: 0.0 };
        // L barely covers the data; by t = 2 most of the packet has crossed the ends
        let cfg = FdConfig {
            half_width: 6.0,
            h: 5e-3,
            dt: 5e-4,
            final_time: 2.0,
            boundary: BoundaryCondition::Transparent,
            ..FdConfig::default()
        };
        let grid = SpaceTimeGrid::new(vec![-3.0, 0.0, 1.5, 5.5], vec![0.5, 2.0]).unwrap();
        let (field, _) = fd_run_unchecked(&g, &p, &cfg, &grid);
        // the same scheme on a domain wide enough that nothing reaches the walls
        let wide = FdConfig { half_width: 60.0, boundary: BoundaryCondition::Dirichlet, ..cfg };
        let (reference, _) = fd_solve(&g, &p, &wide, &grid).unwrap();
        for (it, &t) in grid.t().iter().enumerate() {
            for (ix, &x) in grid.x().iter().enumerate() {
                let d = (field.get(it, ix) - reference.get(it, ix)).norm();
                assert!(d < 1e-9, "x={x} t={t}: {d:e}");
                assert!((field.get(it, ix) - free_gaussian(0.0, 1.0, 1.0, x, t)).norm() < 1e-4);
            }
        }
    }

    #[test]
    fn filon_trace_integral_is_exact_for_linear_traces() {
        let t: Vec<f64> = (0..=50).map(|j| j as f64 * 0.01).collect();
        let g: Vec<Complex64> = t.iter().map(|&s| Complex64::new(1.0 + 2.0 * s, 0.0)).collect();
        let phi = vec![Complex64::new(0.0, 0.0); t.len()];
        let tr = BoundaryTraces::new(t, g, phi).unwrap();
        let k = 3.0;
        let w = k * k;
        let (h1, h2) = tr.time_transforms(k, 0.5).unwrap();
        // ∫_0^T e^{iw(τ-T)} (1 + 2τ) dτ in closed form
        let i = Complex64::i();
        let big_t = 0.5;
        let anti = |s: f64| {
            let e = (i * w * (s - big_t)).exp();
            e * (1.0 + 2.0 * s) / (i * w) - e * 2.0 / (i * w * i * w)
        };
        assert!((h1 - (anti(big_t) - anti(0.0))).norm() < 1e-13);
        assert_eq!(h2, Complex64::new(0.0, 0.0));
        assert!(matches!(tr.time_transforms(40.0, 0.5), Err(Error::InsufficientSampling(_))));
    }
}

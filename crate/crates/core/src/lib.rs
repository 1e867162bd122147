//! Solution of the one-dimensional linear Schrödinger equation with a point
//! interaction,
//!
//! ```text
//! i u_t + u_xx + 2 q δ(x - a) u = 0,    u(x, 0) = u0(x),
//! ```
//!
//! by the unified transform representation: the field is assembled from the
//! half-line Fourier transforms of the initial datum, a handful of oscillatory
//! spectral integrals and, for an attractive coupling (`q > 0`), the bound-state
//! term `B e^{-q|x-a|} e^{i q^2 t}`.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration and the
//! command-line front end live in the `delta-utm` companion crate.
//!
//! Modules:
//! - [`model`]: potentials, initial profiles, grids and solution fields.
//! - [`transforms`]: half-line Fourier transforms of the initial datum.
//! - [`quadrature`]: oscillatory integrals `(1/2π)∫ e^{ikx - ik²t} f(k) dk`.
//! - [`utm`]: the representation formulas, the bound-state term and the
//!   global-relation diagnostic.
//! - [`oracle`]: an independent Crank–Nicolson reference solver.
//! - [`analysis`]: decay fits, bound-state reports, residuals and field comparison.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod analysis;
mod error;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod transforms;
pub mod utm;

pub(crate) use error::invalid;
pub use error::{Error, PointFailure, Result};
pub use num_complex::Complex64;

//! Domain types: the potential, initial profiles, grids and solution fields.

mod grid;
mod profile;
mod spline;
mod validate;

pub use grid::{FieldSource, SolutionField, SpaceTimeGrid};
pub use profile::{InitialProfile, ProfileSpec, Side};
pub use validate::{validate_inputs, CheckStatus, ValidationCheck, ValidationReport};

use crate::{invalid, Result};

/// The point interaction `2 q δ(x - a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PotentialParams {
    /// Coupling strength. `q > 0` is attractive and carries a bound state.
    pub q: f64,
    /// Location of the interaction.
    pub a: f64,
}

impl PotentialParams {
    pub fn new(q: f64, a: f64) -> Result<Self> {
        let p = Self { q, a };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.q.is_finite() {
            return Err(invalid("q", "coupling must be finite"));
        }
        if !self.a.is_finite() {
            return Err(invalid("a", "location must be finite"));
        }
        Ok(())
    }
}

/// Builds a profile from its specification; see [`InitialProfile::new`].
pub fn make_profile(spec: ProfileSpec) -> Result<InitialProfile> {
    InitialProfile::new(spec)
}

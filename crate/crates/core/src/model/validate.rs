use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use super::{InitialProfile, PotentialParams, ProfileSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CheckStatus {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidationCheck {
    pub name: String,
    pub status: CheckStatus,
    pub note: String,
}

/// Outcome of [`validate_inputs`]. Advisory only: nothing here blocks a computation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    /// No check failed. Unknown checks do not count against the profile.
    pub fn satisfies_prop0(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

fn check(name: &str, status: CheckStatus, note: impl Into<String>) -> ValidationCheck {
    ValidationCheck { name: name.into(), status, note: note.into() }
}

/// Checks the regularity hypotheses of the representation: `u0`, `x u0`, `x² u0`
/// integrable, `u0'` and `u0''` integrable, and `u0` twice differentiable away from `a`.
pub fn validate_inputs(profile: &InitialProfile, params: &PotentialParams) -> ValidationReport {
    use CheckStatus::*;
    let finite = if params.validate().is_ok() { Pass } else { Fail };
    let mut checks = vec![check("finite_parameters", finite, "q and a finite")];
    match profile.spec() {
        ProfileSpec::Gaussian { .. } | ProfileSpec::OddGaussian { .. } => {
            checks.push(check("weighted_l1_decay", Pass, "Gaussian decay"));
            checks.push(check("derivatives_integrable", Pass, "Schwartz class"));
            checks.push(check("smooth_away_from_a", Pass, "smooth everywhere"));
        }
        ProfileSpec::TwoSidedExponential { center, .. } => {
            checks.push(check("weighted_l1_decay", Pass, "exponential decay"));
            checks.push(check("derivatives_integrable", Pass, "exponential decay"));
            checks.push(kink_check(*center, params.a));
        }
        ProfileSpec::BoundState { a, .. } => {
            checks.push(check("weighted_l1_decay", Pass, "exponential decay"));
            checks.push(check("derivatives_integrable", Pass, "exponential decay"));
            checks.push(kink_check(*a, params.a));
        }
        ProfileSpec::CustomSampled { .. } => {
            let spline = profile.sampled().expect("sampled profile carries a spline");
            let (first, last) = spline.end_values();
            let scale = spline.max_abs().max(f64::MIN_POSITIVE);
            let edge = first.norm().max(last.norm()) / scale;
            if edge > 1e-8 {
                checks.push(check(
                    "weighted_l1_decay",
                    Fail,
                    format!("samples do not decay at the grid ends (relative edge value {edge:.3e})"),
                ));
            } else {
                checks.push(check("weighted_l1_decay", Unknown, "decays at the grid ends; tails not sampled"));
            }
            checks.push(check("derivatives_integrable", Unknown, "cannot be verified from samples"));
            checks.push(check("smooth_away_from_a", Unknown, "cubic interpolant, third derivative jumps at knots"));
        }
    }
    let report = ValidationReport { checks };
    for c in report.failures() {
        log::warn!("input check `{}` failed: {}", c.name, c.note);
    }
    report
}

fn kink_check(center: f64, a: f64) -> ValidationCheck {
    if center == a {
        check("smooth_away_from_a", CheckStatus::Pass, "the only kink sits at a")
    } else {
        check("smooth_away_from_a", CheckStatus::Fail, format!("u0 has a kink at x = {center}, away from a = {a}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_passes_everything() {
        let p = InitialProfile::gaussian(0.0, 1.0, 1.0).unwrap();
        let r = validate_inputs(&p, &PotentialParams { q: 1.0, a: 0.0 });
        assert!(r.checks.iter().all(|c| c.status == CheckStatus::Pass));
        assert!(r.satisfies_prop0());
    }

    #[test]
    fn non_decaying_samples_fail_the_decay_check() {
        let x: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let p = InitialProfile::custom_sampled(x, vec![1.0; 11], vec![]).unwrap();
        let r = validate_inputs(&p, &PotentialParams { q: 1.0, a: 0.0 });
        let decay = r.checks.iter().find(|c| c.name == "weighted_l1_decay").unwrap();
        assert_eq!(decay.status, CheckStatus::Fail);
        assert!(!r.satisfies_prop0());
    }

    #[test]
    fn decaying_samples_are_unknown_not_pass() {
        let x: Vec<f64> = (0..41).map(|i| -10.0 + 0.5 * i as f64).collect();
        let re = x.iter().map(|v| (-v * v).exp()).collect();
        let p = InitialProfile::custom_sampled(x, re, vec![]).unwrap();
        let r = validate_inputs(&p, &PotentialParams { q: 1.0, a: 0.0 });
        assert!(r.satisfies_prop0());
        assert!(r.checks.iter().any(|c| c.status == CheckStatus::Unknown));
    }

    #[test]
    fn exponential_kink_only_allowed_at_a() {
        let p = InitialProfile::two_sided_exponential(0.0, 1.0, 1.0).unwrap();
        assert!(validate_inputs(&p, &PotentialParams { q: 1.0, a: 0.0 }).satisfies_prop0());
        let r = validate_inputs(&p, &PotentialParams { q: 1.0, a: 0.5 });
        assert!(!r.satisfies_prop0());
        assert!(r.failures().next().unwrap().note.contains("kink"));
    }
}

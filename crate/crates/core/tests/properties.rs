use delta_utm_core::analysis::{compare_fields, log_spaced, DecayFit};
use delta_utm_core::model::{FieldSource, InitialProfile, PotentialParams, Side, SolutionField, SpaceTimeGrid};
use delta_utm_core::oracle::{fd_run, FdConfig};
use delta_utm_core::quadrature::QuadratureConfig;
use delta_utm_core::transforms::{full_transform, half_transform, half_transform_numeric};
use delta_utm_core::utm::{free_gaussian, UtmSolver};
use delta_utm_core::Complex64;
use proptest::prelude::*;

fn solver(profile: InitialProfile, q: f64, a: f64) -> UtmSolver {
    UtmSolver::new(profile, PotentialParams { q, a }, QuadratureConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn halves_add_up_to_full_transform(c in -1.0..1.0f64, w in 0.5..2.0f64, a in -1.5..1.5f64, k in -30.0..30.0f64) {
        let g = InitialProfile::gaussian(c, w, 1.0).unwrap();
        let sum = half_transform(&g, a, k, Side::Left).unwrap() + half_transform(&g, a, k, Side::Right).unwrap();
        prop_assert!((sum - full_transform(&g, k).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn analytic_and_numeric_half_transforms_agree(c in -1.0..1.0f64, a in -1.0..1.0f64, k in -20.0..20.0f64) {
        let g = InitialProfile::gaussian(c, 1.0, 1.0).unwrap();
        for side in [Side::Left, Side::Right] {
            let d = half_transform(&g, a, k, side).unwrap() - half_transform_numeric(&g, a, k, side).unwrap();
            prop_assert!(d.norm() < 1e-9);
        }
    }

    #[test]
    fn free_evolution_matches_closed_form(c in -1.0..1.0f64, w in 0.6..1.5f64, x in -3.0..3.0f64, t in 0.0..3.0f64) {
        let s = solver(InitialProfile::gaussian(c, w, 1.0).unwrap(), 0.0, 0.3);
        prop_assert!((s.evaluate(x, t).unwrap() - free_gaussian(c, w, 1.0, x, t)).norm() < 1e-6);
    }

    #[test]
    fn eigenmodes_only_rotate(q in 0.5..3.0f64, a in -1.0..1.0f64, x in -3.0..3.0f64, t in 0.0..2.0f64) {
        let s = solver(InitialProfile::bound_state(q, a).unwrap(), q, a);
        let expect = Complex64::from_polar((-q * (x - a).abs()).exp(), q * q * t);
        prop_assert!((s.evaluate(x, t).unwrap() - expect).norm() < 1e-6);
    }

    #[test]
    fn mirror_symmetry(q in -2.0..2.0f64, a in -1.0..1.0f64, c in -1.0..1.0f64, x in -3.0..3.0f64, t in 0.05..2.0f64) {
        // reflecting the datum about a reflects the solution
        let s1 = solver(InitialProfile::gaussian(c, 1.0, 1.0).unwrap(), q, a);
        let s2 = solver(InitialProfile::gaussian(2.0 * a - c, 1.0, 1.0).unwrap(), q, a);
        let d = s1.evaluate(x, t).unwrap() - s2.evaluate(2.0 * a - x, t).unwrap();
        prop_assert!(d.norm() < 1e-6);
    }

    #[test]
    fn solution_is_linear_in_the_datum(q in -2.0..2.0f64, amp in -3.0..3.0f64, x in -3.0..3.0f64, t in 0.0..2.0f64) {
        let one = solver(InitialProfile::gaussian(0.2, 1.0, 1.0).unwrap(), q, 0.0);
        let scaled = solver(InitialProfile::gaussian(0.2, 1.0, amp).unwrap(), q, 0.0);
        let d = scaled.evaluate(x, t).unwrap() - one.evaluate(x, t).unwrap() * amp;
        prop_assert!(d.norm() < 1e-6 * amp.abs().max(1.0));
    }

    #[test]
    fn power_laws_are_recovered(p in 0.1..3.0f64, c in 0.01..100.0f64, t0 in 0.5..10.0f64) {
        let ts = log_spaced(t0, 20.0 * t0, 12).unwrap();
        let m: Vec<f64> = ts.iter().map(|t| c * t.powf(-p)).collect();
        let fit = DecayFit::from_samples(&ts, &m).unwrap();
        prop_assert!((fit.fitted_exponent - p).abs() < 1e-10);
        prop_assert!(fit.residual_rms < 1e-10);
    }

    #[test]
    fn comparison_against_itself_is_zero(vals in proptest::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 6)) {
        let grid = SpaceTimeGrid::new(vec![-1.0, 0.0, 2.0], vec![0.0, 1.0]).unwrap();
        let v: Vec<Complex64> = vals.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
        let f = SolutionField::new(grid, v, FieldSource::Oracle).unwrap();
        let r = compare_fields(&f, &f).unwrap();
        prop_assert_eq!(r.linf_abs, 0.0);
        prop_assert_eq!(r.l2_abs, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn crank_nicolson_conserves_the_weighted_norm(q in -3.0..3.0f64, a in -0.5..0.5f64, c in -0.5..0.5f64) {
        let cfg = FdConfig { half_width: 40.0, h: 4e-3, dt: 4e-4, final_time: 0.1, startup_steps: 0, ..FdConfig::default() };
        let run = fd_run(&InitialProfile::gaussian(c, 1.0, 1.0).unwrap(), &PotentialParams { q, a }, &cfg, &[0.1]).unwrap();
        let n0 = run.norms[0];
        for n in &run.norms {
            prop_assert!((n - n0).abs() <= 1e-11 * n0);
        }
    }
}

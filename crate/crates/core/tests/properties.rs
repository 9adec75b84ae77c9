//! Randomized invariants: algebraic identities and inequalities that must
//! hold for every band-limited field, not just hand-picked examples.

use num_complex::Complex64;
use proptest::prelude::*;
use sgl_core::dynamics::nonlinearity;
use sgl_core::ergodic::{mdp_functional, rate_fit, sigma2_batch_means, Observable};
use sgl_core::lyapunov::psi;
use sgl_core::noise::ou_increment_scale;
use sgl_core::spectral::{eigenvalue, SpectralField};

fn field(max_m: usize) -> impl Strategy<Value = SpectralField> {
    (1..=max_m).prop_flat_map(|m| {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), m).prop_map(|pairs| {
            SpectralField::from_coeffs(
                pairs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(),
            )
        })
    })
}

fn field_pair(max_m: usize) -> impl Strategy<Value = (SpectralField, SpectralField)> {
    (1..=max_m).prop_flat_map(|m| {
        let coeffs = || proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), m);
        (coeffs(), coeffs()).prop_map(|(a, b)| {
            let build = |pairs: Vec<(f64, f64)>| {
                SpectralField::from_coeffs(
                    pairs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(),
                )
            };
            (build(a), build(b))
        })
    })
}

proptest! {
    #[test]
    fn csv_rows_round_trip(x in field(24)) {
        let back = SpectralField::from_csv_row(&x.to_csv_row()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn json_round_trips(x in field(24)) {
        let json = serde_json::to_string(&x).unwrap();
        let back: SpectralField = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn projection_is_idempotent_and_contracts(x in field(24), keep in 1usize..24) {
        prop_assume!(keep <= x.cutoff());
        let once = x.project(keep).unwrap();
        let twice = once.project(keep).unwrap();
        prop_assert_eq!(&twice, &once);
        prop_assert!(once.norm_h() <= x.norm_h() * (1.0 + 1e-12));
        prop_assert!(once.norm_v() <= x.norm_v() * (1.0 + 1e-12));
    }

    #[test]
    fn psi_is_one_lipschitz((x, y) in field_pair(16), big_m in 0.1f64..10.0) {
        let gap = (psi(&x, big_m) - psi(&y, big_m)).abs();
        prop_assert!(
            gap <= x.sub(&y).norm_h() + 1e-12,
            "psi gap {} exceeds the H distance {}",
            gap,
            x.sub(&y).norm_h()
        );
    }

    #[test]
    fn poincare_l4_and_pairing_inequalities(x in field(24)) {
        let gamma1 = eigenvalue(1).unwrap();
        prop_assert!(gamma1 * x.norm_h_sq() <= x.norm_v_sq() * (1.0 + 1e-12));

        let l4 = x.norm_l4();
        prop_assert!(
            l4.powi(4) <= x.norm_v_sq() * x.norm_h_sq() * (1.0 + 1e-8),
            "L4^4 = {} vs V^2 H^2 = {}",
            l4.powi(4),
            x.norm_v_sq() * x.norm_h_sq()
        );

        let pairing = x.inner_h(&nonlinearity(&x, true).unwrap());
        let scale = 1.0 + x.norm_h_sq() * x.norm_h_sq();
        prop_assert!(
            pairing <= 0.25 + 1e-10 * scale,
            "<x, N(x)> = {pairing} breaks the 1/4 ceiling"
        );
    }

    #[test]
    fn semigroup_composes_and_contracts(x in field(16), s in 0.0f64..0.1, t in 0.0f64..0.1) {
        let both = x.apply_semigroup(s).unwrap().apply_semigroup(t).unwrap();
        let joint = x.apply_semigroup(s + t).unwrap();
        prop_assert!(both.sub(&joint).norm_h() <= 1e-12 * (1.0 + x.norm_h()));

        let gamma1 = eigenvalue(1).unwrap();
        prop_assert!(
            joint.norm_h() <= (-gamma1 * (s + t)).exp() * x.norm_h() * (1.0 + 1e-12),
            "semigroup must contract at least at the spectral-gap rate"
        );
    }

    #[test]
    fn ou_scale_is_monotone_and_capped(
        k in 1usize..64,
        h_low in 1e-4f64..0.1,
        bump in 1.01f64..10.0,
        alpha in 1.05f64..1.99,
    ) {
        let gamma = eigenvalue(k as i64).unwrap();
        let lo = ou_increment_scale(gamma, h_low, alpha).unwrap();
        let hi = ou_increment_scale(gamma, h_low * bump, alpha).unwrap();
        if alpha * gamma * h_low * bump < 30.0 {
            prop_assert!(lo < hi, "scale must grow with the step: {lo} vs {hi}");
        } else {
            // Stiff regime: both scales sit at the stationary value to the
            // last bit, so only weak monotonicity is decidable.
            prop_assert!(lo <= hi);
        }
        let stationary = (alpha * gamma).powf(-1.0 / alpha);
        prop_assert!(hi <= stationary * (1.0 + 1e-12));
    }

    #[test]
    fn physical_round_trip_is_lossless(x in field(16)) {
        let n = 4 * x.cutoff().max(2);
        let samples = x.to_physical(n).unwrap();
        let back = SpectralField::from_physical(&samples, x.cutoff()).unwrap();
        prop_assert!(back.sub(&x).norm_h() <= 1e-12 * (1.0 + x.norm_h()));
    }

    #[test]
    fn mdp_functional_halves_under_level_doubling(
        series in proptest::collection::vec(-5.0f64..5.0, 64..200),
        kappa in 0.05f64..0.45,
        pi_hat in -1.0f64..1.0,
    ) {
        let full = mdp_functional(&series, 0.01, pi_hat, kappa, 1.0).unwrap();
        let doubled = mdp_functional(&series, 0.01, pi_hat, kappa, 2.0).unwrap();
        prop_assert_eq!(doubled, full / 2.0, "doubling b must halve the functional exactly");
    }

    #[test]
    fn rate_fit_rho_ignores_observable_rescaling(
        rate in 0.5f64..5.0,
        amp in 0.1f64..10.0,
        c in 0.01f64..100.0,
    ) {
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let gaps: Vec<f64> = times.iter().map(|t| amp * (-rate * t).exp() + 1e-12 * amp).collect();
        let scaled: Vec<f64> = gaps.iter().map(|g| c * g).collect();
        let base = rate_fit(&times, &gaps, 2.0).unwrap();
        let rescaled = rate_fit(&times, &scaled, 2.0).unwrap();
        prop_assert!(
            (base.rho - rescaled.rho).abs() <= 1e-9 * base.rho,
            "rho changed under f -> c f: {} vs {}",
            base.rho,
            rescaled.rho
        );
    }

    #[test]
    fn batch_means_variance_ignores_level_shifts(
        series in proptest::collection::vec(-1.0f64..1.0, 600..900),
        shift in -50.0f64..50.0,
    ) {
        let base = sigma2_batch_means(&series, 0.01, 10).unwrap();
        let shifted: Vec<f64> = series.iter().map(|v| v + shift).collect();
        let moved = sigma2_batch_means(&shifted, 0.01, 10).unwrap();
        prop_assert!(
            (base - moved).abs() <= 1e-6 * (1.0 + base),
            "centering must absorb constant shifts: {base} vs {moved}"
        );
    }

    #[test]
    fn clipping_caps_and_preserves_small_values(x in field(12), clip in 0.0f64..2.0) {
        let raw = Observable::NormHSquared.eval(&x).unwrap();
        let capped = Observable::NormHSquared.clipped(clip).eval(&x).unwrap();
        prop_assert_eq!(capped, raw.min(clip));
    }
}

//! End-to-end acceptance suite. Every test prints exactly one
//! `[acceptance] criterion NN ...: PASS|FAIL (details)` line before
//! asserting, so `cargo test --test acceptance -- --nocapture` shows the
//! full scoreboard even when something trips.

use rand::Rng;
use sgl_core::control::{gronwall_gap, synthesize, verify_reachability};
use sgl_core::dynamics::{nonlinearity, ou_path, SimParams};
use sgl_core::ergodic::{
    irreducibility_probe, mdp_functional, mdp_tail_check, observable_series, rate_fit,
    run_ensemble, Observable,
};
use sgl_core::lyapunov::{choose_level, drift_report, generator_mc_check, psi};
use sgl_core::noise::{
    maximal_statistic_mc, ou_increment_scale, sample_standard_stable, NoiseSpectrum, OuStepper,
};
use sgl_core::rng::RngStream;
use sgl_core::spectral::{eigenvalue, SpectralField};
use sgl_core::stats::{empirical_cf, ks_distance, linear_fit, median, variance};
use sgl_core::Error;

fn verdict(number: u32, name: &str, pass: bool, details: &str) {
    let flag = if pass { "PASS" } else { "FAIL" };
    println!("[acceptance] criterion {number:02} {name}: {flag} ({details})");
    assert!(pass, "criterion {number:02} {name}: {details}");
}

/// Band-limited field with a random spectral tilt and a log-uniform V-norm
/// in `[1e-4 v_max, v_max]`. The log-uniform radius matters: the extremal
/// configurations of the fitted inequalities sit at small norms (e.g. the
/// `|AN(x)|_H` ratio peaks near `|Ax|_H = 1`), and a uniform radius would
/// leave that region essentially unsampled, making the fitted maximum a
/// noisy quantile instead of a stable edge.
fn random_band_field<R: Rng>(m: usize, v_max: f64, rng: &mut R) -> SpectralField {
    let tilt = rng.gen_range(0.5..2.5);
    let coeffs: Vec<num_complex::Complex64> = (1..=m)
        .map(|k| {
            let damp = (k as f64).powf(-tilt);
            num_complex::Complex64::new(
                damp * rng.gen_range(-1.0..1.0),
                damp * rng.gen_range(-1.0..1.0),
            )
        })
        .collect();
    let x = SpectralField::from_coeffs(coeffs);
    let target = v_max * 10f64.powf(rng.gen_range(-4.0..0.0));
    x.scale(target / x.norm_v())
}

/// Random direction with mildly decaying modes, as used by the drift
/// subcommand's state sampler.
fn random_direction<R: Rng>(m: usize, rng: &mut R) -> SpectralField {
    let coeffs: Vec<num_complex::Complex64> = (1..=m)
        .map(|k| {
            let damp = (k as f64).powf(-1.5);
            num_complex::Complex64::new(
                damp * rng.gen_range(-0.5..0.5),
                damp * rng.gen_range(-0.5..0.5),
            )
        })
        .collect();
    SpectralField::from_coeffs(coeffs)
}

#[test]
fn criterion_01_stable_sampler_matches_the_target_law() {
    let thetas = [0.5, 1.0, 2.0];
    let n = 1_000_000usize;
    let mut worst = 0.0f64;
    let mut worst_at = (0.0f64, 0.0f64);
    for (i, &alpha) in [1.6f64, 1.8, 1.95].iter().enumerate() {
        let mut rng = RngStream::new(1101, i as u64).scalar_rng();
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_standard_stable(alpha, &mut rng).expect("alpha in range"))
            .collect();
        for &theta in &thetas {
            let err = (empirical_cf(&draws, theta) - (-theta.powf(alpha)).exp()).abs();
            if err > worst {
                worst = err;
                worst_at = (alpha, theta);
            }
        }
    }
    let mut rng = RngStream::new(1101, 3).scalar_rng();
    let gauss: Vec<f64> = (0..n)
        .map(|_| sample_standard_stable(2.0, &mut rng).expect("alpha = 2 is the Gaussian edge"))
        .collect();
    let var = variance(&gauss);

    let pass = worst < 0.005 && (var - 2.0).abs() < 0.02;
    verdict(
        1,
        "stable sampler law",
        pass,
        &format!(
            "max CF error {worst:.2e} at (alpha, theta) = ({}, {}); alpha = 2 variance {var:.4}",
            worst_at.0, worst_at.1
        ),
    );
}

#[test]
fn criterion_02_exact_ou_step_marginal_and_composition() {
    let alpha = 1.8;
    let spec = NoiseSpectrum::new(alpha, 0.8, 1).expect("admissible");
    let h = 0.01;
    let n = 100_000usize;
    // Re + Im of the mode-1 increment after one step from zero: the sum of
    // the two independent components carries exactly the nominal scale
    // beta_1 ((1 - e^{-alpha gamma_1 h}) / (alpha gamma_1))^{1/alpha}.
    let gamma_1 = eigenvalue(1).expect("mode 1");
    let scale = spec.amplitude(1) * ou_increment_scale(gamma_1, h, alpha).expect("scale");

    let stepper = OuStepper::new(&spec, h).expect("stepper");
    let mut rngs = RngStream::new(1102, 0).mode_rngs(1);
    let mut one_step = Vec::with_capacity(n);
    for _ in 0..n {
        let mut z = SpectralField::zero(1);
        stepper.step(&mut z, &mut rngs).expect("step");
        let c = z.mode(1);
        one_step.push(c.re + c.im);
    }

    let mut scalar = RngStream::new(1103, 0).scalar_rng();
    let reference: Vec<f64> = (0..n)
        .map(|_| scale * sample_standard_stable(alpha, &mut scalar).expect("draw"))
        .collect();
    let ks_marginal = ks_distance(&one_step, &reference).expect("ks");

    let half = OuStepper::new(&spec, h / 2.0).expect("half stepper");
    let mut rngs2 = RngStream::new(1104, 0).mode_rngs(1);
    let mut two_half = Vec::with_capacity(n);
    for _ in 0..n {
        let mut z = SpectralField::zero(1);
        half.step(&mut z, &mut rngs2).expect("half step");
        half.step(&mut z, &mut rngs2).expect("half step");
        let c = z.mode(1);
        two_half.push(c.re + c.im);
    }
    let ks_split = ks_distance(&one_step, &two_half).expect("ks");

    let pass = ks_marginal < 0.01 && ks_split < 0.01;
    verdict(
        2,
        "exact OU step",
        pass,
        &format!("KS vs scaled stable law {ks_marginal:.4}, KS one step vs two half-steps {ks_split:.4}, scale {scale:.5e}"),
    );
}

#[test]
fn criterion_03_convolution_sup_growth_stays_subcritical() {
    let alpha = 1.8;
    let spec = NoiseSpectrum::new(alpha, 0.8, 32).expect("admissible");
    let horizons = [1.0f64, 2.0, 4.0, 8.0, 16.0];
    let bound = 1.0 / alpha + 0.15;
    let mut pass = true;
    let mut details = String::new();
    for &theta in &[0.0, 0.2] {
        let mut ln_t = Vec::new();
        let mut ln_s = Vec::new();
        for (i, &t) in horizons.iter().enumerate() {
            let s = maximal_statistic_mc(&spec, theta, 1.0, t, 0.01, 1000, 1105 + i as u64)
                .expect("statistic");
            ln_t.push(t.ln());
            ln_s.push(s.ln());
        }
        let fit = linear_fit(&ln_t, &ln_s).expect("fit");
        pass &= fit.slope <= bound;
        details.push_str(&format!("theta = {theta}: slope {:.4}; ", fit.slope));
    }
    details.push_str(&format!("bound p/alpha + 0.15 = {bound:.4}"));
    verdict(3, "sup-norm growth exponent", pass, &details);
}

#[test]
fn criterion_04_energy_inequalities_hold_on_random_fields() {
    let m = 64;
    let mut rng = RngStream::new(1106, 0).scalar_rng();
    let fields: Vec<SpectralField> =
        (0..1000).map(|_| random_band_field(m, 10.0, &mut rng)).collect();

    // Interpolation bound |x|_L4^4 <= |x|_V^2 |x|_H^2, checked per field.
    let mut l4_violations = 0usize;
    // Dissipativity pairing <x, N(x)> <= 1/4, exact for the dealiased product.
    let mut pairing_violations = 0usize;
    let mut max_pairing = f64::NEG_INFINITY;
    for x in &fields {
        let lhs = x.norm_l4().powi(4);
        let rhs = x.norm_v_sq() * x.norm_h_sq();
        if lhs > rhs * (1.0 + 1e-8) {
            l4_violations += 1;
        }
        let pairing = x.inner_h(&nonlinearity(x, true).expect("cube"));
        max_pairing = max_pairing.max(pairing);
        if pairing > 0.25 + 1e-10 {
            pairing_violations += 1;
        }
    }

    // Fit the nonlinearity growth constants on these fields, then verify
    // them with a 10% slack on a freshly drawn batch of the same size.
    let ratio_nv = |x: &SpectralField| {
        let n = nonlinearity(x, true).expect("cube");
        n.norm_v() / (x.norm_v() + x.norm_v().powi(3))
    };
    let ratio_nah = |x: &SpectralField| {
        let n = nonlinearity(x, true).expect("cube");
        let an = n.apply_fractional_power(1.0).expect("finite power");
        let ax = x.apply_fractional_power(1.0).expect("finite power");
        an.norm_h() / ((1.0 + x.norm_v_sq()) * (1.0 + ax.norm_h_sq()))
    };
    let c_nv = fields.iter().map(&ratio_nv).fold(0.0f64, f64::max);
    let c_nah = fields.iter().map(&ratio_nah).fold(0.0f64, f64::max);
    let held: Vec<SpectralField> =
        (0..1000).map(|_| random_band_field(m, 10.0, &mut rng)).collect();
    let nv_violations = held.iter().filter(|x| ratio_nv(x) > 1.1 * c_nv).count();
    let nah_violations = held.iter().filter(|x| ratio_nah(x) > 1.1 * c_nah).count();

    let pass = l4_violations == 0
        && pairing_violations == 0
        && c_nv <= 10.0
        && nv_violations == 0
        && nah_violations == 0;
    verdict(
        4,
        "inequality suite",
        pass,
        &format!(
            "L4 violations {l4_violations}, pairing violations {pairing_violations} (max pairing {max_pairing:.4}), fitted C_NV {c_nv:.3} (held-out violations {nv_violations}), fitted C_NAH {c_nah:.3} (held-out violations {nah_violations})"
        ),
    );
}

#[test]
fn criterion_05_control_reaches_band_limited_targets() {
    let eps = 0.05;
    let t_final = 1.0;
    let h = 1e-4;
    let build_target = |m: usize, second: bool| {
        if second {
            SpectralField::harmonic_sine(m, 1, 0.2).add(&SpectralField::harmonic_sine(m, 2, 0.1))
        } else {
            SpectralField::harmonic_sine(m, 1, 0.3)
        }
    };

    let mut pass = true;
    let mut details = String::new();
    for second in [false, true] {
        let mut sups = Vec::new();
        let mut err32 = f64::NAN;
        let mut t0 = f64::NAN;
        for m in [32usize, 64] {
            let x0 = SpectralField::zero(m);
            let target = build_target(m, second);
            let plan = synthesize(&x0, &target, t_final, eps, h, true).expect("plan");
            let report = verify_reachability(&plan).expect("verify");
            let sup_u = plan.controls.iter().map(SpectralField::norm_v).fold(0.0f64, f64::max);
            sups.push(sup_u);
            if m == 32 {
                err32 = report.final_gap_v;
                t0 = plan.t_switch;
                pass &= report.final_gap_v < eps;
            }
        }
        let drift = (sups[1] - sups[0]).abs() / sups[0];
        pass &= sups.iter().all(|s| s.is_finite()) && drift <= 0.10 && (t0 - 0.5).abs() < 1e-12;
        details.push_str(&format!(
            "target {}: terminal V-error {err32:.4} (eps {eps}), t0 {t0}, sup |u|_V {:.2}, m-doubling drift {:.2}%; ",
            if second { "two-mode" } else { "one-mode" },
            sups[0],
            100.0 * drift
        ));
    }
    verdict(5, "reachability", pass, details.trim_end_matches("; "));
}

#[test]
fn criterion_06_stability_constant_transfers_to_held_out_pairs() {
    let m = 32;
    let h = 1e-3;
    let n_steps = 500; // T = 0.5
    let spec = NoiseSpectrum::new(1.8, 0.8, m).expect("admissible");
    let x0 = SpectralField::harmonic_sine(m, 1, 0.3);

    // Each pair perturbs a fresh stochastic forcing path by a deterministic
    // bump; fifteen (amplitude, profile) combinations cycle through the pairs
    // so the fitted constant is probed across a 3.5-decade ratio range rather
    // than at a single operating point. Amplitudes are V-norm sizes.
    let deltas = [0.05f64, 0.089, 0.158, 0.281, 0.5];
    let profiles = [
        SpectralField::harmonic_sine(m, 1, 1.0),
        SpectralField::harmonic_sine(m, 2, 1.0),
        SpectralField::harmonic_sine(m, 1, 1.0).add(&SpectralField::harmonic_sine(m, 3, 0.5)),
    ];
    let bumps: Vec<SpectralField> = (0..15)
        .map(|j| {
            let p = &profiles[j % 3];
            p.scale(deltas[j / 3] / p.norm_v())
        })
        .collect();

    let pair = |traj: u64| {
        let mut rngs = RngStream::new(1107, traj).mode_rngs(m);
        let z = ou_path(&spec, h, n_steps, &mut rngs).expect("forcing path");
        let bump = &bumps[(traj % 15) as usize];
        let z_bumped: Vec<SpectralField> = z.iter().map(|f| f.add(bump)).collect();
        gronwall_gap(&x0, &z_bumped, &z, h, true).expect("gap")
    };

    let c_t = (0..100u64).map(|j| { let g = pair(j); g.lhs / g.rhs }).fold(0.0f64, f64::max);
    let mut violations = 0usize;
    let mut worst_held = 0.0f64;
    for j in 100..200u64 {
        let g = pair(j);
        worst_held = worst_held.max(g.lhs / g.rhs);
        if g.lhs > 1.1 * c_t * g.rhs {
            violations += 1;
        }
    }
    let pass = violations == 0;
    verdict(
        6,
        "pathwise stability bound",
        pass,
        &format!("fitted C_T {c_t:.4e}, worst held-out ratio {worst_held:.4e}, violations {violations}/100"),
    );
}

#[test]
fn criterion_07_drift_certificate_holds_on_sphere_and_core() {
    let spec = NoiseSpectrum::new(1.8, 0.8, 64).expect("admissible");
    let cert = choose_level(&spec).expect("level");
    let two_m = 2.0 * cert.big_m;
    let mut rng = RngStream::new(1108, 0).scalar_rng();

    let mut sphere_violations = 0usize;
    let mut min_sphere = f64::INFINITY;
    for _ in 0..1000 {
        let dir = random_direction(64, &mut rng);
        let x = dir.scale((two_m / dir.norm_v_sq()).sqrt());
        let r = drift_report(&x, &spec, cert.big_m).expect("report");
        min_sphere = min_sphere.min(r.ratio_lower);
        if r.ratio_lower < 0.25 {
            sphere_violations += 1;
        }
    }

    let mut core_violations = 0usize;
    let mut min_core = f64::INFINITY;
    for _ in 0..1000 {
        let dir = random_direction(64, &mut rng);
        let radial = rng.gen::<f64>();
        let x = dir.scale(radial * (two_m / dir.norm_v_sq()).sqrt());
        let r = drift_report(&x, &spec, cert.big_m).expect("report");
        assert!(r.in_k, "V-ball of radius sqrt(2M) sits inside K: |x|_H^2 = {}", x.norm_h_sq());
        min_core = min_core.min(r.ratio_lower);
        if r.ratio_lower < -0.25 {
            core_violations += 1;
        }
    }

    let pass = sphere_violations == 0 && core_violations == 0;
    verdict(
        7,
        "drift certificate",
        pass,
        &format!(
            "M = {}, sphere violations {sphere_violations} (min ratio {min_sphere:.4}), core violations {core_violations} (min ratio {min_core:.4})",
            cert.big_m
        ),
    );
}

#[test]
fn criterion_08_generator_estimate_respects_the_analytic_bound() {
    let spec = NoiseSpectrum::new(1.8, 0.8, 64).expect("admissible");
    let big_m = choose_level(&spec).expect("level").big_m;
    let mut pass = true;
    let mut details = String::new();
    for (label, x) in [
        ("origin", SpectralField::zero(64)),
        ("half-sine", SpectralField::harmonic_sine(64, 1, 0.5)),
    ] {
        let check = generator_mc_check(&x, &spec, big_m, 1e-3, 10_000, 20, 1109, true)
            .expect("generator probe");
        pass &= check.passes;
        details.push_str(&format!(
            "{label}: MC {:.4} vs bound {:.4} (se {:.4}); ",
            check.mc_estimate, check.analytic_bound, check.std_error
        ));
    }
    verdict(8, "generator consistency", pass, details.trim_end_matches("; "));
}

#[test]
fn criterion_09_noise_reaches_a_target_neighborhood() {
    let m = 64;
    let spec = NoiseSpectrum::new(1.8, 0.8, m).expect("admissible");
    let params = SimParams { h: 1e-3, t_horizon: 1.0, dealias: true };
    let target = SpectralField::harmonic_sine(m, 1, 0.3);
    let outcomes = irreducibility_probe(
        &[SpectralField::zero(m)],
        &target,
        0.25,
        &spec,
        &params,
        10_000,
        1110,
        0.95,
    )
    .expect("probe");
    let o = &outcomes[0];
    let pass = o.lower_bound > 0.0;
    verdict(
        9,
        "irreducibility probe",
        pass,
        &format!(
            "{}/{} terminal hits, 95% lower bound {:.4}, overflows {}",
            o.hits, o.n_paths, o.lower_bound, o.overflows
        ),
    );
}

#[test]
fn criterion_10_ensemble_gap_decays_geometrically() {
    let m = 64;
    let spec = NoiseSpectrum::new(1.8, 0.8, m).expect("admissible");
    let params = SimParams { h: 1e-3, t_horizon: 10.0, dealias: true };
    let f = Observable::NormHSquared.clipped(10.0);
    let x0_a = SpectralField::zero(m);
    let x0_b = SpectralField::harmonic_sine(m, 1, 0.5);
    let seed = 1111u64;
    let a = run_ensemble(&x0_a, &spec, &params, f, 2, 500, 10, seed).expect("ensemble A");
    let b = run_ensemble(&x0_b, &spec, &params, f, 2, 500, 10, seed.wrapping_add(1))
        .expect("ensemble B");

    let gaps: Vec<f64> =
        a.mean.iter().zip(&b.mean).map(|(u, v)| (u - v).abs()).collect();
    let big_m = choose_level(&spec).expect("level").big_m;
    let scale = psi(&x0_a, big_m) + psi(&x0_b, big_m);
    let fit = rate_fit(&a.times, &gaps, scale).expect("fit");

    let pass = fit.rho < 1.0 && fit.r_squared > 0.8;
    verdict(
        10,
        "ergodic rate",
        pass,
        &format!(
            "rho {:.3e}, R^2 {:.4}, {} points above floor {:.2e}, overflows {}+{}",
            fit.rho, fit.r_squared, fit.n_used, fit.floor, a.overflows, b.overflows
        ),
    );
}

#[test]
fn criterion_11_mdp_functional_scaling_and_tails() {
    let m = 32;
    let spec = NoiseSpectrum::new(1.8, 0.8, m).expect("admissible");
    let h = 0.02;
    let kappa = 0.25;
    // Clip at the bulk scale (~10x the typical squared norm) so every path
    // samples the observable's full range: with a clip far above the state
    // scale the occupation mean is carried by jumps too rare for desk-scale
    // horizons and the functional's median is still climbing toward its
    // asymptotic decay at these horizons.
    let f = Observable::NormHSquared.clipped(1e-3);
    let x0 = SpectralField::zero(m);
    let seed = 1112u64;

    // Calibration: one long run pins the occupation mean.
    let cal = SimParams { h, t_horizon: 400.0, dealias: true };
    let series0 = observable_series(&x0, &spec, &cal, f, seed, 0).expect("calibration");
    let n_cal = cal.n_steps().expect("whole");
    let n_burn = (0.2 * n_cal as f64).floor() as usize;
    let tail = &series0[n_burn..];
    let pi_hat = tail[..tail.len() - 1].iter().sum::<f64>() / (tail.len() - 1) as f64;

    // Exact halving under b -> 2b on a real trajectory.
    let m_one = mdp_functional(&series0[..=1024], h, pi_hat, kappa, 1.0).expect("functional");
    let m_two = mdp_functional(&series0[..=1024], h, pi_hat, kappa, 2.0).expect("functional");
    let halving_exact = m_two == 0.5 * m_one;

    // Ensemble medians across dyadic horizons.
    let horizons = [64usize, 128, 256, 512, 1024];
    let params = SimParams { h, t_horizon: 1024.0 * h, dealias: true };
    let n_paths = 800usize;
    let mut per_horizon: Vec<Vec<f64>> = vec![Vec::with_capacity(n_paths); horizons.len()];
    let mut overflows = 0usize;
    for traj in 0..n_paths as u64 {
        let series = match observable_series(&x0, &spec, &params, f, seed.wrapping_add(1), traj) {
            Ok(s) => s,
            Err(Error::Overflow { .. }) => {
                overflows += 1;
                continue;
            }
            Err(e) => panic!("ensemble path failed: {e}"),
        };
        for (j, &nt) in horizons.iter().enumerate() {
            let v = mdp_functional(&series[..=nt], h, pi_hat, kappa, 1.0).expect("functional");
            per_horizon[j].push(v.abs());
        }
    }
    assert!(overflows < 100, "overflow guard dropped {overflows} of {n_paths} paths");
    let medians: Vec<f64> = per_horizon.iter().map(|v| median(v)).collect();
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);

    // Tail rates against the closed-form Gaussian oracle: samples of
    // N(0, (sigma/b)^2) must reproduce -ln 2*Phi-bar(c b) / b^2 within a
    // factor of two of the quadratic rate c^2/2.
    let sigma = 0.7;
    let b = 3.0;
    let mut g = RngStream::new(1113, 0).scalar_rng();
    let samples: Vec<f64> = (0..2_000_000)
        .map(|_| {
            let unit = sample_standard_stable(2.0, &mut g).expect("gaussian") / 2.0f64.sqrt();
            sigma / b * unit
        })
        .collect();
    let ratios = mdp_tail_check(&samples, sigma * sigma, b, &[0.5, 1.0, 1.5]).expect("tails");
    let tails_ok = ratios.iter().all(|r| r.ratio >= 0.5 && r.ratio <= 2.0);

    let pass = halving_exact && decreasing && tails_ok;
    verdict(
        11,
        "MDP scaling",
        pass,
        &format!(
            "halving exact {halving_exact}; medians {:?} decreasing {decreasing}; synthetic tail ratios {:?} in [0.5, 2] {tails_ok}",
            medians.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>(),
            ratios.iter().map(|r| format!("{:.3}", r.ratio)).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_12_reruns_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_sgl");
    let dir = tempfile::tempdir().expect("tempdir");
    let configs = [
        (
            "simulate",
            r#"{"noise": {"m": 16}, "sim": {"h": 0.001, "t": 0.05}}"#,
            vec!["trajectory.csv", "summary.json"],
        ),
        (
            "drift",
            r#"{"noise": {"m": 16}, "drift": {"n_samples": 60}}"#,
            vec!["drift.csv", "summary.json"],
        ),
        (
            "ergodic",
            r#"{"noise": {"m": 8}, "sim": {"h": 0.01, "t": 1.0}, "ergodic": {"n_paths": 60, "n_blocks": 6}}"#,
            vec!["ensemble.csv", "summary.json"],
        ),
        (
            "mdp",
            r#"{"noise": {"m": 8}, "sim": {"h": 0.02, "t": 1.28}, "mdp": {"n_paths": 120, "n_batches": 10, "t_calibrate": 12.8}}"#,
            vec!["mdp.csv", "summary.json"],
        ),
    ];

    let mut pass = true;
    let mut details = String::new();
    for (sub, cfg, files) in &configs {
        let cfg_path = dir.path().join(format!("{sub}.json"));
        std::fs::write(&cfg_path, cfg).expect("write config");
        let mut outs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{sub}-{run}"));
            let status = std::process::Command::new(bin)
                .args([
                    sub,
                    "--config",
                    cfg_path.to_str().unwrap(),
                    "--seed",
                    "7",
                    "--threads",
                    "1",
                    "--out",
                    out.to_str().unwrap(),
                ])
                .status()
                .expect("spawn");
            assert!(status.success(), "{sub} run {run} exited with {status}");
            outs.push(out);
        }
        let mut sub_ok = true;
        for file in files {
            let a = std::fs::read(outs[0].join(file)).expect("first output");
            let b = std::fs::read(outs[1].join(file)).expect("second output");
            if a != b {
                pass = false;
                sub_ok = false;
                details.push_str(&format!("{sub}/{file} differs; "));
            }
        }
        if sub_ok {
            details.push_str(&format!("{sub} ok; "));
        }
    }
    verdict(12, "reproducibility", pass, details.trim_end_matches("; "));
}

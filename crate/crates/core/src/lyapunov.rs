//! Drift certificate for the Lyapunov function `Psi(x) = (M + |x|_H^2)^{1/2}`.
//!
//! Applying the generator to `Psi` splits into four pieces, each bounded in
//! closed form:
//!
//! * `J1 = -|x|_V^2 / Psi` — linear drift, exact;
//! * `J2 <= 1 / (4 Psi)` — nonlinear drift, from `<x, N(x)> <= 1/4`;
//! * `J3 <= (2 c_alpha S2 / (2 - alpha)) / Psi` — compensated small jumps,
//!   second moment of `nu` on `|y| <= 1` times `S2 = sum beta_k^2` (both
//!   conjugate modes counted);
//! * `J4 <= 2 c_alpha S1 / (alpha - 1)` — large jumps, first moment of `nu`
//!   on `|y| > 1` times `S1 = sum beta_k`, using that `Psi` is 1-Lipschitz.
//!
//! Dividing by `Psi` and using `Psi^2 >= M` gives the level condition
//!
//! `f(M) = 1/(4M) + 2 c_alpha S2 / ((2 - alpha) M)
//!        + 2 c_alpha S1 / ((alpha - 1) sqrt(M)) <= 1/4`,
//!
//! under which `-L Psi / Psi >= 1/4` outside `K = {|x|_H^2 <= M}` (the
//! `|x|_V^2 / Psi^2` term then contributes at least `gamma_1 / 2 >> 1/4`)
//! and `>= -1/4` everywhere. [`choose_level`] picks the smallest dyadic `M`.
//!
//! The per-component bookkeeping here counts both conjugate modes at full
//! amplitude `beta_k`; the simulated splitting carries `2^{-1/alpha} beta_k`
//! per real component, so these bounds upper-bound the simulated generator
//! with room to spare.

use crate::dynamics::SplitStepper;
use crate::error::Error;
use crate::noise::NoiseSpectrum;
use crate::rng::RngStream;
use crate::spectral::SpectralField;
use crate::{stats, Result};
use rayon::prelude::*;
use std::f64::consts::PI;

/// `Psi(x) = (M + |x|_H^2)^{1/2}`. Requires `M > 0`.
pub fn psi(x: &SpectralField, big_m: f64) -> f64 {
    assert!(
        big_m > 0.0 && big_m.is_finite(),
        "Lyapunov level must be positive and finite, got {big_m}"
    );
    (big_m + x.norm_h_sq()).sqrt()
}

/// `2 sum_{k>=1} gamma_k^{-q}` for the full mode ladder, truncated at
/// `n_terms` with a three-term tail correction whose omitted remainder is
/// negative — the result is a (very tight) upper bound. Converges for
/// `q > 1/2`.
pub fn spectral_weight_sum(q: f64, n_terms: usize) -> Result<f64> {
    if !q.is_finite() || q <= 0.5 {
        return Err(Error::invalid(
            "q",
            q,
            "weight sum 2 sum gamma_k^-q needs q > 1/2",
        ));
    }
    if n_terms < 1 {
        return Err(Error::invalid("n_terms", 0.0, "need at least one term"));
    }
    let p = 2.0 * q; // gamma_k^-q = (4 pi^2)^-q k^-p
    let head: f64 = (1..=n_terms).map(|k| (k as f64).powf(-p)).sum();
    let n = n_terms as f64;
    let tail = n.powf(1.0 - p) / (p - 1.0) - n.powf(-p) / 2.0 + p * n.powf(-p - 1.0) / 12.0;
    Ok(2.0 * (4.0 * PI * PI).powf(-q) * (head + tail))
}

/// Amplitude sums of the noise ladder: `s1 = sum_k beta_k`,
/// `s2 = sum_k beta_k^2` over both conjugate mode families.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeSums {
    pub s1: f64,
    pub s2: f64,
    pub n_terms: usize,
}

/// Full-ladder sums for `spec` (zero for the noiseless spectrum), truncated
/// at `10 * cutoff` terms plus the tail correction.
pub fn amplitude_sums(spec: &NoiseSpectrum) -> Result<AmplitudeSums> {
    let n_terms = 10 * spec.cutoff();
    if spec.is_noiseless() {
        return Ok(AmplitudeSums { s1: 0.0, s2: 0.0, n_terms });
    }
    Ok(AmplitudeSums {
        s1: spectral_weight_sum(spec.decay(), n_terms)?,
        s2: spectral_weight_sum(2.0 * spec.decay(), n_terms)?,
        n_terms,
    })
}

/// `f(M)` of the module notes; the level certificate requires `f(M) <= 1/4`.
pub fn level_condition(spec: &NoiseSpectrum, big_m: f64) -> Result<f64> {
    if !big_m.is_finite() || big_m <= 0.0 {
        return Err(Error::invalid("big_m", big_m, "level must be > 0"));
    }
    let sums = amplitude_sums(spec)?;
    let small = spec.small_jump_second_moment();
    let large = spec.large_jump_first_moment();
    Ok(0.25 / big_m + small * sums.s2 / big_m + large * sums.s1 / big_m.sqrt())
}

/// Certified Lyapunov level and the quantities behind it.
#[derive(Debug, Clone, Copy)]
pub struct DriftCertificate {
    /// Smallest dyadic level with `f(M) <= 1/4`.
    pub big_m: f64,
    /// Slack `1/4 - f(M)` at the chosen level.
    pub margin: f64,
    pub sums: AmplitudeSums,
}

/// Scans `M = 1, 2, 4, ...` for the smallest level satisfying the
/// certificate condition.
pub fn choose_level(spec: &NoiseSpectrum) -> Result<DriftCertificate> {
    let sums = amplitude_sums(spec)?;
    let mut big_m = 1.0f64;
    loop {
        let f = level_condition(spec, big_m)?;
        if f <= 0.25 {
            return Ok(DriftCertificate {
                big_m,
                margin: 0.25 - f,
                sums,
            });
        }
        big_m *= 2.0;
        if big_m > 2f64.powi(60) {
            return Err(Error::InsufficientData {
                what: "drift certificate",
                detail: "no dyadic level up to 2^60 satisfies the condition".into(),
            });
        }
    }
}

/// Generator pieces at a state, the certified ratio, and the side of `K`.
#[derive(Debug, Clone, Copy)]
pub struct DriftReport {
    pub psi: f64,
    /// `-|x|_V^2 / Psi`, exact.
    pub j1_exact: f64,
    /// `1 / (4 Psi)`.
    pub j2_bound: f64,
    /// `(2 c_alpha S2 / (2 - alpha)) / Psi`.
    pub j3_bound: f64,
    /// `2 c_alpha S1 / (alpha - 1)`, state-independent.
    pub j4_bound: f64,
    /// Certified lower bound on `-L Psi / Psi` at this state.
    pub ratio_lower: f64,
    /// Whether `|x|_H^2 <= M`.
    pub in_k: bool,
}

impl DriftReport {
    /// Upper bound on `L Psi` at the state: `J1 + J2 + J3 + J4`.
    pub fn generator_upper_bound(&self) -> f64 {
        self.j1_exact + self.j2_bound + self.j3_bound + self.j4_bound
    }
}

/// Evaluates the four generator pieces and the certified ratio at `x`.
pub fn drift_report(x: &SpectralField, spec: &NoiseSpectrum, big_m: f64) -> Result<DriftReport> {
    if !big_m.is_finite() || big_m <= 0.0 {
        return Err(Error::invalid("big_m", big_m, "level must be > 0"));
    }
    let sums = amplitude_sums(spec)?;
    let psi_x = psi(x, big_m);
    let j1_exact = -x.norm_v_sq() / psi_x;
    let j2_bound = 0.25 / psi_x;
    let j3_bound = spec.small_jump_second_moment() * sums.s2 / psi_x;
    let j4_bound = spec.large_jump_first_moment() * sums.s1;
    let ratio_lower = -(j1_exact + j2_bound + j3_bound + j4_bound) / psi_x;
    Ok(DriftReport {
        psi: psi_x,
        j1_exact,
        j2_bound,
        j3_bound,
        j4_bound,
        ratio_lower,
        in_k: x.norm_h_sq() <= big_m,
    })
}

/// One-step Monte Carlo probe of the generator bound.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorCheck {
    /// Median-of-means estimate of `E[Psi(X_h) - Psi(x)] / h`.
    pub mc_estimate: f64,
    /// `std(block means) / sqrt(n_blocks)`.
    pub std_error: f64,
    /// `J1 + J2 + J3 + J4` at `x`.
    pub analytic_bound: f64,
    /// `mc_estimate <= analytic_bound + 3 std_error`.
    pub passes: bool,
}

/// Estimates `E[Psi(X_h) - Psi(x)] / h` over `n_samples` independent single
/// steps started at `x` and checks it against the analytic upper bound.
/// Median-of-means over `n_blocks` keeps heavy-tailed draws from dominating.
#[allow(clippy::too_many_arguments)]
pub fn generator_mc_check(
    x: &SpectralField,
    spec: &NoiseSpectrum,
    big_m: f64,
    h: f64,
    n_samples: usize,
    n_blocks: usize,
    seed: u64,
    dealias: bool,
) -> Result<GeneratorCheck> {
    if n_blocks < 2 {
        return Err(Error::invalid("n_blocks", n_blocks as f64, "need >= 2 blocks"));
    }
    if n_samples < 2 * n_blocks {
        return Err(Error::InsufficientData {
            what: "generator probe",
            detail: format!("{n_samples} samples cannot fill {n_blocks} blocks"),
        });
    }
    let report = drift_report(x, spec, big_m)?;
    let stepper = SplitStepper::new(spec, h, dealias)?;
    let psi_x = report.psi;

    let increments: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|traj| {
            let stream = RngStream::new(seed, traj as u64);
            let mut rngs = stream.mode_rngs(spec.cutoff());
            let mut y = x.clone();
            let mut z = SpectralField::zero(spec.cutoff());
            stepper.step(&mut y, &mut z, &mut rngs).expect("cutoffs agree");
            (psi(&y.add(&z), big_m) - psi_x) / h
        })
        .collect();

    let mc_estimate = stats::median_of_means(&increments, n_blocks)?;
    let blocks = stats::block_means(&increments, n_blocks);
    let std_error = stats::variance(&blocks).sqrt() / (n_blocks as f64).sqrt();
    let analytic_bound = report.generator_upper_bound();
    Ok(GeneratorCheck {
        mc_estimate,
        std_error,
        analytic_bound,
        passes: mc_estimate <= analytic_bound + 3.0 * std_error,
    })
}

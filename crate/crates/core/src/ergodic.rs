//! Long-run statistics: occupation averages, reachability probes,
//! contraction-rate fits, and moderate-deviation functionals.
//!
//! Time integrals are always left-endpoint Riemann sums on the simulation
//! grid, so an `n`-step run with step `h` integrates over exactly `n h` time
//! units. Ensemble work distributes trajectories over counter-derived
//! streams, which keeps every estimate independent of thread scheduling.

use crate::dynamics::{simulate_seeded, SimParams, SplitStepper};
use crate::error::Error;
use crate::noise::NoiseSpectrum;
use crate::rng::RngStream;
use crate::spectral::SpectralField;
use crate::{stats, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Scalar functions of the state used in time and ensemble averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    NormH,
    NormHSquared,
    NormV,
    NormL4,
    ModeRe(usize),
    ModeIm(usize),
}

impl Observable {
    pub fn eval(&self, x: &SpectralField) -> Result<f64> {
        match *self {
            Observable::NormH => Ok(x.norm_h()),
            Observable::NormHSquared => Ok(x.norm_h_sq()),
            Observable::NormV => Ok(x.norm_v()),
            Observable::NormL4 => Ok(x.norm_l4()),
            Observable::ModeRe(k) => {
                Self::check_mode(k, x.cutoff())?;
                Ok(x.mode(k).re)
            }
            Observable::ModeIm(k) => {
                Self::check_mode(k, x.cutoff())?;
                Ok(x.mode(k).im)
            }
        }
    }

    fn check_mode(k: usize, m: usize) -> Result<()> {
        if k < 1 || k > m {
            return Err(Error::Mismatch {
                what: "observable mode index vs cutoff",
                left: k,
                right: m,
            });
        }
        Ok(())
    }

    /// Stable name for CSV headers and summaries.
    pub fn name(&self) -> String {
        match *self {
            Observable::NormH => "norm_h".into(),
            Observable::NormHSquared => "norm_h_squared".into(),
            Observable::NormV => "norm_v".into(),
            Observable::NormL4 => "norm_l4".into(),
            Observable::ModeRe(k) => format!("mode_re_{k}"),
            Observable::ModeIm(k) => format!("mode_im_{k}"),
        }
    }

    /// Caps the observable at `clip`, the usual way to keep rare huge jump
    /// excursions from swamping ensemble means.
    pub fn clipped(self, clip: f64) -> ClippedObservable {
        ClippedObservable { base: self, clip: Some(clip) }
    }
}

/// An observable with an optional hard ceiling `f ∧ clip`. `clip: None`
/// evaluates the base observable unchanged, so every averaging routine
/// accepts a bare [`Observable`] via `Into`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClippedObservable {
    pub base: Observable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip: Option<f64>,
}

impl ClippedObservable {
    pub fn eval(&self, x: &SpectralField) -> Result<f64> {
        let v = self.base.eval(x)?;
        Ok(match self.clip {
            Some(c) => v.min(c),
            None => v,
        })
    }

    pub fn name(&self) -> String {
        match self.clip {
            Some(c) => format!("{}_clip_{c}", self.base.name()),
            None => self.base.name(),
        }
    }
}

impl From<Observable> for ClippedObservable {
    fn from(base: Observable) -> Self {
        ClippedObservable { base, clip: None }
    }
}

/// `f(X)` at every grid point of one trajectory (`n_steps + 1` values).
pub fn observable_series(
    x0: &SpectralField,
    spec: &NoiseSpectrum,
    params: &SimParams,
    observable: impl Into<ClippedObservable>,
    seed: u64,
    trajectory: u64,
) -> Result<Vec<f64>> {
    let observable = observable.into();
    let mut values = Vec::with_capacity(params.n_steps()? + 1);
    let mut collect = |_: usize, _: f64, x: &SpectralField, _: &SpectralField, _: f64| {
        values.push(observable.eval(x)?);
        Ok(())
    };
    simulate_seeded(x0, spec, params, seed, trajectory, &mut collect)?;
    Ok(values)
}

/// Left-endpoint time average `(T - t_burn)^{-1} int_{t_burn}^T f(X_s) ds`
/// along one trajectory. `burn_in` must be a whole number of steps strictly
/// inside the horizon.
#[allow(clippy::too_many_arguments)]
pub fn occupation_average(
    x0: &SpectralField,
    spec: &NoiseSpectrum,
    params: &SimParams,
    observable: impl Into<ClippedObservable>,
    burn_in: f64,
    seed: u64,
    trajectory: u64,
) -> Result<f64> {
    let observable = observable.into();
    let n_steps = params.n_steps()?;
    if !burn_in.is_finite() || burn_in < 0.0 {
        return Err(Error::invalid("burn_in", burn_in, "burn-in must be >= 0"));
    }
    let n_burn = (burn_in / params.h).round() as usize;
    if (n_burn as f64 * params.h - burn_in).abs() > 1e-9 * burn_in.max(1.0) {
        return Err(Error::invalid(
            "burn_in",
            burn_in,
            format!("burn-in must be a whole number of steps of h = {}", params.h),
        ));
    }
    if n_burn >= n_steps {
        return Err(Error::invalid(
            "burn_in",
            burn_in,
            "burn-in must leave at least one step of averaging window",
        ));
    }
    let mut acc = 0.0;
    let mut accumulate = |step: usize, _: f64, x: &SpectralField, _: &SpectralField, _: f64| {
        if step >= n_burn && step < n_steps {
            acc += observable.eval(x)?;
        }
        Ok(())
    };
    simulate_seeded(x0, spec, params, seed, trajectory, &mut accumulate)?;
    Ok(acc / (n_steps - n_burn) as f64)
}

/// Hit statistics of one initial state in a reachability probe.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeOutcome {
    pub hits: u64,
    pub n_paths: u64,
    /// Trajectories abandoned by the overflow guard (counted as misses).
    pub overflows: u64,
    /// Clopper-Pearson lower confidence bound on the hit probability.
    pub lower_bound: f64,
}

/// For each initial state, the frequency of `|X(T) - target|_H < eps` over
/// `n_paths` independent trajectories, with an exact binomial lower
/// confidence bound. Positive bounds for every start witness that the target
/// ball is reached from everywhere in the sample.
#[allow(clippy::too_many_arguments)]
pub fn irreducibility_probe(
    starts: &[SpectralField],
    target: &SpectralField,
    eps: f64,
    spec: &NoiseSpectrum,
    params: &SimParams,
    n_paths: usize,
    seed: u64,
    confidence: f64,
) -> Result<Vec<ProbeOutcome>> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::invalid("eps", eps, "target radius must be > 0"));
    }
    if starts.is_empty() || n_paths == 0 {
        return Err(Error::InsufficientData {
            what: "reachability probe",
            detail: "need at least one start and one path".into(),
        });
    }
    let mut outcomes = Vec::with_capacity(starts.len());
    for (i, x0) in starts.iter().enumerate() {
        // Some(true) = hit, Some(false) = miss, None = overflowed (a miss).
        let results: Vec<Result<Option<bool>>> = (0..n_paths)
            .into_par_iter()
            .map(|j| {
                let trajectory = (i * n_paths + j) as u64;
                match simulate_seeded(x0, spec, params, seed, trajectory, &mut crate::dynamics::NullObserver) {
                    Ok(out) => Ok(Some(out.final_x.sub(target).norm_h() < eps)),
                    Err(Error::Overflow { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect();
        let mut hits = 0u64;
        let mut overflows = 0u64;
        for r in results {
            match r? {
                Some(true) => hits += 1,
                Some(false) => {}
                None => overflows += 1,
            }
        }
        outcomes.push(ProbeOutcome {
            hits,
            n_paths: n_paths as u64,
            overflows,
            lower_bound: stats::clopper_pearson_lower(hits, n_paths as u64, confidence)?,
        });
    }
    Ok(outcomes)
}

/// `|X_t - X'_t|_H` on the grid for two states driven by the same noise.
pub fn coupled_gap_series(
    x0_a: &SpectralField,
    x0_b: &SpectralField,
    spec: &NoiseSpectrum,
    params: &SimParams,
    seed: u64,
    trajectory: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if x0_a.cutoff() != spec.cutoff() || x0_b.cutoff() != spec.cutoff() {
        return Err(Error::Mismatch {
            what: "coupled start cutoffs vs noise cutoff",
            left: x0_a.cutoff().min(x0_b.cutoff()),
            right: spec.cutoff(),
        });
    }
    let n_steps = params.n_steps()?;
    let stepper = SplitStepper::new(spec, params.h, params.dealias)?;
    let stream = RngStream::new(seed, trajectory);
    let mut rngs = stream.mode_rngs(spec.cutoff());

    // The shared convolution starts at zero, so the compensated parts carry
    // the full initial states and the gap is exactly |Y_a - Y_b|_H.
    let mut y_a = x0_a.clone();
    let mut y_b = x0_b.clone();
    let mut z = SpectralField::zero(spec.cutoff());
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut gaps = Vec::with_capacity(n_steps + 1);
    times.push(0.0);
    gaps.push(y_a.sub(&y_b).norm_h());
    for n in 0..n_steps {
        stepper.step_pair(&mut y_a, &mut y_b, &mut z, &mut rngs)?;
        let time = (n + 1) as f64 * params.h;
        for y in [&y_a, &y_b] {
            let norm = y.add(&z).norm_h();
            if !(norm <= crate::dynamics::OVERFLOW_NORM) {
                return Err(Error::Overflow { step: n + 1, time, norm });
            }
        }
        times.push(time);
        gaps.push(y_a.sub(&y_b).norm_h());
    }
    Ok((times, gaps))
}

/// Log-linear decay fit of a coupled gap series.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateFit {
    /// Contraction factor per unit time, `e^{slope}`.
    pub rho: f64,
    /// Prefactor normalized by the supplied scale, `e^{intercept} / scale`.
    pub theta: f64,
    pub r_squared: f64,
    /// Points kept above the noise floor.
    pub n_used: usize,
    /// `3 x` the median gap over the trailing half of the series.
    pub floor: f64,
}

/// Fits `log gap ~ intercept + slope * t` on the initial stretch that sits
/// above the coupling noise floor (three times the median of the trailing
/// half). Needs at least eight usable points.
pub fn rate_fit(times: &[f64], gaps: &[f64], scale: f64) -> Result<RateFit> {
    if times.len() != gaps.len() {
        return Err(Error::Mismatch {
            what: "time count vs gap count",
            left: times.len(),
            right: gaps.len(),
        });
    }
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::invalid("scale", scale, "prefactor scale must be > 0"));
    }
    if gaps.len() < 16 {
        return Err(Error::InsufficientData {
            what: "rate fit",
            detail: format!("{} points is too short for a floor estimate", gaps.len()),
        });
    }
    let tail = &gaps[gaps.len() / 2..];
    let floor = 3.0 * stats::median(tail);
    let mut cut = gaps.len();
    for (j, &g) in gaps.iter().enumerate() {
        if !(g > floor) {
            cut = j;
            break;
        }
    }
    if cut < 8 {
        return Err(Error::InsufficientData {
            what: "rate fit",
            detail: format!("only {cut} points above the noise floor {floor:.3e}"),
        });
    }
    let log_g: Vec<f64> = gaps[..cut].iter().map(|g| g.ln()).collect();
    let fit = stats::linear_fit(&times[..cut], &log_g)?;
    Ok(RateFit {
        rho: fit.slope.exp(),
        theta: fit.intercept.exp() / scale,
        r_squared: fit.r_squared,
        n_used: cut,
        floor,
    })
}

/// Scaled occupation fluctuation
/// `(b T^kappa sqrt(T))^{-1} int_0^T (f(X_s) - pi_hat) ds` from a grid series
/// of `f` values (left endpoints; the last entry is unused). Requires
/// `kappa` strictly inside `(0, 1/2)` — the moderate-deviation window
/// between the CLT and the ergodic average.
pub fn mdp_functional(
    series: &[f64],
    h: f64,
    pi_hat: f64,
    kappa: f64,
    b_scale: f64,
) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::InsufficientData {
            what: "scaled occupation fluctuation",
            detail: "need at least one integration step".into(),
        });
    }
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::invalid("h", h, "step must be > 0"));
    }
    if !kappa.is_finite() || kappa <= 0.0 || kappa >= 0.5 {
        return Err(Error::invalid(
            "kappa",
            kappa,
            "speed exponent must lie strictly inside (0, 1/2)",
        ));
    }
    if !b_scale.is_finite() || b_scale <= 0.0 {
        return Err(Error::invalid("b_scale", b_scale, "speed scale must be > 0"));
    }
    let n = series.len() - 1;
    let t = n as f64 * h;
    let sum: f64 = series[..n].iter().map(|f| f - pi_hat).sum::<f64>() * h;
    Ok(sum / (b_scale * t.powf(kappa) * t.sqrt()))
}

/// Batch-means estimate of the asymptotic variance of
/// `T^{-1/2} int_0^T (f - mean) ds`: split the series into `n_batches`
/// contiguous windows, integrate the centered values over each, and average
/// the squared integrals per unit time. Requires at least 10 batches of at
/// least 50 steps.
pub fn sigma2_batch_means(series: &[f64], h: f64, n_batches: usize) -> Result<f64> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::invalid("h", h, "step must be > 0"));
    }
    if n_batches < 10 {
        return Err(Error::invalid(
            "n_batches",
            n_batches as f64,
            "batch-means variance needs at least 10 batches",
        ));
    }
    let n = series.len().saturating_sub(1);
    let batch_len = n / n_batches;
    if batch_len < 50 {
        return Err(Error::InsufficientData {
            what: "batch-means variance",
            detail: format!(
                "{n} steps over {n_batches} batches leaves {batch_len} steps per batch (need >= 50)"
            ),
        });
    }
    let used = &series[..n_batches * batch_len];
    let overall = stats::mean(used);
    let batch_time = batch_len as f64 * h;
    let mut acc = 0.0;
    for j in 0..n_batches {
        let window = &used[j * batch_len..(j + 1) * batch_len];
        let integral: f64 = window.iter().map(|f| f - overall).sum::<f64>() * h;
        acc += integral * integral;
    }
    Ok(acc / ((n_batches - 1) as f64 * batch_time))
}

/// One radius of the deviation-tail comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailRatio {
    pub radius: f64,
    pub hits: u64,
    /// `-log freq(|sample| > r) / b^2`.
    pub empirical_rate: f64,
    /// Gaussian rate `r^2 / (2 sigma^2)`.
    pub gaussian_rate: f64,
    pub ratio: f64,
}

/// Compares empirical exceedance rates of scaled fluctuation samples with
/// the Gaussian rate function `r^2 / (2 sigma^2)` at radii given in units of
/// `sigma`. Every radius must see at least one exceedance.
pub fn mdp_tail_check(
    samples: &[f64],
    sigma2: f64,
    b_scale: f64,
    radii_in_sigma: &[f64],
) -> Result<Vec<TailRatio>> {
    if !sigma2.is_finite() || sigma2 <= 0.0 {
        return Err(Error::invalid("sigma2", sigma2, "variance must be > 0"));
    }
    if !b_scale.is_finite() || b_scale <= 0.0 {
        return Err(Error::invalid("b_scale", b_scale, "speed scale must be > 0"));
    }
    if samples.len() < 100 {
        return Err(Error::InsufficientData {
            what: "deviation tail check",
            detail: format!("{} samples is too few for tail frequencies", samples.len()),
        });
    }
    let sigma = sigma2.sqrt();
    let mut out = Vec::with_capacity(radii_in_sigma.len());
    for &c in radii_in_sigma {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::invalid("radius", c, "radii must be > 0"));
        }
        let r = c * sigma;
        let hits = samples.iter().filter(|x| x.abs() > r).count() as u64;
        if hits == 0 {
            return Err(Error::InsufficientData {
                what: "deviation tail check",
                detail: format!("no exceedances at radius {c} sigma over {} samples", samples.len()),
            });
        }
        let freq = hits as f64 / samples.len() as f64;
        let empirical_rate = -freq.ln() / (b_scale * b_scale);
        let gaussian_rate = c * c / 2.0;
        out.push(TailRatio {
            radius: r,
            hits,
            empirical_rate,
            gaussian_rate,
            ratio: empirical_rate / gaussian_rate,
        });
    }
    Ok(out)
}

/// Snapshot-time ensemble summaries across trajectories.
#[derive(Debug, Clone)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    /// Plain mean of `f(X_t)` across surviving paths.
    pub mean: Vec<f64>,
    /// Median-of-means across the same paths (robust to single wild draws).
    pub median_of_means: Vec<f64>,
    pub n_paths: usize,
    pub overflows: usize,
}

/// Runs `n_paths` trajectories (streamed, never stored) and aggregates the
/// observable at every `snapshot_every`-th grid point. Paths abandoned by
/// the overflow guard are dropped and counted.
#[allow(clippy::too_many_arguments)]
pub fn run_ensemble(
    x0: &SpectralField,
    spec: &NoiseSpectrum,
    params: &SimParams,
    observable: impl Into<ClippedObservable>,
    snapshot_every: usize,
    n_paths: usize,
    n_blocks: usize,
    seed: u64,
) -> Result<EnsembleStats> {
    let observable = observable.into();
    if snapshot_every == 0 {
        return Err(Error::invalid("snapshot_every", 0.0, "stride must be >= 1"));
    }
    if n_blocks < 2 {
        return Err(Error::invalid("n_blocks", n_blocks as f64, "need >= 2 blocks"));
    }
    let n_steps = params.n_steps()?;
    let n_snapshots = n_steps / snapshot_every + 1;

    let per_path: Vec<Result<Option<Vec<f64>>>> = (0..n_paths)
        .into_par_iter()
        .map(|traj| {
            let mut vals = Vec::with_capacity(n_snapshots);
            let mut collect = |step: usize, _: f64, x: &SpectralField, _: &SpectralField, _: f64| {
                if step % snapshot_every == 0 {
                    vals.push(observable.eval(x)?);
                }
                Ok(())
            };
            match simulate_seeded(x0, spec, params, seed, traj as u64, &mut collect) {
                Ok(_) => Ok(Some(vals)),
                Err(Error::Overflow { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(n_paths);
    let mut overflows = 0usize;
    for r in per_path {
        match r? {
            Some(v) => kept.push(v),
            None => overflows += 1,
        }
    }
    if kept.len() < 2 * n_blocks {
        return Err(Error::InsufficientData {
            what: "ensemble statistics",
            detail: format!(
                "{} surviving paths cannot fill {n_blocks} blocks (overflowed: {overflows})"
            , kept.len()),
        });
    }

    let times: Vec<f64> = (0..n_snapshots)
        .map(|i| (i * snapshot_every) as f64 * params.h)
        .collect();
    let mut mean = Vec::with_capacity(n_snapshots);
    let mut mom = Vec::with_capacity(n_snapshots);
    let mut column = Vec::with_capacity(kept.len());
    for i in 0..n_snapshots {
        column.clear();
        column.extend(kept.iter().map(|path| path[i]));
        mean.push(stats::mean(&column));
        mom.push(stats::median_of_means(&column, n_blocks)?);
    }
    Ok(EnsembleStats {
        times,
        mean,
        median_of_means: mom,
        n_paths: kept.len(),
        overflows,
    })
}

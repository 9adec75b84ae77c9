//! Small statistical estimators shared by the verification suites.
//!
//! Everything here operates on plain `&[f64]` slices. Heavy-tailed inputs are
//! the norm in this crate, so the robust summaries (median, median-of-means)
//! sit next to the classical ones.

use crate::error::Error;
use crate::Result;

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance; NaN for fewer than two points.
pub fn variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let mu = mean(values);
    values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (values.len() - 1) as f64
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("median requires comparable values"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Median of contiguous block means: the heavy-tail-robust location estimate
/// used for every Monte Carlo expectation of an alpha-stable functional.
pub fn median_of_means(values: &[f64], n_blocks: usize) -> Result<f64> {
    if n_blocks == 0 || values.len() < n_blocks {
        return Err(Error::InsufficientData {
            what: "median of means",
            detail: format!("{} values cannot fill {} blocks", values.len(), n_blocks),
        });
    }
    Ok(median(&block_means(values, n_blocks)))
}

/// Means of `n_blocks` contiguous, nearly equal blocks.
pub fn block_means(values: &[f64], n_blocks: usize) -> Vec<f64> {
    assert!(n_blocks >= 1 && values.len() >= n_blocks);
    let base = values.len() / n_blocks;
    let extra = values.len() % n_blocks;
    let mut out = Vec::with_capacity(n_blocks);
    let mut start = 0;
    for b in 0..n_blocks {
        let len = base + usize::from(b < extra);
        out.push(mean(&values[start..start + len]));
        start += len;
    }
    out
}

/// Two-sample Kolmogorov-Smirnov distance `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData {
            what: "KS distance",
            detail: "both samples must be non-empty".into(),
        });
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("KS requires comparable values"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("KS requires comparable values"));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        if sa[i] <= sb[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Real part of the empirical characteristic function `E cos(theta X)`;
/// the imaginary part is discarded (all laws in this crate are symmetric).
pub fn empirical_cf(samples: &[f64], theta: f64) -> f64 {
    mean(&samples.iter().map(|x| (theta * x).cos()).collect::<Vec<_>>())
}

/// Jarque-Bera normality statistic `n (S^2/6 + (K-3)^2/24)`.
pub fn jarque_bera(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mu = mean(samples);
    let m2 = samples.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n;
    let m3 = samples.iter().map(|x| (x - mu).powi(3)).sum::<f64>() / n;
    let m4 = samples.iter().map(|x| (x - mu).powi(4)).sum::<f64>() / n;
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    n * (skew * skew / 6.0 + (kurt - 3.0) * (kurt - 3.0) / 24.0)
}

/// One-sided Clopper-Pearson lower confidence bound for a binomial
/// proportion: zero hits give a bound of exactly zero.
pub fn clopper_pearson_lower(hits: u64, n: u64, confidence: f64) -> Result<f64> {
    if n == 0 || hits > n {
        return Err(Error::InsufficientData {
            what: "Clopper-Pearson bound",
            detail: format!("{hits} hits out of {n} trials"),
        });
    }
    if !(0.0..1.0).contains(&confidence) || confidence <= 0.0 {
        return Err(Error::invalid(
            "confidence",
            confidence,
            "must lie strictly between 0 and 1",
        ));
    }
    if hits == 0 {
        return Ok(0.0);
    }
    use statrs::distribution::{Beta, ContinuousCDF};
    let dist = Beta::new(hits as f64, (n - hits + 1) as f64).expect("valid Beta parameters");
    Ok(dist.inverse_cdf(1.0 - confidence))
}

/// Standard normal upper tail probability.
pub fn normal_upper_tail(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Ordinary least squares fit `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; NaN when the response is constant.
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::Mismatch {
            what: "regression sample lengths",
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            what: "linear fit",
            detail: format!("{} points", x.len()),
        });
    }
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            what: "linear fit",
            detail: "degenerate abscissa (all x equal)".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(u, v)| {
            let r = v - (slope * u + intercept);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        f64::NAN
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_on_a_known_sample() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&v), 2.5);
        assert!((variance(&v) - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(median(&v), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert!(mean(&[]).is_nan());
        assert!(variance(&[1.0]).is_nan());
    }

    #[test]
    fn median_of_means_splits_contiguously() {
        let v = [0.0, 0.0, 10.0, 10.0, 1.0, 1.0];
        let blocks = block_means(&v, 3);
        assert_eq!(blocks, vec![0.0, 10.0, 1.0]);
        assert_eq!(median_of_means(&v, 3).unwrap(), 1.0);
        assert!(median_of_means(&v, 7).is_err());
    }

    #[test]
    fn median_of_means_shrugs_off_one_huge_outlier() {
        let mut v = vec![1.0; 100];
        v[37] = 1e12;
        let mom = median_of_means(&v, 10).unwrap();
        assert!((mom - 1.0).abs() < 1e-9, "contaminated estimate: {mom}");
    }

    #[test]
    fn ks_distance_detects_identical_and_shifted_samples() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        assert!(ks_distance(&a, &a).unwrap() < 1.5e-3);
        let b: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let d = ks_distance(&a, &b).unwrap();
        assert!((d - 0.5).abs() < 2e-3, "shifted-uniform KS = {d}");
        assert!(ks_distance(&a, &[]).is_err());
    }

    #[test]
    fn empirical_cf_of_a_symmetric_two_point_law() {
        let samples = [1.0, -1.0, 1.0, -1.0];
        let theta = 0.7;
        assert!((empirical_cf(&samples, theta) - theta.cos()).abs() < 1e-15);
    }

    #[test]
    fn jarque_bera_is_small_for_symmetric_light_tails() {
        // Deterministic "normal-like" sample: inverse-CDF grid of a standard
        // normal has zero skew and near-3 kurtosis.
        let n = 4001;
        let samples: Vec<f64> = (1..n)
            .map(|i| {
                let u = i as f64 / n as f64;
                // Rational approximation of the probit (Beasley-Springer-Moro
                // style) is overkill; an odd-symmetric grid suffices here.
                statrs::function::erf::erf_inv(2.0 * u - 1.0) * std::f64::consts::SQRT_2
            })
            .collect();
        let jb = jarque_bera(&samples);
        assert!(jb < 1.0, "JB of a probit grid should be tiny, got {jb}");

        let heavy: Vec<f64> = (0..2000).map(|i| if i == 0 { 100.0 } else { 0.01 }).collect();
        assert!(jarque_bera(&heavy) > 9.21, "heavy outlier must trip JB");
    }

    #[test]
    fn clopper_pearson_matches_reference_values() {
        assert_eq!(clopper_pearson_lower(0, 100, 0.95).unwrap(), 0.0);
        // 10 hits in 100 trials, one-sided 95% lower bound: 0.0552632
        // (exact Beta(10, 91) quantile at 0.05).
        let lb = clopper_pearson_lower(10, 100, 0.95).unwrap();
        assert!((lb - 0.0552632).abs() < 1e-4, "CP lower bound {lb}");
        // All hits: bound is (1 - conf)^(1/n). The quantile is found
        // numerically, so allow root-finder slack.
        let all = clopper_pearson_lower(20, 20, 0.95).unwrap();
        assert!((all - 0.05f64.powf(1.0 / 20.0)).abs() < 1e-4, "all-hits bound {all}");
        assert!(clopper_pearson_lower(5, 4, 0.95).is_err());
    }

    #[test]
    fn linear_fit_recovers_an_exact_line_and_flags_noise() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let fit = linear_fit(&x, &y).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!((fit.intercept + 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let zig: Vec<f64> = x.iter().map(|v| if v % 2.0 == 0.0 { 1.0 } else { -1.0 }).collect();
        let noisy = linear_fit(&x, &zig).unwrap();
        assert!(noisy.r_squared < 0.2, "zigzag R^2 = {}", noisy.r_squared);

        assert!(linear_fit(&[1.0, 1.0], &[0.0, 5.0]).is_err(), "degenerate x");
    }

    #[test]
    fn normal_tail_reference_points() {
        assert!((normal_upper_tail(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_upper_tail(1.96) - 0.0249979).abs() < 1e-6);
        assert!((normal_upper_tail(3.0) - 1.349898e-3).abs() < 1e-8);
    }
}

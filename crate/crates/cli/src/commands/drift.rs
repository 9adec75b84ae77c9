//! Drift certification: evaluates the generator bound on random states at
//! the edge of the dissipativity region and inside it.

use crate::config::Config;
use crate::output::Artifacts;
use crate::Failure;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use sgl_core::lyapunov::{choose_level, drift_report, level_condition};
use sgl_core::rng::RngStream;
use sgl_core::spectral::SpectralField;

#[derive(Serialize)]
struct Summary {
    /// Lyapunov level `M` in `Psi = sqrt(M + |x|_H^2)`.
    #[serde(rename = "M")]
    big_m: f64,
    /// Slack `1/4 - f(M)` of the level condition.
    margin: f64,
    n_samples: usize,
    #[serde(rename = "n_violations_Kc")]
    n_violations_kc: usize,
    #[serde(rename = "n_violations_K")]
    n_violations_k: usize,
    #[serde(rename = "min_ratio_Kc")]
    min_ratio_kc: f64,
    #[serde(rename = "min_ratio_K")]
    min_ratio_k: f64,
    s1: f64,
    s2: f64,
}

/// Random direction with summable V-energy: uniform coefficients damped by
/// `k^{-3/2}`, nonzero with probability one.
fn direction(m: usize, rng: &mut impl Rng) -> SpectralField {
    let coeffs = (1..=m)
        .map(|k| {
            let damp = (k as f64).powf(-1.5);
            Complex64::new(
                (rng.gen::<f64>() - 0.5) * damp,
                (rng.gen::<f64>() - 0.5) * damp,
            )
        })
        .collect();
    SpectralField::from_coeffs(coeffs)
}

pub fn run(cfg: &Config, art: &mut Artifacts) -> Result<(), Failure> {
    let spec = cfg.noise.build()?;
    let (big_m, margin) = match cfg.drift.level {
        Some(level) => (level, 0.25 - level_condition(&spec, level)?),
        None => {
            let cert = choose_level(&spec)?;
            (cert.big_m, cert.margin)
        }
    };
    let sums = sgl_core::lyapunov::amplitude_sums(&spec)?;

    let mut csv = art.csv(
        "drift.csv",
        "sample,region,norm_v_sq,norm_h_sq,psi,j1,j2,j3,j4,ratio_lower,in_k",
    )?;
    let n = cfg.drift.n_samples;
    let mut violations = [0usize; 2];
    let mut min_ratio = [f64::INFINITY; 2];
    for i in 0..n {
        let mut rng = RngStream::new(cfg.seed, i as u64).scalar_rng();
        let shape = direction(cfg.noise.m, &mut rng);
        let radial = rng.gen::<f64>();
        // region 0: the sphere |x|_V^2 = 2M; region 1: uniformly shrunk
        // into the ball, which lies inside K because gamma_1 > 2.
        for (region, shrink) in [(0usize, 1.0), (1usize, radial)] {
            let x = shape.scale(shrink * (2.0 * big_m / shape.norm_v_sq()).sqrt());
            let report = drift_report(&x, &spec, big_m)?;
            let floor = if region == 0 { 0.25 } else { -0.25 };
            if report.ratio_lower < floor {
                violations[region] += 1;
            }
            min_ratio[region] = min_ratio[region].min(report.ratio_lower);
            csv.line(&format!(
                "{i},{},{},{},{},{},{},{},{},{},{}",
                if region == 0 { "boundary" } else { "interior" },
                x.norm_v_sq(),
                x.norm_h_sq(),
                report.psi,
                report.j1_exact,
                report.j2_bound,
                report.j3_bound,
                report.j4_bound,
                report.ratio_lower,
                report.in_k,
            ))?;
        }
    }
    csv.done()?;

    art.json(
        "summary.json",
        &Summary {
            big_m,
            margin,
            n_samples: n,
            n_violations_kc: violations[0],
            n_violations_k: violations[1],
            min_ratio_kc: min_ratio[0],
            min_ratio_k: min_ratio[1],
            s1: sums.s1,
            s2: sums.s2,
        },
    )?;
    Ok(())
}

//! Moderate-deviation functional over an ensemble: a calibration run pins
//! the occupation mean and asymptotic variance, then every path reports the
//! scaled fluctuation at dyadic horizons and the final-time tail rates.

use crate::config::Config;
use crate::output::Artifacts;
use crate::Failure;
use rayon::prelude::*;
use serde::Serialize;
use sgl_core::ergodic::{mdp_functional, mdp_tail_check, observable_series, sigma2_batch_means, TailRatio};
use sgl_core::Error;

#[derive(Serialize)]
#[serde(untagged)]
enum TailEntry {
    Ratio(TailRatio),
    Skipped { radius: f64, skipped: String },
}

#[derive(Serialize)]
struct Summary {
    observable: String,
    /// Horizon of the calibration run behind `pi_hat` and `sigma2`.
    t_calibrate: f64,
    pi_hat: f64,
    sigma2: f64,
    kappa: f64,
    /// `b(T) = T^kappa` at the final horizon.
    b_final: f64,
    n_paths: usize,
    overflows: usize,
    tail_ratios: Vec<TailEntry>,
}

pub fn run(cfg: &Config, art: &mut Artifacts) -> Result<(), Failure> {
    let spec = cfg.noise.build()?;
    let params = cfg.sim.params();
    let block = &cfg.mdp;
    let x0 = cfg.x0.build(cfg.noise.m)?;
    let obs = block.observable;
    let n_steps = params.n_steps()?;

    // Calibration trajectory: long-run mean (after burn-in) and the
    // batch-means variance feed every path's functional. It runs well past
    // the ensemble horizon because its mean error is amplified by t^(1/2-kappa)
    // inside every path's centering.
    let cal_params = sgl_core::dynamics::SimParams {
        t_horizon: block.calibration_horizon(params.t_horizon),
        ..params
    };
    let n_cal = cal_params.n_steps()?;
    let series0 = observable_series(&x0, &spec, &cal_params, obs, cfg.seed, 0)?;
    let n_burn = (block.burn_frac * n_cal as f64).floor() as usize;
    let tail_series = &series0[n_burn..];
    let ends = tail_series.len() - 1;
    let pi_hat = tail_series[..ends].iter().sum::<f64>() / ends as f64;
    let sigma2 = sigma2_batch_means(tail_series, params.h, block.n_batches)?;

    let mut horizons: Vec<usize> = Vec::new();
    let mut p = 64usize;
    while p <= n_steps {
        horizons.push(p);
        p *= 2;
    }
    if horizons.last() != Some(&n_steps) {
        horizons.push(n_steps);
    }

    // Ensemble paths use an unrelated key so the calibration run is not one
    // of the samples.
    let per_path: Vec<sgl_core::Result<Option<Vec<f64>>>> = (0..block.n_paths)
        .into_par_iter()
        .map(|traj| {
            let series = match observable_series(
                &x0,
                &spec,
                &params,
                obs,
                cfg.seed.wrapping_add(1),
                traj as u64,
            ) {
                Ok(s) => s,
                Err(Error::Overflow { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let values = horizons
                .iter()
                .map(|&nt| mdp_functional(&series[..=nt], params.h, pi_hat, block.kappa, 1.0))
                .collect::<sgl_core::Result<Vec<f64>>>()?;
            Ok(Some(values))
        })
        .collect();

    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(block.n_paths);
    let mut overflows = 0usize;
    for r in per_path {
        match r? {
            Some(v) => kept.push(v),
            None => overflows += 1,
        }
    }
    if kept.len() < 100 {
        return Err(Failure::Numeric(format!(
            "only {} of {} paths survived the overflow guard; too few for tail statistics",
            kept.len(),
            block.n_paths
        )));
    }

    let mut csv = art.csv("mdp.csv", "steps,time,median_abs_m,mean_abs_m")?;
    for (j, &nt) in horizons.iter().enumerate() {
        let mut abs: Vec<f64> = kept.iter().map(|path| path[j].abs()).collect();
        abs.sort_by(|a, b| a.total_cmp(b));
        let median = if abs.len() % 2 == 1 {
            abs[abs.len() / 2]
        } else {
            0.5 * (abs[abs.len() / 2 - 1] + abs[abs.len() / 2])
        };
        let mean = abs.iter().sum::<f64>() / abs.len() as f64;
        csv.line(&format!("{nt},{},{median},{mean}", nt as f64 * params.h))?;
    }
    csv.done()?;

    let t_final = n_steps as f64 * params.h;
    let b_final = t_final.powf(block.kappa);
    let finals: Vec<f64> = kept.iter().map(|path| *path.last().unwrap()).collect();
    let tail_ratios = block
        .radii
        .iter()
        .map(|&r| match mdp_tail_check(&finals, sigma2, b_final, &[r]) {
            Ok(mut v) => TailEntry::Ratio(v.remove(0)),
            Err(e) => TailEntry::Skipped { radius: r, skipped: e.to_string() },
        })
        .collect();

    art.json(
        "summary.json",
        &Summary {
            observable: obs.name(),
            t_calibrate: cal_params.t_horizon,
            pi_hat,
            sigma2,
            kappa: block.kappa,
            b_final,
            n_paths: kept.len(),
            overflows,
            tail_ratios,
        },
    )?;
    Ok(())
}

//! Run configuration: one JSON document whose blocks cover every
//! subcommand. Missing blocks fall back to the default experiment preset
//! (alpha = 1.8, beta = 0.8, m = 64, h = 1e-3, T = 10), which sits inside
//! both the admissibility and the ergodicity parameter bands.

use serde::{Deserialize, Serialize};
use sgl_core::dynamics::SimParams;
use sgl_core::ergodic::{ClippedObservable, Observable};
use sgl_core::noise::{admissibility_threshold, strong_feller_band, NoiseSpectrum};
use sgl_core::spectral::SpectralField;
use sgl_core::Result as CoreResult;

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub noise: NoiseBlock,
    pub sim: SimBlock,
    pub x0: StateSpec,
    pub simulate: SimulateBlock,
    pub noise_test: NoiseTestBlock,
    pub control: ControlBlock,
    pub drift: DriftBlock,
    pub ergodic: ErgodicBlock,
    pub mdp: MdpBlock,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseBlock {
    /// Stability index of the driving noise, strictly inside (1, 2).
    pub alpha: f64,
    /// Spectral decay exponent of the per-mode amplitudes `gamma_k^{-beta}`.
    pub beta: f64,
    /// Galerkin cutoff shared by the state and the noise.
    pub m: usize,
    /// Zero noise: the deterministic equation with the same cutoff.
    pub noiseless: bool,
}

impl Default for NoiseBlock {
    fn default() -> Self {
        NoiseBlock { alpha: 1.8, beta: 0.8, m: 64, noiseless: false }
    }
}

impl NoiseBlock {
    pub fn build(&self) -> CoreResult<NoiseSpectrum> {
        if self.noiseless {
            NoiseSpectrum::noiseless(self.alpha, self.m)
        } else {
            NoiseSpectrum::new(self.alpha, self.beta, self.m)
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimBlock {
    pub h: f64,
    /// Horizon; must be a whole number of steps.
    pub t: f64,
    /// Apply the 2/3-rule mask around the cubic term (the default).
    pub dealias: bool,
}

impl Default for SimBlock {
    fn default() -> Self {
        SimBlock { h: 1e-3, t: 10.0, dealias: true }
    }
}

impl SimBlock {
    pub fn params(&self) -> SimParams {
        SimParams::new(self.h, self.t, self.dealias)
    }
}

/// Band-limited initial or target states.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    #[default]
    Zero,
    /// Sum of `amp * sin(2 pi k xi)` terms.
    Sine { modes: Vec<SineMode> },
    /// Raw spectral coefficients for modes `1..=m` (lengths must equal `m`).
    Coeffs { re: Vec<f64>, im: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SineMode {
    pub k: usize,
    pub amp: f64,
}

impl StateSpec {
    pub fn build(&self, m: usize) -> CoreResult<SpectralField> {
        match self {
            StateSpec::Zero => Ok(SpectralField::zero(m)),
            StateSpec::Sine { modes } => {
                let mut x = SpectralField::zero(m);
                for mode in modes {
                    if mode.k < 1 || mode.k > m {
                        return Err(sgl_core::Error::Mismatch {
                            what: "sine mode vs cutoff",
                            left: mode.k,
                            right: m,
                        });
                    }
                    x.axpy(1.0, &SpectralField::harmonic_sine(m, mode.k, mode.amp));
                }
                Ok(x)
            }
            StateSpec::Coeffs { re, im } => {
                if re.len() != m || im.len() != m {
                    return Err(sgl_core::Error::Mismatch {
                        what: "coefficient count vs cutoff",
                        left: re.len().min(im.len()),
                        right: m,
                    });
                }
                Ok(SpectralField::from_coeffs(
                    re.iter()
                        .zip(im)
                        .map(|(&a, &b)| num_complex::Complex64::new(a, b))
                        .collect(),
                ))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateBlock {
    /// Write every n-th grid point to the trajectory CSV.
    pub snapshot_every: usize,
    /// Also report the variation-of-constants residual of the run.
    pub mild_residual: bool,
    /// Trajectory id (selects the noise streams under the master seed).
    pub trajectory: u64,
}

impl Default for SimulateBlock {
    fn default() -> Self {
        SimulateBlock { snapshot_every: 1, mild_residual: false, trajectory: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseTestBlock {
    pub n_draws: usize,
    /// Frequencies at which the empirical characteristic function is read.
    pub thetas: Vec<f64>,
}

impl Default for NoiseTestBlock {
    fn default() -> Self {
        NoiseTestBlock { n_draws: 1_000_000, thetas: vec![0.5, 1.0, 2.0] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlBlock {
    pub target: StateSpec,
    /// Steering tolerance in the V norm.
    pub eps: f64,
    pub t_final: f64,
    pub h: f64,
    pub dealias: bool,
}

impl Default for ControlBlock {
    fn default() -> Self {
        ControlBlock {
            target: StateSpec::Sine { modes: vec![SineMode { k: 1, amp: 0.3 }] },
            eps: 0.05,
            t_final: 1.0,
            h: 1e-4,
            dealias: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriftBlock {
    /// States sampled per region (boundary sphere and interior ball).
    pub n_samples: usize,
    /// Lyapunov level; `null` selects the smallest certifiable dyadic level.
    pub level: Option<f64>,
}

impl Default for DriftBlock {
    fn default() -> Self {
        DriftBlock { n_samples: 1000, level: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErgodicBlock {
    /// Second ensemble start; the first uses the top-level `x0`.
    pub x0_b: StateSpec,
    pub observable: ClippedObservable,
    pub n_paths: usize,
    pub n_blocks: usize,
    pub snapshot_every: usize,
}

impl Default for ErgodicBlock {
    fn default() -> Self {
        ErgodicBlock {
            x0_b: StateSpec::Sine { modes: vec![SineMode { k: 1, amp: 0.5 }] },
            observable: Observable::NormHSquared.clipped(10.0),
            n_paths: 500,
            n_blocks: 10,
            snapshot_every: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MdpBlock {
    pub observable: ClippedObservable,
    /// Speed exponent of `b(t) = t^kappa`, strictly inside (0, 1/2).
    pub kappa: f64,
    pub n_paths: usize,
    /// Batches for the asymptotic-variance estimate on the calibration run.
    pub n_batches: usize,
    /// Leading fraction of the calibration run discarded before averaging.
    pub burn_frac: f64,
    /// Horizon of the calibration run that estimates the stationary mean and
    /// the asymptotic variance. Defaults to ten times the ensemble horizon:
    /// the mean estimate enters every path's centering, so its error grows
    /// like t^(1/2 - kappa) and must be driven well below the noise scale.
    pub t_calibrate: Option<f64>,
    /// Tail radii in units of the asymptotic standard deviation.
    pub radii: Vec<f64>,
}

impl MdpBlock {
    /// Calibration horizon: explicit value, or ten times the ensemble horizon.
    pub fn calibration_horizon(&self, t_ensemble: f64) -> f64 {
        self.t_calibrate.unwrap_or(10.0 * t_ensemble)
    }
}

impl Default for MdpBlock {
    fn default() -> Self {
        MdpBlock {
            observable: Observable::NormHSquared.clipped(10.0),
            kappa: 0.25,
            n_paths: 400,
            n_batches: 20,
            burn_frac: 0.2,
            t_calibrate: None,
            radii: vec![0.5, 1.0, 1.5],
        }
    }
}

/// Violations block a run; warnings flag theory gaps but keep it runnable.
#[derive(Debug, Default)]
pub struct Diagnostics {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    fn violation(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }

    fn warning(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }
}

/// Checks every block against its module preconditions; nothing is computed.
pub fn validate(cfg: &Config) -> Diagnostics {
    let mut d = Diagnostics::default();
    let n = &cfg.noise;

    if !(n.alpha > 1.0 && n.alpha < 2.0) || !n.alpha.is_finite() {
        d.violation(format!(
            "alpha must lie strictly inside (1, 2); got {}",
            n.alpha
        ));
    }
    if n.m < 1 {
        d.violation("cutoff m must be at least 1");
    }
    if n.alpha > 1.0 && n.alpha < 2.0 && !n.noiseless {
        let threshold = admissibility_threshold(n.alpha);
        if !(n.beta > threshold) {
            d.violation(format!(
                "beta must exceed 1/2 + 1/(2 alpha) = {threshold:.4}; got {}",
                n.beta
            ));
        } else {
            let (lo, hi) = strong_feller_band(n.alpha);
            if n.beta >= hi {
                d.warning(format!(
                    "beta = {} is outside the ergodicity band ({lo:.4}, {hi:.4}): \
                     the simulation is well-defined, but the exponential-rate \
                     theory does not cover it",
                    n.beta
                ));
            }
        }
    }

    if !(cfg.sim.h > 0.0) || !cfg.sim.h.is_finite() {
        d.violation(format!("step h must be positive and finite; got {}", cfg.sim.h));
    }
    if !(cfg.sim.t > 0.0) || !cfg.sim.t.is_finite() {
        d.violation(format!("horizon t must be positive and finite; got {}", cfg.sim.t));
    }
    if cfg.sim.h > 0.0 && cfg.sim.t > 0.0 {
        if let Err(e) = cfg.sim.params().n_steps() {
            d.violation(e.to_string());
        }
    }

    if let Err(e) = cfg.x0.build(n.m) {
        d.violation(format!("x0: {e}"));
    }

    if cfg.simulate.snapshot_every == 0 {
        d.violation("simulate.snapshot_every must be at least 1");
    }

    if cfg.noise_test.n_draws < 1000 {
        d.violation("noise_test.n_draws must be at least 1000 for a stable empirical CF");
    }
    if cfg.noise_test.thetas.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        d.violation("noise_test.thetas must all be positive and finite");
    }

    let c = &cfg.control;
    if !(c.eps > 0.0) || !c.eps.is_finite() {
        d.violation(format!("control.eps must be positive; got {}", c.eps));
    }
    if !(c.h > 0.0) || !(c.t_final > 0.0) {
        d.violation("control.h and control.t_final must be positive");
    } else if let Err(e) = SimParams::new(c.h, c.t_final, c.dealias).n_steps() {
        d.violation(format!("control: {e}"));
    }
    if let Err(e) = c.target.build(n.m) {
        d.violation(format!("control.target: {e}"));
    }

    if cfg.drift.n_samples == 0 {
        d.violation("drift.n_samples must be at least 1");
    }
    if let Some(level) = cfg.drift.level {
        if !(level > 0.0) || !level.is_finite() {
            d.violation(format!("drift.level must be positive; got {level}"));
        }
    }

    let e = &cfg.ergodic;
    if e.n_blocks < 2 {
        d.violation("ergodic.n_blocks must be at least 2");
    }
    if e.n_paths < 2 * e.n_blocks.max(1) {
        d.violation(format!(
            "ergodic.n_paths = {} cannot fill {} median-of-means blocks",
            e.n_paths, e.n_blocks
        ));
    }
    if e.snapshot_every == 0 {
        d.violation("ergodic.snapshot_every must be at least 1");
    }
    if let Err(err) = e.x0_b.build(n.m) {
        d.violation(format!("ergodic.x0_b: {err}"));
    }
    if let Err(err) = e.observable.eval(&SpectralField::zero(n.m)) {
        d.violation(format!("ergodic.observable: {err}"));
    }

    let p = &cfg.mdp;
    if !(p.kappa > 0.0 && p.kappa < 0.5) {
        d.violation(format!(
            "mdp.kappa must lie strictly inside (0, 1/2); got {}",
            p.kappa
        ));
    }
    if p.n_paths < 100 {
        d.violation("mdp.n_paths must be at least 100 for tail frequencies");
    }
    if p.n_batches < 10 {
        d.violation("mdp.n_batches must be at least 10");
    }
    if !(0.0..=0.9).contains(&p.burn_frac) {
        d.violation(format!("mdp.burn_frac must lie in [0, 0.9]; got {}", p.burn_frac));
    }
    if p.radii.is_empty() || p.radii.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        d.violation("mdp.radii must be nonempty and positive");
    }
    let t_cal = p.calibration_horizon(cfg.sim.t);
    if !(t_cal > 0.0) || !t_cal.is_finite() {
        d.violation(format!(
            "mdp.t_calibrate must be positive and finite; got {t_cal}"
        ));
    } else if cfg.sim.h > 0.0 && cfg.sim.h.is_finite() {
        let cal = SimParams { t_horizon: t_cal, ..cfg.sim.params() };
        if let Err(e) = cal.n_steps() {
            d.violation(format!("mdp.t_calibrate: {e}"));
        }
    }
    if let Err(err) = p.observable.eval(&SpectralField::zero(n.m)) {
        d.violation(format!("mdp.observable: {err}"));
    }

    d
}

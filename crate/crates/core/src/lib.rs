//! Spectral toolkit for the stochastic real Ginzburg-Landau equation
//! `du + (Au - N(u)) dt = dL` on the one-dimensional torus, where
//! `A = -(d/dxi)^2` acts on mean-zero fields, `N(u) = u - u^3`, and `L` is a
//! cylindrical symmetric alpha-stable noise with per-mode amplitudes
//! `beta_k = gamma_k^{-beta}`.
//!
//! The crate is organised around a mean-zero Fourier-Galerkin representation:
//!
//! * [`spectral`]  - fields, the diagonal operator, norms and transforms;
//! * [`noise`]     - alpha-stable sampling and the exact Ornstein-Uhlenbeck
//!   convolution `Z`;
//! * [`dynamics`]  - the `X = Y + Z` splitting integrator;
//! * [`control`]   - synthesis and verification of steering controls;
//! * [`lyapunov`]  - drift certificates for `Psi(x) = sqrt(M + |x|_H^2)`;
//! * [`ergodic`]   - occupation statistics, ensemble gap fits and
//!   moderate-deviation functionals;
//! * [`stats`]     - small shared estimators (KS distance, median-of-means,
//!   Clopper-Pearson, least squares);
//! * [`rng`]       - reproducible counter-derived random streams.

pub mod control;
pub mod dynamics;
pub mod ergodic;
pub mod error;
mod fft;
pub mod lyapunov;
pub mod noise;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;

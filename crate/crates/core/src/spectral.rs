//! Mean-zero spectral fields on the unit torus and the diagonal operator
//! `A = -(d/dxi)^2`.
//!
//! A real mean-zero field `x(xi) = sum_{k != 0} x_k exp(2 pi i k xi)` is
//! stored through its coefficients `x_1 .. x_m`; the conjugate modes
//! `x_{-k} = conj(x_k)` are implicit and the `k = 0` mode does not exist.
//! Consequently every norm below sums over *both* signs of each stored mode:
//! `|x|_H^2 = 2 sum_{k>=1} |x_k|^2`.

use crate::error::Error;
use crate::fft;
use crate::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Eigenvalue `gamma_k = 4 pi^2 k^2` of `A` on the mode `exp(2 pi i k xi)`.
///
/// `k = 0` is rejected: the space is mean-zero, so `A` is strictly positive
/// and `gamma_1 = 4 pi^2` is its spectral gap.
pub fn eigenvalue(k: i64) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroMode);
    }
    let kf = k as f64;
    Ok(4.0 * PI * PI * kf * kf)
}

/// Precomputed diagonal `(gamma_1, ..., gamma_m)` of `A` on a Galerkin band.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpectrum {
    m: usize,
    gammas: Vec<f64>,
}

impl OperatorSpectrum {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "cutoff must be at least 1");
        let gammas = (1..=m)
            .map(|k| eigenvalue(k as i64).expect("k >= 1"))
            .collect();
        OperatorSpectrum { m, gammas }
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    /// `gamma_k` for a stored mode index `1 <= k <= m`.
    pub fn gamma(&self, k: usize) -> f64 {
        self.gammas[k - 1]
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }
}

/// A real mean-zero field truncated to the modes `|k| <= m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    m: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// The zero field on the band `|k| <= m`.
    pub fn zero(m: usize) -> Self {
        assert!(m >= 1, "cutoff must be at least 1");
        SpectralField {
            m,
            coeffs: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    /// Builds a field from the stored coefficients `x_1 .. x_m`.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "cutoff must be at least 1");
        SpectralField {
            m: coeffs.len(),
            coeffs,
        }
    }

    /// `amplitude * sin(2 pi k xi)`: the stored coefficient is
    /// `x_k = -i * amplitude / 2`.
    pub fn harmonic_sine(m: usize, k: usize, amplitude: f64) -> Self {
        assert!(k >= 1 && k <= m, "harmonic index {k} outside 1..={m}");
        let mut field = SpectralField::zero(m);
        field.coeffs[k - 1] = Complex64::new(0.0, -amplitude / 2.0);
        field
    }

    /// `amplitude * cos(2 pi k xi)`: the stored coefficient is
    /// `x_k = amplitude / 2`.
    pub fn harmonic_cosine(m: usize, k: usize, amplitude: f64) -> Self {
        assert!(k >= 1 && k <= m, "harmonic index {k} outside 1..={m}");
        let mut field = SpectralField::zero(m);
        field.coeffs[k - 1] = Complex64::new(amplitude / 2.0, 0.0);
        field
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    /// Stored coefficient `x_k`, `1 <= k <= m`.
    pub fn mode(&self, k: usize) -> Complex64 {
        assert!(k >= 1 && k <= self.m, "mode index {k} outside 1..={}", self.m);
        self.coeffs[k - 1]
    }

    pub fn mode_mut(&mut self, k: usize) -> &mut Complex64 {
        assert!(k >= 1 && k <= self.m, "mode index {k} outside 1..={}", self.m);
        &mut self.coeffs[k - 1]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `|x|_H = (2 sum_{k>=1} |x_k|^2)^{1/2}` (both conjugate modes counted).
    pub fn norm_h(&self) -> f64 {
        self.norm_h_sq().sqrt()
    }

    pub fn norm_h_sq(&self) -> f64 {
        2.0 * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `|x|_V = |A^{1/2} x|_H`.
    pub fn norm_v(&self) -> f64 {
        self.norm_v_sq().sqrt()
    }

    pub fn norm_v_sq(&self) -> f64 {
        2.0 * self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = (i + 1) as f64;
                4.0 * PI * PI * k * k * c.norm_sqr()
            })
            .sum::<f64>()
    }

    /// Real `H` inner product `<x, y> = 2 Re sum_{k>=1} x_k conj(y_k)`.
    pub fn inner_h(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.m, other.m, "inner product needs matching cutoffs");
        2.0 * self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
    }

    /// Applies `A^sigma` (diagonal scaling by `gamma_k^sigma`), `sigma >= 0`.
    pub fn apply_fractional_power(&self, sigma: f64) -> Result<SpectralField> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::invalid(
                "sigma",
                sigma,
                "fractional power exponent must be finite and >= 0",
            ));
        }
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let gamma = eigenvalue((i + 1) as i64)?;
            *c *= gamma.powf(sigma);
        }
        Ok(out)
    }

    /// Applies the semigroup `exp(-A t)` (diagonal scaling by
    /// `exp(-gamma_k t)`), `t >= 0`.
    pub fn apply_semigroup(&self, t: f64) -> Result<SpectralField> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::invalid(
                "t",
                t,
                "semigroup time must be finite and >= 0",
            ));
        }
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let gamma = eigenvalue((i + 1) as i64)?;
            *c *= (-gamma * t).exp();
        }
        Ok(out)
    }

    /// Galerkin projection `pi_{m'}`: keeps the modes `|k| <= m'` and zeroes
    /// the rest. The storage cutoff is unchanged, so the projection is
    /// idempotent and directly comparable with the input.
    pub fn project(&self, m_keep: usize) -> Result<SpectralField> {
        if m_keep > self.m {
            return Err(Error::Mismatch {
                what: "projection cutoff vs field cutoff",
                left: m_keep,
                right: self.m,
            });
        }
        let mut out = self.clone();
        for c in out.coeffs.iter_mut().skip(m_keep) {
            *c = Complex64::new(0.0, 0.0);
        }
        Ok(out)
    }

    /// Re-embeds the field in a band of cutoff `m_new`, truncating or
    /// zero-padding. Used to compare runs at different Galerkin resolutions.
    pub fn with_cutoff(&self, m_new: usize) -> SpectralField {
        assert!(m_new >= 1, "cutoff must be at least 1");
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m_new];
        let keep = self.m.min(m_new);
        coeffs[..keep].copy_from_slice(&self.coeffs[..keep]);
        SpectralField { m: m_new, coeffs }
    }

    /// Samples the field on the uniform grid `xi_j = j / n_grid`.
    ///
    /// Requires an even `n_grid >= 2m + 2` so the band is strictly below the
    /// grid Nyquist mode.
    pub fn to_physical(&self, n_grid: usize) -> Result<Vec<f64>> {
        check_grid(n_grid, self.m)?;
        let mut buf = vec![Complex64::new(0.0, 0.0); n_grid];
        for (i, c) in self.coeffs.iter().enumerate() {
            buf[i + 1] = *c;
            buf[n_grid - 1 - i] = c.conj();
        }
        fft::inverse(&mut buf);
        Ok(buf.into_iter().map(|v| v.re).collect())
    }

    /// Recovers the modes `1..=m` from samples on a uniform grid, discarding
    /// the mean and every mode above `m`.
    pub fn from_physical(samples: &[f64], m: usize) -> Result<SpectralField> {
        assert!(m >= 1, "cutoff must be at least 1");
        check_grid(samples.len(), m)?;
        let n = samples.len() as f64;
        let mut buf: Vec<Complex64> = samples
            .iter()
            .map(|&s| Complex64::new(s, 0.0))
            .collect();
        fft::forward(&mut buf);
        let coeffs = buf[1..=m].iter().map(|c| c / n).collect();
        Ok(SpectralField { m, coeffs })
    }

    /// `L^p` norm by trapezoidal quadrature on a uniform `n_grid`-point grid
    /// (on a periodic cell the trapezoid rule is the plain grid average).
    pub fn norm_lp(&self, p: f64, n_grid: usize) -> Result<f64> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::invalid("p", p, "Lebesgue exponent must be >= 1"));
        }
        let samples = self.to_physical(n_grid)?;
        let mean = samples
            .iter()
            .map(|s| s.abs().powf(p))
            .sum::<f64>()
            / n_grid as f64;
        Ok(mean.powf(1.0 / p))
    }

    /// `L^4` norm on the default oversampled grid `n_grid = 4m`.
    pub fn norm_l4(&self) -> f64 {
        self.norm_lp(4.0, 4 * self.m)
            .expect("4m grid is always admissible")
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        assert_eq!(self.m, other.m, "field addition needs matching cutoffs");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        SpectralField { m: self.m, coeffs }
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        assert_eq!(self.m, other.m, "field subtraction needs matching cutoffs");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        SpectralField { m: self.m, coeffs }
    }

    pub fn scale(&self, factor: f64) -> SpectralField {
        let coeffs = self.coeffs.iter().map(|c| c * factor).collect();
        SpectralField { m: self.m, coeffs }
    }

    /// `self + factor * other`, in place.
    pub fn axpy(&mut self, factor: f64, other: &SpectralField) {
        assert_eq!(self.m, other.m, "axpy needs matching cutoffs");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
    }

    /// Flat CSV row `m,re_1,im_1,...,re_m,im_m`.
    pub fn to_csv_row(&self) -> String {
        let mut row = self.m.to_string();
        for c in &self.coeffs {
            row.push(',');
            row.push_str(&format!("{},{}", c.re, c.im));
        }
        row
    }

    pub fn from_csv_row(row: &str) -> Result<SpectralField> {
        let cells: Vec<&str> = row.trim().split(',').collect();
        let m: usize = cells[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad cutoff cell '{}'", cells[0])))?;
        if m < 1 || cells.len() != 1 + 2 * m {
            return Err(Error::Parse(format!(
                "row with {} cells cannot hold a cutoff-{m} field",
                cells.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(m);
        for pair in cells[1..].chunks(2) {
            let re: f64 = pair[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient cell '{}'", pair[0])))?;
            let im: f64 = pair[1]
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient cell '{}'", pair[1])))?;
            coeffs.push(Complex64::new(re, im));
        }
        Ok(SpectralField { m, coeffs })
    }
}

fn check_grid(n_grid: usize, m: usize) -> Result<()> {
    if n_grid < 2 * m + 2 || n_grid % 2 != 0 {
        return Err(Error::Alias { n_grid, m });
    }
    Ok(())
}

/// Serialized form `{"m": ..., "coeffs": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct FieldRepr {
    m: usize,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for SpectralField {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FieldRepr {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpectralField {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FieldRepr::deserialize(deserializer)?;
        if repr.m < 1 {
            return Err(serde::de::Error::custom("cutoff must be at least 1"));
        }
        if repr.coeffs.len() != repr.m {
            return Err(serde::de::Error::custom(format!(
                "cutoff {} does not match {} coefficient pairs",
                repr.m,
                repr.coeffs.len()
            )));
        }
        Ok(SpectralField {
            m: repr.m,
            coeffs: repr
                .coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        })
    }
}

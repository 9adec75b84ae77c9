//! Error type shared by every module of the toolkit.

/// Domain and runtime failures surfaced by the public API.
///
/// Precondition violations that indicate a caller bug on *internal* plumbing
/// (mismatched field cutoffs in arithmetic, for example) panic instead; the
/// variants below are the contract-level failures a caller is expected to
/// handle.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Mode index 0 does not exist in the mean-zero space.
    #[error("mode index 0 is not part of the mean-zero space")]
    ZeroMode,

    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter {name}: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        reason: String,
        value: f64,
    },

    /// A grid is too coarse (or oddly shaped) for the requested band.
    #[error("grid of {n_grid} points cannot resolve modes up to {m}: need an even length >= 2m + 2")]
    Alias { n_grid: usize, m: usize },

    /// Two objects that must share a grid or cutoff do not.
    #[error("mismatched {what}: {left} vs {right}")]
    Mismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    /// The integrator abandoned a trajectory whose norm passed the guard.
    #[error("field norm {norm:.3e} exceeded the overflow guard at step {step} (t = {time})")]
    Overflow { step: usize, time: f64, norm: f64 },

    /// Not enough data to run the requested estimator.
    #[error("insufficient data for {what}: {detail}")]
    InsufficientData { what: &'static str, detail: String },

    /// Malformed serialized input.
    #[error("malformed input: {0}")]
    Parse(String),

    /// I/O failure surfaced by a streaming consumer (observers that write
    /// rows as the integration runs).
    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// Shorthand used by validation code throughout the crate.
    pub fn invalid(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
            value,
        }
    }
}

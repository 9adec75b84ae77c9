//! Reproducible random streams.
//!
//! Every Monte Carlo driver derives its randomness from a single 64-bit
//! master seed through counter-based stream ids, so results are bitwise
//! reproducible for a fixed seed regardless of thread count or the order in
//! which trajectories are scheduled.
//!
//! Stream layout: each (trajectory, mode) pair owns an independent ChaCha
//! stream. Mode ids are stable under changes of the Galerkin cutoff, which is
//! what lets refinement experiments reuse "the same noise" for the shared
//! low modes.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sentinel mode id for per-trajectory scalar decisions (not tied to a mode).
const SCALAR_STREAM: u64 = 0xFFFF;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Handle for the randomness of one trajectory of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    trajectory: u64,
}

impl RngStream {
    pub fn new(seed: u64, trajectory: u64) -> Self {
        assert!(
            trajectory < (1u64 << 48),
            "trajectory index {trajectory} exceeds the 48-bit stream budget"
        );
        RngStream { seed, trajectory }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trajectory(&self) -> u64 {
        self.trajectory
    }

    fn rng_for(&self, stream_lane: u64) -> ChaCha8Rng {
        // The master seed is expanded to ChaCha key material; trajectory and
        // lane select the stream, so distinct pairs never share output.
        let mut state = self.seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream((self.trajectory << 16) | stream_lane);
        rng
    }

    /// Independent stream for the noise of mode `k >= 1`.
    pub fn mode_rng(&self, mode: u32) -> ChaCha8Rng {
        assert!(
            (1..0xFFFF).contains(&mode),
            "mode id {mode} outside the 16-bit stream lane"
        );
        self.rng_for(mode as u64)
    }

    /// One stream per stored mode, `k = 1..=m`.
    pub fn mode_rngs(&self, m: usize) -> Vec<ChaCha8Rng> {
        (1..=m as u32).map(|k| self.mode_rng(k)).collect()
    }

    /// Stream for trajectory-level scalar draws (initial data, shuffles, ...).
    pub fn scalar_rng(&self) -> ChaCha8Rng {
        self.rng_for(SCALAR_STREAM)
    }
}

//! Thin wrapper around rustfft with a thread-local plan cache.
//!
//! All transforms in this crate are unnormalized DFTs:
//! forward  `F[k] = sum_j s[j] exp(-2 pi i j k / n)`,
//! inverse  `s[j] = sum_k c[k] exp(+2 pi i j k / n)`.
//! Callers apply their own `1/n` factors where needed.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                let dir = if inverse {
                    FftDirection::Inverse
                } else {
                    FftDirection::Forward
                };
                planner.plan_fft(n, dir)
            })
            .clone()
    })
}

/// In-place unnormalized forward DFT.
pub fn forward(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place unnormalized inverse DFT (no `1/n` factor).
pub fn inverse(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

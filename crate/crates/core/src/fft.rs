//! Shared FFT planner. rustfft caches plans per planner instance; a single
//! process-wide planner keeps repeated transforms of the same length cheap.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, LazyLock, Mutex};

static PLANNER: LazyLock<Mutex<FftPlanner<f64>>> =
    LazyLock::new(|| Mutex::new(FftPlanner::new()));

pub(crate) fn forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.lock().unwrap().plan_fft_forward(n)
}

pub(crate) fn inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.lock().unwrap().plan_fft_inverse(n)
}

/// Forward DFT (unnormalized, e^{-j2πnk/N} convention).
pub(crate) fn fft(samples: &[Complex64]) -> Vec<Complex64> {
    let mut buf = samples.to_vec();
    forward(buf.len()).process(&mut buf);
    buf
}

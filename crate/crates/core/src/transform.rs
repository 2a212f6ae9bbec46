//! Thin wrappers around `rustfft` for moving fields between mode space and
//! uniform physical grids on [0, 2π).

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized forward transform (kernel `e^{-2πi jk/N}`).
pub(crate) fn forward(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

/// In-place unnormalized inverse transform (kernel `e^{+2πi jk/N}`).
pub(crate) fn inverse(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
}

/// Smallest power of two strictly greater than `4 * k_max`.
///
/// Cubic products of fields band-limited to `|k| <= k_max` are alias-free on
/// `|k| <= k_max` for any grid with more than `4 k_max` points.
pub(crate) fn cubic_grid_len(k_max: usize) -> usize {
    (4 * k_max + 1).next_power_of_two()
}

/// Evaluates `Σ_k c_k e^{ikx_j}` on `n` uniform points. `coeffs` is indexed by `k + k_max`.
pub(crate) fn modes_to_grid(coeffs: &[Complex64], k_max: usize, n: usize) -> Vec<Complex64> {
    debug_assert!(n > 2 * k_max);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (idx, c) in coeffs.iter().enumerate() {
        let k = idx as i64 - k_max as i64;
        buf[k.rem_euclid(n as i64) as usize] = *c;
    }
    inverse(&mut buf);
    buf
}

/// Discrete Fourier coefficients of grid values, truncated to `|k| <= k_max`.
pub(crate) fn grid_to_modes(mut values: Vec<Complex64>, k_max: usize) -> Vec<Complex64> {
    let n = values.len();
    forward(&mut values);
    let scale = 1.0 / n as f64;
    (-(k_max as i64)..=k_max as i64)
        .map(|k| values[k.rem_euclid(n as i64) as usize] * scale)
        .collect()
}

//! FFT along tensor axes, with the analysis/synthesis conventions used
//! throughout the crate.
//!
//! * analysis: `c_k = (1/N) * sum_j f_j e^{-2 pi i j k / N}` — values to
//!   Fourier coefficients;
//! * synthesis: `f_j = sum_k c_k e^{+2 pi i j k / N}` — coefficients to
//!   values;
//! * coefficient tensors use FFT bin layout; integer modes `k` in
//!   `-K..=K` live in bins `k >= 0 -> k`, `k < 0 -> N + k` (grids are kept
//!   odd-sized, `N = 2K + 1`, so the mode range is symmetric).

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Values at equispaced angles -> Fourier coefficients (scaled by 1/N).
    Analysis,
    /// Fourier coefficients -> values (unscaled inverse transform).
    Synthesis,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place FFT of every lane of `t` along `axis`.
pub fn fft_axis(t: &mut Tensor, axis: usize, dir: Direction) {
    let n = t.dims()[axis];
    if n == 1 {
        return;
    }
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match dir {
            Direction::Analysis => p.plan_fft_forward(n),
            Direction::Synthesis => p.plan_fft_inverse(n),
        }
    });
    let scale = match dir {
        Direction::Analysis => 1.0 / n as f64,
        Direction::Synthesis => 1.0,
    };
    t.map_lanes(axis, |lane| {
        fft.process(lane);
        if scale != 1.0 {
            for v in lane.iter_mut() {
                *v *= scale;
            }
        }
    });
}

/// Transform along all of the listed axes.
pub fn fft_axes(t: &mut Tensor, axes: &[usize], dir: Direction) {
    for &axis in axes {
        fft_axis(t, axis, dir);
    }
}

/// Signed integer mode represented by FFT bin `b` of an `n`-point transform.
/// For odd `n = 2K + 1` this is the symmetric range `-K..=K`.
pub fn mode_of_bin(b: usize, n: usize) -> i64 {
    debug_assert!(b < n);
    if b <= (n - 1) / 2 {
        b as i64
    } else {
        b as i64 - n as i64
    }
}

/// FFT bin holding signed mode `k` in an `n`-point transform.
pub fn bin_of_mode(k: i64, n: usize) -> usize {
    let half = ((n - 1) / 2) as i64;
    debug_assert!(k >= -(n as i64 - 1 - half) && k <= half, "mode out of range");
    if k >= 0 {
        k as usize
    } else {
        (k + n as i64) as usize
    }
}

/// Largest signed mode representable in an odd `n`-point grid (`K` with
/// `n = 2K + 1`).
pub fn max_mode(n: usize) -> i64 {
    ((n - 1) / 2) as i64
}

/// Smallest odd grid size that holds modes `-k..=k`.
pub fn grid_for_mode(k: i64) -> usize {
    (2 * k + 1) as usize
}

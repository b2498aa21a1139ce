//! Analytic smoothing of finitely differentiable data by a compactly
//! supported Fourier multiplier.
//!
//! The symbol is identically `1` on `[-1, 1]`, vanishes outside `[-2, 2]`,
//! and bridges the two plateaus with the classical `e^{-1/t}` smoothstep, so
//! it is `C^infty`. Because the symbol equals `1` in a neighbourhood of the
//! origin, every moment of the convolution kernel beyond the zeroth
//! vanishes: polynomials pass through the smoother exactly. Scaled to width
//! `sigma` (with cutoff constant `c`), the smoother keeps modes
//! `|k| <= c / sigma` untouched and kills modes `|k| >= 2c / sigma`; the
//! result is an entire (trigonometric-polynomial) function whose distance to
//! the input decays like `sigma^l` on `C^l` data — the quantitative bridge
//! between finite regularity and the analytic iteration.
//!
//! Three front ends are provided:
//! * [`smooth_angle_modes`] — grid functions (angle modes filtered, action
//!   polynomials untouched by the moment property);
//! * [`smooth_periodic`] — raw samples of a periodic function;
//! * [`smooth_box_1d`] — data on an interval: a declared polynomial base
//!   passes through unchanged, the remainder is blended to compact support
//!   by a plateau cutoff, periodized over a three-fold enlarged interval,
//!   and filtered there.

use num_complex::Complex64;

use crate::fft::{fft_axis, mode_of_bin, Direction};
use crate::grid::GridFunction;
use crate::tensor::Tensor;

/// `C^infty` smoothstep: `0` for `t <= 0`, `1` for `t >= 1`, strictly
/// increasing in between, all derivatives vanishing at both ends.
pub fn bridge(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let q = (-1.0 / t).exp();
    let q1 = (-1.0 / (1.0 - t)).exp();
    q / (q + q1)
}

/// Multiplier symbol: `1` on `|xi| <= 1`, `0` on `|xi| >= 2`, smooth bridge
/// in between.
pub fn multiplier_symbol(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        bridge(2.0 - a)
    }
}

/// Per-dimension multiplier weight for an integer angle mode.
fn mode_weight(k: i64, sigma: f64, c_cut: f64) -> f64 {
    multiplier_symbol(sigma * k.abs() as f64 / c_cut)
}

/// Smooth a grid function at scale `sigma`: every angle mode `k` is scaled
/// by `prod_i m(sigma k_i / c)`. Action dependence is polynomial and passes
/// through exactly (vanishing kernel moments), so no action transform is
/// performed — in particular purely action-dependent inputs are returned
/// unchanged without any spectral work.
pub fn smooth_angle_modes(f: &GridFunction, sigma: f64, c_cut: f64) -> GridFunction {
    assert!(sigma > 0.0 && c_cut > 0.0);
    let d = f.dim();
    if f.shape().angle_modes.iter().all(|&k| k == 0) {
        return f.clone();
    }
    let mut out = f.clone();
    let dims = out.coeffs().dims().to_vec();
    let mut idx = vec![0usize; dims.len()];
    for off in 0..out.coeffs().len() {
        let mut w = 1.0f64;
        for i in 0..d {
            w *= mode_weight(mode_of_bin(idx[i], dims[i]), sigma, c_cut);
        }
        if w != 1.0 {
            let v = out.coeffs().data()[off];
            out.coeffs_mut().data_mut()[off] = v * w;
        }
        for axis in (0..dims.len()).rev() {
            idx[axis] += 1;
            if idx[axis] < dims[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
    // the multiplier may have emptied the highest modes; drop exact zeros
    out.prune(0.0)
}

/// Smooth equispaced samples of a real periodic function on `[0, 2 pi)`.
pub fn smooth_periodic(values: &[f64], sigma: f64, c_cut: f64) -> Vec<f64> {
    assert!(sigma > 0.0 && c_cut > 0.0);
    let n = values.len();
    let data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut t = Tensor::from_data(&[n], data);
    fft_axis(&mut t, 0, Direction::Analysis);
    for (b, v) in t.data_mut().iter_mut().enumerate() {
        *v *= mode_weight(mode_of_bin(b, n), sigma, c_cut);
    }
    fft_axis(&mut t, 0, Direction::Synthesis);
    t.data().iter().map(|v| v.re).collect()
}

/// Smooth samples of a function on the interval `[lo, hi]`.
///
/// `f` must be evaluable on the enlarged interval `[lo - m, hi + m]` with
/// `m = hi - lo` (the plateau cutoff needs room to fall off). `base` is the
/// polynomial part that must pass through exactly — it is subtracted, the
/// remainder is blended to compact support, periodized over the three-fold
/// interval, filtered, and the base is added back.
///
/// Returns `(grid, smoothed)` with `n_core` equispaced points on
/// `[lo, hi]`.
pub fn smooth_box_1d(
    f: impl Fn(f64) -> f64,
    base: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    sigma: f64,
    c_cut: f64,
    n_core: usize,
) -> (Vec<f64>, Vec<f64>) {
    assert!(hi > lo && sigma > 0.0 && n_core >= 2);
    let w = hi - lo;
    // three-fold periodization interval [lo - w, hi + w)
    let t_lo = lo - w;
    let t_len = 3.0 * w;
    let n_t = 3 * n_core * 4; // oversample the torus grid
    let h = t_len / n_t as f64;
    // plateau: 1 on [lo, hi], falls to 0 over half the margin on each side
    let fall = 0.5 * w;
    let chi = |y: f64| -> f64 {
        if y >= lo && y <= hi {
            1.0
        } else if y < lo {
            bridge(1.0 - (lo - y) / fall)
        } else {
            bridge(1.0 - (y - hi) / fall)
        }
    };
    let mut data: Vec<Complex64> = Vec::with_capacity(n_t);
    for j in 0..n_t {
        let y = t_lo + j as f64 * h;
        let v = chi(y) * (f(y) - base(y));
        data.push(Complex64::new(v, 0.0));
    }
    let mut t = Tensor::from_data(&[n_t], data);
    fft_axis(&mut t, 0, Direction::Analysis);
    for (b, v) in t.data_mut().iter_mut().enumerate() {
        let k = mode_of_bin(b, n_t) as f64;
        let xi = std::f64::consts::TAU * k / t_len;
        *v *= multiplier_symbol(sigma * xi / c_cut);
    }
    fft_axis(&mut t, 0, Direction::Synthesis);
    // restrict to the core grid (grid-aligned by construction)
    let mut grid = Vec::with_capacity(n_core);
    let mut out = Vec::with_capacity(n_core);
    let step = (n_t as f64 / 3.0) / (n_core - 1) as f64;
    for i in 0..n_core {
        let j = ((n_t / 3) as f64 + i as f64 * step).round() as usize;
        let j = j.min(n_t - 1);
        let y = t_lo + j as f64 * h;
        grid.push(y);
        out.push(t.data()[j].re + base(y));
    }
    (grid, out)
}

/// A smoothing schedule: the scales at which a finitely differentiable
/// Hamiltonian is replaced by analytic approximations.
#[derive(Clone, Debug)]
pub struct SmoothingFamily {
    pub sigmas: Vec<f64>,
    pub c_cut: f64,
}

impl SmoothingFamily {
    /// Geometric family `sigma_j = sigma_0 xi^j`.
    pub fn geometric(sigma0: f64, xi: f64, count: usize, c_cut: f64) -> Self {
        assert!(sigma0 > 0.0 && xi > 0.0 && xi < 1.0);
        let sigmas = (0..count).map(|j| sigma0 * xi.powi(j as i32)).collect();
        SmoothingFamily { sigmas, c_cut }
    }

    /// Apply the family to a grid function.
    pub fn apply(&self, f: &GridFunction) -> Vec<GridFunction> {
        self.sigmas
            .iter()
            .map(|&s| smooth_angle_modes(f, s, self.c_cut))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridShape, StripDomain};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn domain() -> StripDomain {
        StripDomain::new(vec![1.0, 2.0], vec![1.5, 2.5], 0.3, 0.7)
    }

    #[test]
    fn bridge_is_a_partition() {
        assert_eq!(bridge(-0.5), 0.0);
        assert_eq!(bridge(0.0), 0.0);
        assert_eq!(bridge(1.0), 1.0);
        assert_eq!(bridge(2.0), 1.0);
        for t in [0.1, 0.25, 0.5, 0.8] {
            let h = bridge(t);
            assert!(h > 0.0 && h < 1.0);
            assert!((h + bridge(1.0 - t) - 1.0).abs() < 1e-15);
        }
        // monotone
        let mut prev = 0.0;
        for i in 0..=100 {
            let h = bridge(i as f64 / 100.0);
            assert!(h >= prev);
            prev = h;
        }
    }

    #[test]
    fn symbol_plateaus() {
        assert_eq!(multiplier_symbol(0.0), 1.0);
        assert_eq!(multiplier_symbol(0.99), 1.0);
        assert_eq!(multiplier_symbol(-1.0), 1.0);
        assert_eq!(multiplier_symbol(2.0), 0.0);
        assert_eq!(multiplier_symbol(-3.5), 0.0);
        let mid = multiplier_symbol(1.5);
        assert!(mid > 0.0 && mid < 1.0);
        assert!((mid - 0.5).abs() < 1e-12, "bridge midpoint: {mid}");
    }

    #[test]
    fn low_modes_pass_exactly_high_modes_die() {
        let shape = GridShape::new(vec![5, 5], vec![1, 1]);
        let f = GridFunction::from_sampler(domain(), shape, true, |_y, x| {
            c(x[0].cos() + (x[0] + x[1]).sin() + 0.01 * (5.0 * x[0]).cos())
        });
        // sigma = 0.5, c = 8: pass |k| <= 16 -> identity here
        let s1 = smooth_angle_modes(&f, 0.5, 8.0);
        let probe_y = [c(1.2), c(2.2)];
        let probe_x = [c(0.7), c(1.9)];
        assert!((s1.evaluate(&probe_y, &probe_x) - f.evaluate(&probe_y, &probe_x)).norm() < 1e-13);
        // sigma = 4, c = 1: kill |k| >= 0.5, i.e. every nonzero mode
        let s2 = smooth_angle_modes(&f, 4.0, 1.0);
        let got = s2.evaluate(&probe_y, &probe_x);
        assert!(got.norm() < 1e-13, "all modes should vanish, got {got}");
    }

    #[test]
    fn action_polynomials_pass_through_untouched() {
        let shape = GridShape::new(vec![0, 0], vec![3, 2]);
        let f = GridFunction::from_sampler(domain(), shape, true, |y, _x| {
            c(0.5 * y[0] * y[0] + y[1])
        });
        let s = smooth_angle_modes(&f, 0.3, 8.0);
        for (a, b) in s.coeffs().data().iter().zip(f.coeffs().data()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn jackson_rate_on_finitely_differentiable_function() {
        // f with Fourier coefficients ~ k^{-(p+1)}: f is (roughly) C^p with
        // p = 2.5; the smoothing error in sup norm must scale like sigma^p.
        let p = 2.5;
        let n = 4096;
        let kmax = n / 2 - 1;
        let mut values = vec![0.0f64; n];
        for (j, v) in values.iter_mut().enumerate() {
            let x = std::f64::consts::TAU * j as f64 / n as f64;
            let mut acc = 0.0;
            for k in 1..=kmax {
                acc += (k as f64 * x).cos() / (k as f64).powf(p + 1.0);
            }
            *v = acc;
        }
        let c_cut = 1.0;
        let sigmas = [0.2, 0.1, 0.05, 0.025];
        let mut errs = Vec::new();
        for &s in &sigmas {
            let sm = smooth_periodic(&values, s, c_cut);
            let e = values
                .iter()
                .zip(&sm)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        // least-squares slope of log err vs log sigma
        let slope = fit_slope(&sigmas, &errs);
        assert!(
            (slope - p).abs() < 0.5,
            "fitted slope {slope} not near {p}; errors {errs:?}"
        );
    }

    #[test]
    fn analytic_functions_smooth_superpolynomially() {
        // Poisson-kernel-type coefficients rho^k: analytic; the error decays
        // like rho^{c/sigma}, far faster than any fixed power of sigma.
        let rho: f64 = 0.5;
        let n = 2048;
        let mut values = vec![0.0f64; n];
        for (j, v) in values.iter_mut().enumerate() {
            let x = std::f64::consts::TAU * j as f64 / n as f64;
            let mut acc = 0.0;
            for k in 1..=(n / 2 - 1) {
                acc += rho.powi(k as i32) * (k as f64 * x).cos();
            }
            *v = acc;
        }
        let sigmas = [0.1, 0.05, 0.025];
        let mut errs = Vec::new();
        for &s in &sigmas {
            let sm = smooth_periodic(&values, s, 1.0);
            let e = values
                .iter()
                .zip(&sm)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            errs.push(e.max(1e-300));
        }
        let slope = fit_slope(&sigmas, &errs);
        assert!(slope > 6.0, "analytic slope {slope} should exceed 6; errors {errs:?}");
    }

    #[test]
    fn box_smoothing_passes_declared_polynomial_base() {
        let quad = |y: f64| 0.5 * y * y - y + 3.0;
        let (grid, sm) = smooth_box_1d(quad, quad, 1.0, 2.0, 0.1, 8.0, 33);
        for (y, v) in grid.iter().zip(&sm) {
            assert!(
                (v - quad(*y)).abs() < 1e-12,
                "base not passed through at {y}: {v}"
            );
        }
    }

    #[test]
    fn box_smoothing_rate_on_kink() {
        // |y - 1.5| has a kink: C^1-with-Lipschitz-derivative is C^{1,1}; the
        // smoothing error at the kink scales like sigma (first order).
        let f = |y: f64| (y - 1.5).abs();
        let sigmas = [0.2, 0.1, 0.05, 0.025];
        let mut errs = Vec::new();
        for &s in &sigmas {
            let (grid, sm) = smooth_box_1d(f, |_| 0.0, 1.0, 2.0, s, 1.0, 65);
            let e = grid
                .iter()
                .zip(&sm)
                .map(|(y, v)| (v - f(*y)).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        let slope = fit_slope(&sigmas, &errs);
        assert!(
            (slope - 1.0).abs() < 0.4,
            "kink slope {slope}; errors {errs:?}"
        );
    }

    #[test]
    fn geometric_family_applies_in_order() {
        let shape = GridShape::new(vec![3, 0], vec![1, 1]);
        let f = GridFunction::from_sampler(domain(), shape, true, |_y, x| {
            c(x[0].cos() + 0.1 * (3.0 * x[0]).cos())
        });
        let fam = SmoothingFamily::geometric(1.0, 0.5, 3, 1.0);
        assert_eq!(fam.sigmas.len(), 3);
        assert!(fam.sigmas[1] == 0.5 && fam.sigmas[2] == 0.25);
        let out = fam.apply(&f);
        // sigma = 1, c = 1:支 pass |k| <= 1, kill |k| >= 2: mode 3 gone
        let probe_x = [c(0.4), c(0.0)];
        let probe_y = [c(1.2), c(2.2)];
        let v0 = out[0].evaluate(&probe_y, &probe_x);
        assert!((v0 - probe_x[0].cos()).norm() < 1e-12);
        // sigma = 0.25: pass |k| <= 4: identity
        let v2 = out[2].evaluate(&probe_y, &probe_x);
        assert!((v2 - f.evaluate(&probe_y, &probe_x)).norm() < 1e-12);
    }

    fn fit_slope(sigmas: &[f64], errs: &[f64]) -> f64 {
        let xs: Vec<f64> = sigmas.iter().map(|s| s.ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }
}

//! The cohomological equation `D_omega g = f - <f>` over a fixed frequency
//! map, with the loss-of-regularity bound used to certify the solve.
//!
//! In Fourier modes the directional derivative `D_omega` acts diagonally,
//! `(D_omega g)_n = i (omega(y) . n) g_n(y)`, so the solution is
//! `g_n = f_n / (i omega . n)` for `n != 0` and `g_0 = 0`. The frequency may
//! depend on the action; divisors are evaluated at the Chebyshev nodes. The
//! sup-norm of the solution on a narrower strip obeys a small-divisor bound
//! `||g||_{s - sigma} <= C alpha^{-1} sigma^{-nu} ||f||_s` with `nu = tau + 1`
//! whose constant is computed by [`c_l_constant`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::mode_of_bin;
use crate::grid::{GridFunction, GridShape};

/// Small-divisor constant `C_l = 2^{d+1-(tau+l)} sqrt(Gamma(2(tau+l)+1))`
/// appearing in the `||g||_{s-sigma} <= C_l alpha^-1 sigma^-(tau+l+1) ||f||_s`
/// family of bounds (`l = 0` gives the sup-norm case).
pub fn c_l_constant(d: usize, tau: f64, l: f64) -> f64 {
    let a = tau + l;
    let log_gamma = libm::lgamma(2.0 * a + 1.0);
    (d as f64 + 1.0 - a).exp2() * (0.5 * log_gamma).exp()
}

/// Result of a cohomological solve.
#[derive(Clone, Debug)]
pub struct CohomologySolution {
    pub g: GridFunction,
    /// Smallest `|omega . n|` met over nonzero modes (at any node).
    pub min_divisor: f64,
    /// Mode realising the smallest divisor.
    pub worst_mode: Vec<i64>,
    /// Number of (mode, node) coefficients zeroed because their divisor was
    /// below the floor while the amplitude was negligible.
    pub zeroed: usize,
}

/// Solve `D_omega g = f - <f>` mode by mode.
///
/// `omega_at` returns the frequency vector at a (real) action point. Modes
/// whose divisor falls below `floor` are rejected with a condition error
/// when their amplitude exceeds `negligible`, and silently zeroed otherwise
/// (they belong to the truncated tail, not to the solved part).
pub fn solve_cohomological(
    f: &GridFunction,
    omega_at: impl Fn(&[f64]) -> Vec<f64>,
    floor: f64,
    negligible: f64,
) -> Result<CohomologySolution> {
    let d = f.dim();
    let mut g = f.clone();
    g.set_real(f.is_real());
    let cheb = f.cheb_grids();
    let dims = g.coeffs().dims().to_vec();
    let mut min_divisor = f64::INFINITY;
    let mut worst_mode = vec![0i64; d];
    let mut zeroed = 0usize;

    // frequency at every action node combination, cached
    let action_dims: Vec<usize> = dims[d..].to_vec();
    let n_nodes: usize = action_dims.iter().product();
    let mut omegas: Vec<Vec<f64>> = Vec::with_capacity(n_nodes);
    {
        let mut idx = vec![0usize; d];
        for _ in 0..n_nodes {
            let y: Vec<f64> = (0..d).map(|i| cheb[i].nodes[idx[i]]).collect();
            omegas.push(omega_at(&y));
            for axis in (0..d).rev() {
                idx[axis] += 1;
                if idx[axis] < action_dims[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    let mut idx = vec![0usize; dims.len()];
    for off in 0..g.coeffs().len() {
        let mut mode = vec![0i64; d];
        let mut is_zero_mode = true;
        for i in 0..d {
            mode[i] = mode_of_bin(idx[i], dims[i]);
            if mode[i] != 0 {
                is_zero_mode = false;
            }
        }
        // flat index of the action-node combination
        let mut node_flat = 0usize;
        for i in 0..d {
            node_flat = node_flat * action_dims[i] + idx[d + i];
        }
        let value = g.coeffs().data()[off];
        if is_zero_mode {
            g.coeffs_mut().data_mut()[off] = Complex64::new(0.0, 0.0);
        } else {
            let omega = &omegas[node_flat];
            let mut dot = 0.0f64;
            for i in 0..d {
                dot += omega[i] * mode[i] as f64;
            }
            let divisor = dot.abs();
            if divisor < min_divisor {
                min_divisor = divisor;
                worst_mode = mode.clone();
            }
            if divisor < floor {
                if value.norm() > negligible {
                    return Err(Error::condition(
                        "DivisorFloor",
                        format!(
                            "mode {mode:?}: |omega.n| = {divisor:.3e} < floor {floor:.3e} \
                             with amplitude {:.3e} > {negligible:.3e}",
                            value.norm()
                        ),
                    ));
                }
                g.coeffs_mut().data_mut()[off] = Complex64::new(0.0, 0.0);
                zeroed += 1;
            } else {
                // g_n = f_n / (i dot) = -i f_n / dot  (dot signed)
                g.coeffs_mut().data_mut()[off] =
                    value / Complex64::new(0.0, dot);
            }
        }
        for axis in (0..dims.len()).rev() {
            idx[axis] += 1;
            if idx[axis] < dims[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }

    Ok(CohomologySolution {
        g,
        min_divisor,
        worst_mode,
        zeroed,
    })
}

/// Apply `D_omega` to a grid function: multiply mode `n` at node `y` by
/// `i (omega(y) . n)`. The action resolution is raised by `extra_nodes`
/// first so that action-dependent frequencies are resolved.
pub fn apply_d_omega(
    g: &GridFunction,
    omega_at: impl Fn(&[f64]) -> Vec<f64>,
    extra_nodes: usize,
) -> GridFunction {
    let d = g.dim();
    let target = GridShape::new(
        g.shape().angle_modes.clone(),
        g.shape()
            .action_nodes
            .iter()
            .map(|&m| m + extra_nodes)
            .collect(),
    );
    let up = g.resample(&target);
    let cheb = up.cheb_grids();
    let dims = up.coeffs().dims().to_vec();
    let mut out = up.clone();
    let mut idx = vec![0usize; dims.len()];
    for off in 0..out.coeffs().len() {
        let mut dot = 0.0f64;
        let y: Vec<f64> = (0..d).map(|i| cheb[i].nodes[idx[d + i]]).collect();
        let omega = omega_at(&y);
        for i in 0..d {
            dot += omega[i] * mode_of_bin(idx[i], dims[i]) as f64;
        }
        let v = out.coeffs().data()[off];
        out.coeffs_mut().data_mut()[off] = v * Complex64::new(0.0, dot);
        for axis in (0..dims.len()).rev() {
            idx[axis] += 1;
            if idx[axis] < dims[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
    out
}

/// Sup-norm of the solve residual `D_omega g - (f - <f>)` on the strip
/// `(r_eval, s_eval)`.
pub fn solve_residual(
    f: &GridFunction,
    g: &GridFunction,
    omega_at: impl Fn(&[f64]) -> Vec<f64>,
    r_eval: f64,
    s_eval: f64,
) -> f64 {
    let dg = apply_d_omega(g, omega_at, 2);
    let rhs = f.sub(&f.mean_over_angles());
    dg.sub(&rhs).norm(r_eval, s_eval)
}

/// A certified inequality check: `lhs <= rhs` with the numbers kept.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub passes: bool,
}

/// The loss-of-regularity bound for a solve:
/// `||g||_{r, s-sigma} <= constant * alpha^{-1} sigma^{-(tau+1)} ||f||_{r,s}`.
pub fn solve_bound_check(
    f: &GridFunction,
    g: &GridFunction,
    constant: f64,
    alpha: f64,
    tau: f64,
    sigma: f64,
    r_eval: f64,
    s_eval: f64,
) -> BoundCheck {
    let nu = tau + 1.0;
    let lhs = g.norm(r_eval, s_eval - sigma);
    let rhs = constant / alpha * sigma.powf(-nu) * f.norm(r_eval, s_eval);
    BoundCheck {
        name: "SolveBound".to_string(),
        lhs,
        rhs,
        passes: lhs <= rhs,
    }
}

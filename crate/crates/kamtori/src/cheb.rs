//! Chebyshev–Lobatto interpolation on an interval.
//!
//! Action dependence of grid functions lives on Chebyshev–Lobatto nodes of a
//! real interval `[a, b]`. Values at the nodes determine the degree-`M-1`
//! interpolating polynomial; this module provides the nodes, barycentric
//! evaluation at arbitrary complex points (the strip!), the spectral
//! differentiation matrix, and value <-> Chebyshev-coefficient transforms.

use num_complex::Complex64;

/// Chebyshev–Lobatto grid on `[a, b]` with `m` nodes (descending order:
/// `x_0 = b`, `x_{m-1} = a`). `m = 1` degenerates to the single midpoint,
/// representing functions constant in this coordinate.
#[derive(Clone, Debug)]
pub struct ChebGrid {
    pub a: f64,
    pub b: f64,
    /// Mapped nodes, descending.
    pub nodes: Vec<f64>,
    /// Barycentric weights (up to common scaling).
    pub weights: Vec<f64>,
}

impl ChebGrid {
    pub fn new(a: f64, b: f64, m: usize) -> Self {
        assert!(m >= 1, "need at least one node");
        assert!(b >= a, "interval endpoints out of order");
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        if m == 1 {
            return ChebGrid {
                a,
                b,
                nodes: vec![c],
                weights: vec![1.0],
            };
        }
        let n = m - 1;
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for j in 0..m {
            let t = (std::f64::consts::PI * j as f64 / n as f64).cos();
            nodes.push(c + h * t);
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            weights.push(w);
        }
        ChebGrid { a, b, nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    /// Barycentric evaluation of the interpolant at a complex point.
    ///
    /// Exact (up to rounding) for any polynomial of degree `< m` sampled at
    /// the nodes, at any point of the complex plane.
    pub fn eval(&self, values: &[Complex64], z: Complex64) -> Complex64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        if self.nodes.len() == 1 {
            return values[0];
        }
        // Snap to a node if z is (numerically) on it.
        let scale = (self.b - self.a).max(1e-300);
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        for (j, (&xj, &wj)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let diff = z - Complex64::new(xj, 0.0);
            if diff.norm() < 1e-14 * scale {
                return values[j];
            }
            let t = Complex64::new(wj, 0.0) / diff;
            num += t * values[j];
            den += t;
        }
        num / den
    }

    /// Spectral differentiation matrix `D` (row-major `m x m`): the values of
    /// the interpolant's derivative at the nodes are `D * values`.
    pub fn diff_matrix(&self) -> Vec<f64> {
        let m = self.nodes.len();
        if m == 1 {
            return vec![0.0];
        }
        let n = m - 1;
        let mut d = vec![0.0f64; m * m];
        let corner = |j: usize| -> f64 {
            if j == 0 || j == n {
                2.0
            } else {
                1.0
            }
        };
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    d[i * m + j] =
                        (corner(i) / corner(j)) * sign / (self.nodes[i] - self.nodes[j]);
                }
            }
        }
        // Diagonal by the negative-sum trick (rows of D annihilate constants).
        for i in 0..m {
            let mut s = 0.0;
            for j in 0..m {
                if i != j {
                    s += d[i * m + j];
                }
            }
            d[i * m + i] = -s;
        }
        d
    }

    /// Normalized barycentric weight vector at `z`: the interpolant value is
    /// the dot product of this vector with the node values. If `z` collides
    /// with a node the vector is the corresponding unit vector.
    pub fn bary_weights_at(&self, z: Complex64) -> Vec<Complex64> {
        let m = self.nodes.len();
        if m == 1 {
            return vec![Complex64::new(1.0, 0.0)];
        }
        let scale = (self.b - self.a).max(1e-300);
        let mut raw = vec![Complex64::new(0.0, 0.0); m];
        for (j, (&xj, &wj)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let diff = z - Complex64::new(xj, 0.0);
            if diff.norm() < 1e-14 * scale {
                let mut unit = vec![Complex64::new(0.0, 0.0); m];
                unit[j] = Complex64::new(1.0, 0.0);
                return unit;
            }
            raw[j] = Complex64::new(wj, 0.0) / diff;
        }
        let den: Complex64 = raw.iter().sum();
        for v in raw.iter_mut() {
            *v /= den;
        }
        raw
    }

    /// Row-major `target.len() x self.len()` matrix resampling node values of
    /// this grid onto the nodes of `target` (exact for polynomials of degree
    /// `< self.len()`).
    pub fn resample_matrix(&self, target: &ChebGrid) -> Vec<Complex64> {
        let m_src = self.len();
        let m_dst = target.len();
        let mut mat = vec![Complex64::new(0.0, 0.0); m_dst * m_src];
        for (i, &x) in target.nodes.iter().enumerate() {
            let w = self.bary_weights_at(Complex64::new(x, 0.0));
            mat[i * m_src..(i + 1) * m_src].copy_from_slice(&w);
        }
        mat
    }

    /// Row-major `m x m` matrix mapping node values to Chebyshev coefficients.
    pub fn analysis_matrix(&self) -> Vec<Complex64> {
        let m = self.nodes.len();
        let mut mat = vec![Complex64::new(0.0, 0.0); m * m];
        if m == 1 {
            mat[0] = Complex64::new(1.0, 0.0);
            return mat;
        }
        let n = m - 1;
        let nf = n as f64;
        for k in 0..m {
            let gamma = if k == 0 || k == n { nf } else { 0.5 * nf };
            for j in 0..m {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                let ang = std::f64::consts::PI * (k * j) as f64 / nf;
                mat[k * m + j] = Complex64::new(w * ang.cos() / gamma, 0.0);
            }
        }
        mat
    }

    /// Row-major `m x m` matrix mapping Chebyshev coefficients to node values.
    pub fn synthesis_matrix(&self) -> Vec<Complex64> {
        let m = self.nodes.len();
        let mut mat = vec![Complex64::new(0.0, 0.0); m * m];
        if m == 1 {
            mat[0] = Complex64::new(1.0, 0.0);
            return mat;
        }
        let n = m - 1;
        let nf = n as f64;
        for j in 0..m {
            for k in 0..m {
                let ang = std::f64::consts::PI * (k * j) as f64 / nf;
                mat[j * m + k] = Complex64::new(ang.cos(), 0.0);
            }
        }
        mat
    }

    /// Chebyshev coefficients of the interpolant from node values.
    ///
    /// Returns `a` with `f(x) = sum_m a_m T_m(t)`, `t` the affine pullback of
    /// `x` to `[-1, 1]`.
    pub fn analysis(&self, values: &[Complex64]) -> Vec<Complex64> {
        let m = self.nodes.len();
        debug_assert_eq!(values.len(), m);
        if m == 1 {
            return vec![values[0]];
        }
        let n = m - 1;
        let nf = n as f64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
        for (k, ck) in coeffs.iter_mut().enumerate() {
            let gamma = if k == 0 || k == n { nf } else { 0.5 * nf };
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &fj) in values.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                let ang = std::f64::consts::PI * (k * j) as f64 / nf;
                s += fj * (w * ang.cos());
            }
            *ck = s / gamma;
        }
        coeffs
    }

    /// Node values from Chebyshev coefficients (inverse of [`analysis`]).
    ///
    /// [`analysis`]: ChebGrid::analysis
    pub fn synthesis(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let m = self.nodes.len();
        debug_assert_eq!(coeffs.len(), m);
        if m == 1 {
            return vec![coeffs[0]];
        }
        let n = m - 1;
        let nf = n as f64;
        let mut values = vec![Complex64::new(0.0, 0.0); m];
        for (j, vj) in values.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for (k, &ak) in coeffs.iter().enumerate() {
                let ang = std::f64::consts::PI * (k * j) as f64 / nf;
                s += ak * ang.cos();
            }
            *vj = s;
        }
        values
    }
}

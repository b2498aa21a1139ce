//! Constructive KAM iteration for finitely differentiable perturbations of
//! integrable Hamiltonians.
//!
//! The crate builds invariant-torus approximations for Hamiltonians of the
//! form `H(y, x) = K(y) + P(y, x)` on the cotangent bundle of the torus,
//! where `K` is integrable and `P` is a small perturbation with limited
//! smoothness. The toolbox is organised as:
//!
//! * [`tensor`], [`cheb`], [`fft`] — dense multi-dimensional arrays and the
//!   spectral transforms (Fourier in angles, Chebyshev in actions) everything
//!   else is built on;
//! * [`grid`] — grid functions on a complex strip around the real phase
//!   space: evaluation, derivatives, anti-aliased products, rigorous-style
//!   sup-norm reporting on distinguished boundaries;
//! * [`freq`] — Diophantine frequency checks, non-resonant action sets and
//!   Monte-Carlo measure estimates of their complements;
//! * [`smooth`] — analytic smoothing of finitely differentiable data via a
//!   compactly supported Fourier multiplier, with polynomial pass-through;
//! * [`cohom`] — the cohomological (small-divisor) equation over a fixed
//!   frequency and explicit loss-of-regularity bounds;
//! * [`step`] — one iteration of the quadratic scheme: truncate, solve,
//!   transform, and re-estimate, with every smallness gate ledgered;
//! * [`scheme`] — the full iteration: schedules, smallness pre-checks, the
//!   loop, and assembly of the invariant torus embedding;
//! * [`oracle`] — independent dynamical verification (flow integration,
//!   invariance/symplecticity/isotropy defects);
//! * [`report`], [`config`], [`cli`] — run artefacts (JSON/CSV), TOML
//!   configuration and the command-line front end.

pub mod cheb;
pub mod cli;
pub mod cohom;
pub mod config;
pub mod error;
pub mod fft;
pub mod freq;
pub mod grid;
pub mod oracle;
pub mod report;
pub mod scheme;
pub mod smooth;
pub mod step;
pub mod tensor;

pub use error::{Error, Result};

//! Diophantine frequencies: resonance checks, non-resonant action sets, and
//! Monte-Carlo measure estimates of their complements.
//!
//! A frequency `omega` is `(alpha, tau)`-Diophantine up to the cutoff `N`
//! when `|omega . k| >= alpha / |k|_1^tau` for all integer vectors
//! `0 < |k|_1 <= N`. The scan works with the *margin*
//! `m(omega) = min_k |omega . k| |k|_1^tau`, so one pass answers the check
//! for every `alpha` at once: the condition holds iff `m(omega) >= alpha`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Integer mode vectors `0 < |k|_1 <= cutoff`, one representative per
/// `{k, -k}` pair (first nonzero entry positive), ordered by increasing
/// `|k|_1`.
#[derive(Clone, Debug)]
pub struct ModeList {
    pub dim: usize,
    pub cutoff: i64,
    /// Flattened mode vectors, `dim` entries each.
    pub modes: Vec<i64>,
    /// `|k|_1` per mode.
    pub l1: Vec<i64>,
}

impl ModeList {
    pub fn new(dim: usize, cutoff: i64) -> Self {
        assert!(dim >= 1 && cutoff >= 1);
        let mut modes = Vec::new();
        let mut l1 = Vec::new();
        let mut current = vec![0i64; dim];
        for n in 1..=cutoff {
            collect_modes(&mut current, 0, n, &mut modes);
            let added = modes.len() / dim - l1.len();
            l1.extend(std::iter::repeat(n).take(added));
        }
        ModeList {
            dim,
            cutoff,
            modes,
            l1,
        }
    }

    pub fn len(&self) -> usize {
        self.l1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l1.is_empty()
    }

    pub fn mode(&self, i: usize) -> &[i64] {
        &self.modes[i * self.dim..(i + 1) * self.dim]
    }
}

/// Append all canonical modes with `|k|_1 == budget` to `out`, filling
/// `current[pos..]`. Canonical: the first nonzero entry is positive.
fn collect_modes(current: &mut Vec<i64>, pos: usize, budget: i64, out: &mut Vec<i64>) {
    let dim = current.len();
    if pos == dim {
        if budget == 0 {
            // canonical check: first nonzero positive
            if current.iter().find(|&&v| v != 0).map(|&v| v > 0) == Some(true) {
                out.extend_from_slice(current);
            }
        }
        return;
    }
    for v in -budget..=budget {
        current[pos] = v;
        collect_modes(current, pos + 1, budget - v.abs(), out);
    }
    current[pos] = 0;
}

/// Outcome of a Diophantine scan for a single frequency vector.
#[derive(Clone, Debug, Serialize)]
pub struct ResonanceReport {
    pub omega: Vec<f64>,
    pub alpha: f64,
    pub tau: f64,
    pub cutoff: i64,
    /// `min_k |omega . k| |k|_1^tau` over the scanned modes: the largest
    /// `alpha` this frequency satisfies.
    pub margin: f64,
    /// Mode realising the margin.
    pub worst_mode: Vec<i64>,
    /// Raw `|omega . k|` at the worst mode.
    pub worst_divisor: f64,
    pub passes: bool,
}

/// Weight table `|k|_1^tau` for `|k|_1 = 1..=cutoff`.
fn l1_weights(cutoff: i64, tau: f64) -> Vec<f64> {
    (1..=cutoff).map(|n| (n as f64).powf(tau)).collect()
}

/// Margin `min_k |omega . k| |k|_1^tau` over a prepared mode list. Scanning
/// stops early once the margin falls below `floor` (pass `0.0` for an exact
/// scan).
pub fn margin_over(modes: &ModeList, omega: &[f64], tau: f64, floor: f64) -> (f64, usize) {
    assert_eq!(omega.len(), modes.dim);
    let weights = l1_weights(modes.cutoff, tau);
    let d = modes.dim;
    let mut best = f64::INFINITY;
    let mut best_i = 0usize;
    for i in 0..modes.len() {
        let k = &modes.modes[i * d..(i + 1) * d];
        let mut dot = 0.0f64;
        for (kj, oj) in k.iter().zip(omega) {
            dot += *kj as f64 * oj;
        }
        let m = dot.abs() * weights[(modes.l1[i] - 1) as usize];
        if m < best {
            best = m;
            best_i = i;
            if best < floor {
                break;
            }
        }
    }
    (best, best_i)
}

/// Check the Diophantine condition for one frequency, reporting the worst
/// divisor found.
pub fn check_diophantine(
    omega: &[f64],
    alpha: f64,
    tau: f64,
    cutoff: i64,
) -> ResonanceReport {
    let modes = ModeList::new(omega.len(), cutoff);
    let (margin, i) = margin_over(&modes, omega, tau, 0.0);
    let worst = modes.mode(i).to_vec();
    let mut dot = 0.0f64;
    for (kj, oj) in worst.iter().zip(omega) {
        dot += *kj as f64 * oj;
    }
    ResonanceReport {
        omega: omega.to_vec(),
        alpha,
        tau,
        cutoff,
        margin,
        worst_mode: worst,
        worst_divisor: dot.abs(),
        passes: margin >= alpha,
    }
}

/// Description of a non-resonant subset of an action/frequency box: points
/// at distance `>= margin_shrink` from the box boundary whose Diophantine
/// margin is at least `alpha`.
#[derive(Clone, Debug, Serialize)]
pub struct NonresonantSet {
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    pub alpha: f64,
    pub tau: f64,
    pub cutoff: i64,
    /// Boundary shrink of the reference box (the interior margin).
    pub margin_shrink: f64,
}

impl NonresonantSet {
    /// Shrunk reference box lower corners.
    pub fn inner_lo(&self) -> Vec<f64> {
        self.box_lo.iter().map(|v| v + self.margin_shrink).collect()
    }

    /// Shrunk reference box upper corners.
    pub fn inner_hi(&self) -> Vec<f64> {
        self.box_hi.iter().map(|v| v - self.margin_shrink).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .inner_lo()
            .iter()
            .zip(&self.inner_hi())
            .any(|(a, b)| a >= b)
        {
            return Err(Error::InvalidInput(
                "margin shrink swallows the whole box".to_string(),
            ));
        }
        Ok(())
    }

    /// Membership test (exact scan up to the cutoff).
    pub fn contains(&self, y: &[f64], modes: &ModeList) -> bool {
        let inside = y
            .iter()
            .zip(self.inner_lo().iter().zip(self.inner_hi()))
            .all(|(v, (lo, hi))| *v >= *lo && *v <= hi);
        if !inside {
            return false;
        }
        let (m, _) = margin_over(modes, y, self.tau, self.alpha);
        m >= self.alpha
    }
}

/// One row of a complement-measure table.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureRow {
    pub alpha: f64,
    /// Fraction of sampled points that violate the margin.
    pub complement_fraction: f64,
    /// Absolute measure: fraction times the volume of the shrunk box.
    pub complement_measure: f64,
    /// Binomial standard error of the absolute measure.
    pub stderr: f64,
    pub samples: u64,
    pub cutoff: i64,
    pub seed: u64,
}

/// Monte-Carlo estimate of the measure of the resonant complement inside the
/// shrunk box, for every `alpha` in one pass (margins are computed once per
/// sample).
pub fn complement_measure(
    set_box_lo: &[f64],
    set_box_hi: &[f64],
    tau: f64,
    cutoff: i64,
    margin_shrink: f64,
    alphas: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<MeasureRow>> {
    let d = set_box_lo.len();
    if d != set_box_hi.len() || d == 0 {
        return Err(Error::InvalidInput("bad box dimensions".to_string()));
    }
    if alphas.is_empty() {
        return Err(Error::InvalidInput("need at least one alpha".to_string()));
    }
    let lo: Vec<f64> = set_box_lo.iter().map(|v| v + margin_shrink).collect();
    let hi: Vec<f64> = set_box_hi.iter().map(|v| v - margin_shrink).collect();
    if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
        return Err(Error::InvalidInput(
            "margin shrink swallows the whole box".to_string(),
        ));
    }
    let volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let modes = ModeList::new(d, cutoff);
    let alpha_min = alphas.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut counts = vec![0u64; alphas.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = vec![0.0f64; d];
    for _ in 0..samples {
        for i in 0..d {
            let u: f64 = rng.gen();
            y[i] = lo[i] + u * (hi[i] - lo[i]);
        }
        let (margin, _) = margin_over(&modes, &y, tau, alpha_min);
        for (j, &a) in alphas.iter().enumerate() {
            if margin < a {
                counts[j] += 1;
            }
        }
    }
    Ok(alphas
        .iter()
        .zip(&counts)
        .map(|(&alpha, &cnt)| {
            let p = cnt as f64 / samples as f64;
            let se = (p * (1.0 - p) / samples as f64).sqrt();
            MeasureRow {
                alpha,
                complement_fraction: p,
                complement_measure: p * volume,
                stderr: se * volume,
                samples,
                cutoff,
                seed,
            }
        })
        .collect())
}

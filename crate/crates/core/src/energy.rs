//! Weighted Dirichlet energy `I(u) = ∫ u_x² e^{2rx} dx` and its decay along
//! solver trajectories.
//!
//! The smoothing equation is the steepest descent of `I` in `L²(e^{2rx}dx)`,
//! so `I` must not increase along the flow. Only the monotone decay is
//! checked here; it does not depend on how the gradient is normalised.

use alloc::vec::Vec;

use crate::pde::FieldOnGrid;
use crate::{Error, Result};

/// Relative slack allowed per recorded step: `I_{k+1} ≤ I_k + slack (1 + I_k)`.
pub const DECAY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub value: f64,
    /// Set for `r ≤ 0`, where `e^{2rx}` is not integrable on the half-line and
    /// the value depends on the truncation.
    pub truncated: bool,
}

/// Derivative on the grid: central inside, one-sided second order at the ends.
fn derivative(u: &FieldOnGrid) -> Vec<f64> {
    let v = &u.values;
    let n = v.len();
    let h = u.grid.spacing();
    let mut d = Vec::with_capacity(n);
    d.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h));
    for i in 1..n - 1 {
        d.push((v[i + 1] - v[i - 1]) / (2.0 * h));
    }
    d.push((3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h));
    d
}

pub fn energy(u: &FieldOnGrid, r: f64) -> Result<Energy> {
    let n = u.values.len();
    if n < 3 {
        return Err(Error::TooFewNodes(n));
    }
    if !r.is_finite() {
        return Err(Error::NonFiniteDrift(r));
    }
    let h = u.grid.spacing();
    let d = derivative(u);
    let mut value = 0.0;
    for (i, di) in d.iter().enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        value += w * di * di * libm::exp(2.0 * r * u.grid.node(i));
    }
    Ok(Energy { value: value * h, truncated: r <= 0.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub samples: Vec<(f64, f64)>,
    pub monotone_nonincreasing: bool,
    /// Largest `I_{k+1} - I_k` seen (0 when the sequence never rises).
    pub max_uptick: f64,
    pub truncated: bool,
}

/// Energies along a trajectory from [`crate::pde::solve`] and the verdict on
/// monotone decay.
pub fn decay_report(trajectory: &[(f64, FieldOnGrid)], r: f64) -> Result<EnergyReport> {
    let Some((_, first)) = trajectory.first() else {
        return Err(Error::Empty("trajectory has no states"));
    };
    if trajectory.iter().any(|(_, u)| u.grid != first.grid) {
        return Err(Error::GridMismatch);
    }
    if trajectory.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return Err(Error::InvalidConfig("trajectory times must increase"));
    }
    let mut samples = Vec::with_capacity(trajectory.len());
    let mut truncated = false;
    for (time, u) in trajectory {
        let e = energy(u, r)?;
        truncated = e.truncated;
        samples.push((*time, e.value));
    }
    let mut monotone = true;
    let mut max_uptick: f64 = 0.0;
    for w in samples.windows(2) {
        let (prev, next) = (w[0].1, w[1].1);
        max_uptick = max_uptick.max(next - prev);
        if next > prev + DECAY_SLACK * (1.0 + prev) {
            monotone = false;
        }
    }
    Ok(EnergyReport { samples, monotone_nonincreasing: monotone, max_uptick, truncated })
}

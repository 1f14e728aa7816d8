//! Monte Carlo simulation of the Skorokhod reflection problem.
//!
//! `X_t = x + rt + B_t`, `L_t = sup_{s ≤ t} X_s⁺`, `Z_t = X_t - L_t ≤ 0`.
//! Paths are Euler-sampled on a uniform time grid and the running maximum is
//! taken over the grid points, which underestimates the continuous maximum
//! by about `0.5826 √dt`. [`PathConfig::boundary_correction`] shifts the
//! discrete maximum up by that amount. That fixes the bulk of the law, but
//! no corrected endpoint lands in `(-0.5826 √dt, 0]`, while the plain walk
//! puts an atom of about the same mass at 0.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::kernel::{effective_support, kernel_mass, KernelParams};
use crate::{Error, Result};

/// `-ζ(1/2)/√(2π)`, the expected overshoot of a Gaussian random walk over a
/// level, in units of the step standard deviation.
pub const DISCRETE_MAX_SHIFT: f64 = 0.582_597_157_939_010_6;

/// Number of points in the `y` grid used by [`ks_statistic`].
pub const KS_GRID_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    pub x0: f64,
    pub r: f64,
    pub horizon: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub boundary_correction: bool,
}

impl PathConfig {
    pub fn new(x0: f64, r: f64, horizon: f64, dt: f64, n_paths: usize, seed: u64) -> Result<Self> {
        let cfg = PathConfig { x0, r, horizon, dt, n_paths, seed, boundary_correction: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x0 <= 0.0) {
            return Err(Error::OutsideHalfLine(self.x0));
        }
        if !self.r.is_finite() {
            return Err(Error::NonFiniteDrift(self.r));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(Error::NegativeScale(self.horizon));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidConfig("time step must be positive"));
        }
        if self.n_paths == 0 {
            return Err(Error::InvalidConfig("need at least one path"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        if self.horizon == 0.0 {
            0
        } else {
            libm::ceil(self.horizon / self.dt - 1e-9).max(1.0) as usize
        }
    }
}

/// Discrete Skorokhod map: feed free-path positions, get reflected ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkorokhodMap {
    free: f64,
    regulator: f64,
    shift: f64,
}

impl SkorokhodMap {
    /// `shift` is added to each free position before it enters the running
    /// maximum (0 for the plain construction).
    pub fn new(x0: f64, shift: f64) -> Self {
        SkorokhodMap { free: x0, regulator: (x0 + shift).max(0.0), shift }
    }

    /// Advances the free path by `dx` and returns the reflected position.
    pub fn step(&mut self, dx: f64) -> f64 {
        self.free += dx;
        self.regulator = self.regulator.max(self.free + self.shift);
        self.reflected()
    }

    pub fn free(&self) -> f64 {
        self.free
    }

    /// `L`, nondecreasing.
    pub fn regulator(&self) -> f64 {
        self.regulator
    }

    pub fn reflected(&self) -> f64 {
        (self.free - self.regulator).min(0.0)
    }
}

/// Independent stream for path `index`: same seed and index, same draws,
/// whatever order paths are run in.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Endpoint `Z_T` of path `index`.
pub fn simulate_path(cfg: &PathConfig, index: u64) -> f64 {
    let steps = cfg.steps();
    if steps == 0 {
        return cfg.x0;
    }
    let dt = cfg.horizon / steps as f64;
    let sd = libm::sqrt(dt);
    let shift = if cfg.boundary_correction { DISCRETE_MAX_SHIFT * sd } else { 0.0 };
    let mut rng = path_rng(cfg.seed, index);
    let mut map = SkorokhodMap::new(cfg.x0, 0.0);
    map.shift = shift;
    for _ in 0..steps {
        let xi: f64 = StandardNormal.sample(&mut rng);
        map.step(cfg.r * dt + sd * xi);
    }
    map.reflected()
}

/// Sorted sample of endpoints, all `≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("no samples"));
        }
        if let Some(&bad) = samples.iter().find(|v| !(**v <= 0.0)) {
            return Err(Error::OutsideHalfLine(bad));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.samples.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (self.len() as f64 - 1.0).max(1.0)
    }
}

pub fn simulate_endpoints(cfg: &PathConfig) -> Result<EmpiricalDistribution> {
    cfg.validate()?;
    let samples = (0..cfg.n_paths as u64).map(|i| simulate_path(cfg, i)).collect();
    EmpiricalDistribution::new(samples)
}

/// Fraction of samples `≤ y`.
pub fn empirical_cdf(dist: &EmpiricalDistribution, y: f64) -> f64 {
    dist.samples.partition_point(|&s| s <= y) as f64 / dist.len() as f64
}

/// `sup |F_n(y) - F(y)|` over [`KS_GRID_POINTS`] equally spaced `y` from the
/// kernel's effective support to 0, with `F` the kernel mass below `y`.
pub fn ks_statistic(dist: &EmpiricalDistribution, params: KernelParams, x0: f64) -> Result<f64> {
    let lo = effective_support(params, x0)?.min(dist.samples[0]);
    let step = -lo / (KS_GRID_POINTS - 1) as f64;
    let mut cdf = 0.0;
    let mut prev = lo;
    let mut worst: f64 = 0.0;
    for k in 0..KS_GRID_POINTS {
        let y = if k + 1 == KS_GRID_POINTS { 0.0 } else { lo + k as f64 * step };
        cdf += kernel_mass(params, x0, prev, y)?;
        prev = y;
        worst = worst.max((empirical_cdf(dist, y) - cdf).abs());
    }
    Ok(worst)
}

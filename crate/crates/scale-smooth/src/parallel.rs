//! Rayon-backed variants of the core routines. Results are identical to the
//! sequential versions because every path owns its RNG stream.

use rayon::prelude::*;

use scale_smooth_core::kernel::KernelParams;
use scale_smooth_core::mc::{simulate_path, EmpiricalDistribution, PathConfig};
use scale_smooth_core::smoother::{smooth_at, SmoothedProfile, StepFunction};
use scale_smooth_core::Result;

pub fn simulate_endpoints_par(cfg: &PathConfig) -> Result<EmpiricalDistribution> {
    cfg.validate()?;
    let samples = (0..cfg.n_paths as u64).into_par_iter().map(|i| simulate_path(cfg, i)).collect();
    EmpiricalDistribution::new(samples)
}

pub fn smooth_profile_par(f: &StepFunction, params: KernelParams, xs: &[f64]) -> Result<SmoothedProfile> {
    if xs.is_empty() {
        return Err(scale_smooth_core::Error::Empty("no evaluation points"));
    }
    let values = xs.par_iter().map(|&x| smooth_at(f, params, x)).collect::<Result<Vec<_>>>()?;
    Ok(SmoothedProfile { scale: params.t, xs: xs.to_vec(), values })
}

//! Past income as a step function and its smoothing by the kernel.

use alloc::vec::Vec;

use crate::kernel::{self, density_unchecked, effective_support, KernelParams};
use crate::quad::{integrate, QuadSettings};
use crate::{Error, Result};

// Per-segment quadrature tolerance used when smoothing; keeps the summed
// error over many segments well below 1e-8 relative to max |f|.
const SEGMENT_TOL: f64 = 1e-13;

/// Sampled past income: `(time, income)` pairs with strictly increasing
/// times, all `≤ 0`, the last one exactly `0` (the present).
#[derive(Debug, Clone, PartialEq)]
pub struct IncomeSeries {
    samples: Vec<(f64, f64)>,
}

impl IncomeSeries {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        let Some(&(last, _)) = samples.last() else {
            return Err(Error::Empty("income series has no samples"));
        };
        if samples.iter().any(|&(time, income)| !time.is_finite() || !income.is_finite()) {
            return Err(Error::InvalidSeries("non-finite time or income"));
        }
        if samples.iter().any(|&(time, _)| time > 0.0) {
            return Err(Error::InvalidSeries("times must not be in the future"));
        }
        for w in samples.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidSeries("duplicate time"));
            }
            if w[0].0 > w[1].0 {
                return Err(Error::InvalidSeries("times must be strictly increasing"));
            }
        }
        if last != 0.0 {
            return Err(Error::InvalidSeries("latest sample must be at time 0"));
        }
        Ok(IncomeSeries { samples })
    }

    /// Shifts all times so that the latest sits at 0, then validates.
    pub fn from_unnormalized(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(&(latest, _)) = samples.last() {
            for s in &mut samples {
                s.0 -= latest;
            }
        }
        IncomeSeries::new(samples)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }
}

/// How income before the first sample is filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extension {
    /// Repeat the earliest sampled value.
    #[default]
    Constant,
    /// Treat the unobserved past as zero income.
    Zero,
}

/// Right-open piecewise-constant income: `values[i]` on
/// `[breakpoints[i], breakpoints[i + 1])`, last breakpoint `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    present: f64,
    extension: Extension,
}

impl StepFunction {
    /// Builds a step function directly. `breakpoints` must be strictly
    /// increasing, end at 0 and be one longer than `values`.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, extension: Extension) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("step function needs at least one segment"));
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidSeries("breakpoints must number values + 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSeries("breakpoints must be strictly increasing"));
        }
        if *breakpoints.last().unwrap() != 0.0 {
            return Err(Error::InvalidSeries("last breakpoint must be 0"));
        }
        if values.iter().chain(breakpoints.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries("non-finite breakpoint or value"));
        }
        let present = *values.last().unwrap();
        Ok(StepFunction { breakpoints, values, present, extension })
    }

    pub fn constant(value: f64) -> Self {
        StepFunction {
            breakpoints: alloc::vec![-1.0, 0.0],
            values: alloc::vec![value],
            present: value,
            extension: Extension::Constant,
        }
    }

    pub fn with_extension(mut self, extension: Extension) -> Self {
        self.extension = extension;
        self
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    /// Income before the first breakpoint.
    pub fn tail_value(&self) -> f64 {
        match self.extension {
            Extension::Constant => self.values[0],
            Extension::Zero => 0.0,
        }
    }

    pub fn value_at(&self, x: f64) -> f64 {
        if x >= 0.0 {
            return self.present;
        }
        if x < self.breakpoints[0] {
            return self.tail_value();
        }
        // index of the last breakpoint ≤ x
        let i = self.breakpoints.partition_point(|&b| b <= x) - 1;
        self.values[i.min(self.values.len() - 1)]
    }

    /// Smallest and largest income the function takes, tail included.
    pub fn range(&self) -> (f64, f64) {
        let tail = self.tail_value();
        self.values
            .iter()
            .chain([self.present, tail].iter())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn max_abs(&self) -> f64 {
        let (lo, hi) = self.range();
        lo.abs().max(hi.abs())
    }

    /// Mean of the function over `[a, b]` (`a < b ≤ 0`).
    pub fn average_over(&self, a: f64, b: f64) -> f64 {
        debug_assert!(a < b);
        let mut total = 0.0;
        let first = self.breakpoints[0];
        if a < first {
            total += self.tail_value() * (b.min(first) - a);
        }
        for (w, &v) in self.breakpoints.windows(2).zip(self.values.iter()) {
            let lo = w[0].max(a);
            let hi = w[1].min(b);
            if hi > lo {
                total += v * (hi - lo);
            }
        }
        total / (b - a)
    }

    /// `αf + βg` on the union of both breakpoint sets. Extensions must agree.
    pub fn linear_combination(alpha: f64, f: &StepFunction, beta: f64, g: &StepFunction) -> Result<Self> {
        if f.extension != g.extension {
            return Err(Error::InvalidSeries("extensions differ"));
        }
        let mut cuts: Vec<f64> = f.breakpoints.iter().chain(g.breakpoints.iter()).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let values = cuts
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                alpha * f.value_at(mid) + beta * g.value_at(mid)
            })
            .collect();
        let mut out = StepFunction::new(cuts, values, f.extension)?;
        out.present = alpha * f.present + beta * g.present;
        Ok(out)
    }
}

/// Value on `[t_i, t_{i+1})` is `income_i`; the final sample defines the
/// value at the present. A lone sample at 0 gives a constant function.
pub fn step_from_samples(series: &IncomeSeries) -> StepFunction {
    step_from_samples_with(series, Extension::Constant)
}

pub fn step_from_samples_with(series: &IncomeSeries, extension: Extension) -> StepFunction {
    let samples = series.samples();
    let present = samples[samples.len() - 1].1;
    if samples.len() == 1 {
        return StepFunction::constant(present).with_extension(extension);
    }
    let breakpoints = samples.iter().map(|s| s.0).collect();
    let values = samples[..samples.len() - 1].iter().map(|s| s.1).collect();
    StepFunction { breakpoints, values, present, extension }
}

/// `u(t, x) = ∫ f(y) p_t(x, y) dy`. At `t = 0` returns `f(x)`.
pub fn smooth_at(f: &StepFunction, params: KernelParams, x: f64) -> Result<f64> {
    KernelParams::new(params.r, params.t)?;
    kernel::check_point(x)?;
    if params.t == 0.0 {
        return Ok(f.value_at(x));
    }
    let lo = effective_support(params, x)?;
    let settings = QuadSettings::with_abs_tol(SEGMENT_TOL);
    let mass = |a: f64, b: f64| kernel::kernel_mass_with(params, x, a, b, settings);

    let mut total = 0.0;
    let first = f.breakpoints[0];
    let tail = f.tail_value();
    if tail != 0.0 && first > lo {
        total += tail * mass(lo, first)?;
    }
    for (w, &v) in f.breakpoints.windows(2).zip(f.values.iter()) {
        if v == 0.0 || w[1] <= lo {
            continue;
        }
        total += v * mass(w[0].max(lo), w[1])?;
    }
    Ok(total)
}

/// Smoothed values of `f` at scale `params.t` on the grid `xs`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedProfile {
    pub scale: f64,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl SmoothedProfile {
    pub fn present_value(&self) -> Option<f64> {
        self.xs.last().filter(|&&x| x == 0.0).and(self.values.last().copied())
    }
}

pub fn smooth_profile(f: &StepFunction, params: KernelParams, xs: &[f64]) -> Result<SmoothedProfile> {
    if xs.is_empty() {
        return Err(Error::Empty("no evaluation points"));
    }
    if xs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidSeries("evaluation points must be sorted"));
    }
    let values = xs.iter().map(|&x| smooth_at(f, params, x)).collect::<Result<Vec<_>>>()?;
    Ok(SmoothedProfile { scale: params.t, xs: xs.to_vec(), values })
}

/// Smooths an arbitrary integrable function by direct quadrature of
/// `f(y) p_t(x, y)`; `breaks` marks kinks of `f`.
pub fn smooth_function_at<F>(f: F, params: KernelParams, x: f64, breaks: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    kernel::check_point(x)?;
    let lo = effective_support(params, x)?;
    let KernelParams { r, t } = params;
    let sqrt_t = libm::sqrt(t);
    let mut pts: Vec<f64> = breaks.to_vec();
    for c in [x, x + r * t, -(x + r * t)] {
        pts.extend([c, c - 3.0 * sqrt_t, c + 3.0 * sqrt_t]);
    }
    let integral =
        integrate(|y| f(y) * density_unchecked(r, t, x, y), lo, 0.0, &pts, QuadSettings::with_abs_tol(1e-13));
    Ok(integral.value)
}

/// `∫_{-∞}^0 p_s(x, z) p_t(z, y) dz`, the left side of the Chapman–Kolmogorov
/// identity. Equals `p_{s+t}(x, y)` for the true kernel.
pub fn chapman_lhs(first: KernelParams, second: KernelParams, x: f64, y: f64) -> Result<f64> {
    chapman_lhs_with(first, second, x, y, density_unchecked)
}

/// [`chapman_lhs`] for an arbitrary candidate density `kernel(r, t, x, y)`.
pub fn chapman_lhs_with<K>(first: KernelParams, second: KernelParams, x: f64, y: f64, kernel: K) -> Result<f64>
where
    K: Fn(f64, f64, f64, f64) -> f64,
{
    if first.r != second.r {
        return Err(Error::DriftMismatch(first.r, second.r));
    }
    kernel::kernel_density(first, x, x)?;
    kernel::kernel_density(second, y, y)?;
    let r = first.r;
    let (s, t) = (first.t, second.t);

    // p_t(·, y) as a function of its first argument peaks at y - rt and -y - rt
    let lo_second = y - 2.0 * r.abs() * t - 10.0 * libm::sqrt(t) - 1.0;
    let lo = effective_support(first, x)?.min(lo_second);

    let (ss, st) = (libm::sqrt(s), libm::sqrt(t));
    let mut pts = alloc::vec![x, y];
    for (c, w) in [(x + r * s, ss), (-(x + r * s), ss), (y - r * t, st), (-y - r * t, st)] {
        pts.extend([c, c - 3.0 * w, c + 3.0 * w, c - 8.0 * w, c + 8.0 * w]);
    }
    let integral =
        integrate(|z| kernel(r, s, x, z) * kernel(r, t, z, y), lo, 0.0, &pts, QuadSettings::with_abs_tol(1e-11));
    Ok(integral.value)
}

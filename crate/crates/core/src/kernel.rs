//! Transition density of reflected Brownian motion with drift on `(-inf, 0]`.
//!
//! For drift `r` and scale `t > 0`
//!
//! ```text
//! p_t(x, y) = 2r e^{2ry} Φ(a) + φ(b)/√t + e^{2ry} φ(a)/√t
//! a = (rt + x + y)/√t,   b = (y - x - rt)/√t
//! ```
//!
//! `x` is the position the average is taken at and `y` the past time being
//! weighted. The density satisfies `∂_x p = 0` at `x = 0`, integrates to one
//! in `y` and has the antiderivative
//! `F(y) = Φ(b) + e^{2ry} Φ(a)` (see [`kernel_cdf`]).

use alloc::vec::Vec;

use crate::normal::{gaussian_cdf, gaussian_pdf, log_gaussian_cdf, FRAC_1_SQRT_2PI};
use crate::quad::{integrate, QuadSettings};
use crate::{Error, Result};

/// Density value treated as zero when locating the lower end of the support.
pub const SUPPORT_DENSITY_FLOOR: f64 = 1e-16;

/// Drift `r` (1/time) and scale `t` (time) of the weighting kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub r: f64,
    pub t: f64,
}

impl KernelParams {
    /// Validates `r` finite and `t ≥ 0`. `t = 0` is the delta limit and is
    /// only accepted by operations that short-circuit it.
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::NonFiniteDrift(r));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::NegativeScale(t));
        }
        Ok(KernelParams { r, t })
    }

    pub fn with_scale(self, t: f64) -> Result<Self> {
        KernelParams::new(self.r, t)
    }

    fn require_positive_scale(&self) -> Result<()> {
        if !self.r.is_finite() {
            return Err(Error::NonFiniteDrift(self.r));
        }
        if self.t > 0.0 && self.t.is_finite() {
            Ok(())
        } else {
            Err(Error::NonPositiveScale(self.t))
        }
    }
}

pub(crate) fn check_point(x: f64) -> Result<()> {
    if x <= 0.0 {
        Ok(())
    } else {
        Err(Error::OutsideHalfLine(x))
    }
}

fn check_args(params: &KernelParams, x: f64, y: f64) -> Result<()> {
    params.require_positive_scale()?;
    check_point(x)?;
    check_point(y)
}

/// Unchecked closed form; callers validate.
pub(crate) fn density_unchecked(r: f64, t: f64, x: f64, y: f64) -> f64 {
    let sqrt_t = libm::sqrt(t);
    let a = (r * t + x + y) / sqrt_t;
    let b = (y - x - r * t) / sqrt_t;

    let direct = gaussian_pdf(b) / sqrt_t;
    // e^{2ry} φ(a), with the exponents combined before exponentiating
    let image = FRAC_1_SQRT_2PI * libm::exp(2.0 * r * y - 0.5 * a * a) / sqrt_t;
    // sign(r) exp(ln|2r| + 2ry + ln Φ(a)); e^{2ry} alone overflows for r < 0
    let drift = if r == 0.0 {
        0.0
    } else {
        r.signum() * libm::exp(libm::log(2.0 * r.abs()) + 2.0 * r * y + log_gaussian_cdf(a))
    };
    (drift + direct + image).max(0.0)
}

/// `p_t(x, y)`. Errors when `t ≤ 0` or either point is positive.
pub fn kernel_density(params: KernelParams, x: f64, y: f64) -> Result<f64> {
    check_args(&params, x, y)?;
    Ok(density_unchecked(params.r, params.t, x, y))
}

/// Small-scale asymptote `φ((y - x - rt)/√t)/√t`: the drifted Gaussian that
/// ignores the boundary.
pub fn kernel_small_t(params: KernelParams, x: f64, y: f64) -> Result<f64> {
    check_args(&params, x, y)?;
    let sqrt_t = libm::sqrt(params.t);
    Ok(gaussian_pdf((y - x - params.r * params.t) / sqrt_t) / sqrt_t)
}

/// Large-scale limit `2r e^{2ry}`, the exponential-smoothing weight. Only
/// exists for `r > 0`.
pub fn stationary_density(r: f64, y: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::NonPositiveDrift(r));
    }
    check_point(y)?;
    Ok(2.0 * r * libm::exp(2.0 * r * y))
}

/// Closed-form `∫_{-∞}^{y} p_t(x, z) dz = Φ(b) + e^{2ry} Φ(a)`.
pub fn kernel_cdf(params: KernelParams, x: f64, y: f64) -> Result<f64> {
    check_args(&params, x, y)?;
    let KernelParams { r, t } = params;
    let sqrt_t = libm::sqrt(t);
    let a = (r * t + x + y) / sqrt_t;
    let b = (y - x - r * t) / sqrt_t;
    let reflected = libm::exp(2.0 * r * y + log_gaussian_cdf(a));
    Ok((gaussian_cdf(b) + reflected).clamp(0.0, 1.0))
}

/// Lower end of the region where `p_t(x, ·)` carries mass: starts at
/// `x - |r|t - 8√t` (one more `|r|t` when the drift points away from the
/// present) and is pushed left until the density falls below
/// [`SUPPORT_DENSITY_FLOOR`].
pub fn effective_support(params: KernelParams, x: f64) -> Result<f64> {
    params.require_positive_scale()?;
    check_point(x)?;
    let KernelParams { r, t } = params;
    let sqrt_t = libm::sqrt(t);
    let mut lo = x - r.abs() * t - 8.0 * sqrt_t;
    if r < 0.0 {
        lo -= r.abs() * t;
    }
    let mut step = sqrt_t + if r > 0.0 { 0.5 / r } else { 0.0 };
    while density_unchecked(r, t, x, lo) >= SUPPORT_DENSITY_FLOOR {
        lo -= step;
        step *= 1.5;
    }
    Ok(lo)
}

/// Points where the integrand in `y` changes character: the direct and image
/// bump centres, a few widths either side, and the starting point.
fn density_breakpoints(r: f64, t: f64, x: f64) -> Vec<f64> {
    let sqrt_t = libm::sqrt(t);
    let mut pts = Vec::with_capacity(12);
    pts.push(x);
    for centre in [x + r * t, -(x + r * t)] {
        pts.push(centre);
        for k in [3.0, 8.0] {
            pts.push(centre - k * sqrt_t);
            pts.push(centre + k * sqrt_t);
        }
    }
    pts
}

/// `∫_{y_lo}^{y_hi} p_t(x, y) dy` by adaptive quadrature with the default
/// absolute tolerance of 1e-9. A `y_lo` below the effective support (including
/// `-inf`) is clamped to it.
pub fn kernel_mass(params: KernelParams, x: f64, y_lo: f64, y_hi: f64) -> Result<f64> {
    kernel_mass_with(params, x, y_lo, y_hi, QuadSettings::default())
}

pub fn kernel_mass_with(params: KernelParams, x: f64, y_lo: f64, y_hi: f64, settings: QuadSettings) -> Result<f64> {
    check_args(&params, x, y_hi)?;
    if y_lo.is_nan() || y_lo > y_hi {
        return Err(Error::InvertedInterval { lo: y_lo, hi: y_hi });
    }
    let support = effective_support(params, x)?;
    let lo = y_lo.max(support);
    if lo >= y_hi {
        return Ok(0.0);
    }
    let KernelParams { r, t } = params;
    let breaks = density_breakpoints(r, t, x);
    let integral = integrate(|y| density_unchecked(r, t, x, y), lo, y_hi, &breaks, settings);
    Ok(integral.value.max(0.0))
}

/// Local moment `∫_{|y-x| ≤ ε} (y - x)^k p_t(x, y) dy` (restricted to
/// `y ≤ 0`). For `x < 0` and small `t` the first moment is ≈ `rt` and the
/// second ≈ `t`.
pub fn local_moment(params: KernelParams, x: f64, eps: f64, order: i32) -> Result<f64> {
    check_args(&params, x, x)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidConfig("moment window must be positive"));
    }
    let KernelParams { r, t } = params;
    let lo = x - eps;
    let hi = (x + eps).min(0.0);
    let breaks = density_breakpoints(r, t, x);
    let f = |y: f64| libm::pow(y - x, order as f64) * density_unchecked(r, t, x, y);
    Ok(integrate(f, lo, hi, &breaks, QuadSettings::with_abs_tol(1e-14)).value)
}

/// Second-order one-sided estimate of `∂p/∂x` at `x = 0` from the stencil
/// `x = 0, -h, -2h`.
pub fn boundary_slope(params: KernelParams, y: f64, h: f64) -> Result<f64> {
    check_args(&params, 0.0, y)?;
    let KernelParams { r, t } = params;
    let p0 = density_unchecked(r, t, 0.0, y);
    let p1 = density_unchecked(r, t, -h, y);
    let p2 = density_unchecked(r, t, -2.0 * h, y);
    Ok((3.0 * p0 - 4.0 * p1 + p2) / (2.0 * h))
}

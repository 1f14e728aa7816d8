//! One-sided multi-scale smoothing of past-only time series.
//!
//! The weighting kernel is the transition density of Brownian motion with
//! constant drift `r`, reflected at the present `x = 0` and living on the
//! half-line `(-inf, 0]`. Smoothing a past income profile `f` at scale `t`
//! gives
//!
//! ```text
//! u(t, x) = ∫_{-∞}^0 f(y) p_t(x, y) dy
//! ```
//!
//! and `u(t, 0)` is the averaged present-time value. Besides the closed-form
//! kernel the crate carries three independent engines used to cross-check it:
//! adaptive quadrature ([`quad`]), a Crank–Nicolson solver for the
//! drift-diffusion equation with a reflecting boundary ([`pde`]), and a Monte
//! Carlo simulation of the Skorokhod reflection map ([`mc`]). The
//! [`energy`] module measures the weighted Dirichlet energy that the
//! smoothing flow dissipates.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
// `!(a < b)` is used on purpose so that NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;

pub mod energy;
pub mod kernel;
pub mod mc;
pub mod normal;
pub mod pde;
pub mod quad;
pub mod smoother;

pub use error::{Error, Result};
pub use kernel::KernelParams;

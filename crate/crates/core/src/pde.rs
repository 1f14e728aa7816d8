//! Crank–Nicolson solver for `u_t = ½ u_xx + r u_x` on `[-L, 0]` with
//! zero-flux ends.
//!
//! Both boundaries use a mirrored ghost node (`u_{-1} = u_1`). The first
//! steps are taken as pairs of backward-Euler half steps so that jumps in
//! the initial data do not excite the undamped high-frequency modes of
//! Crank–Nicolson.

use alloc::vec;
use alloc::vec::Vec;

use crate::kernel::KernelParams;
use crate::smoother::{smooth_profile, StepFunction};
use crate::{Error, Result};

/// Uniform mesh on `[-length, 0]` whose last node is exactly 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    length: f64,
    n: usize,
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewNodes(n));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidConfig("domain length must be positive"));
        }
        Ok(Grid { length, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn x_min(&self) -> f64 {
        -self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            0.0
        } else {
            -self.length + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldOnGrid {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl FieldOnGrid {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("field values must be finite"));
        }
        Ok(FieldOnGrid { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid, f: F) -> Self {
        FieldOnGrid { grid, values: grid.nodes().into_iter().map(f).collect() }
    }

    /// Node values are cell averages of `f` over `[x_i - h/2, x_i + h/2]`
    /// clipped to the domain; a jump on a node gets the mean of both sides.
    pub fn from_step(grid: Grid, f: &StepFunction) -> Self {
        let h = grid.spacing();
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.node(i);
                let a = (x - 0.5 * h).max(grid.x_min());
                let b = (x + 0.5 * h).min(0.0);
                f.average_over(a, b)
            })
            .collect();
        FieldOnGrid { grid, values }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Second-order one-sided derivative at `x = 0`. Tends to zero as
    /// `O(h²)` for solutions of the zero-flux problem.
    pub fn one_sided_slope_at_present(&self) -> f64 {
        let n = self.values.len();
        let v = &self.values;
        (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * self.grid.spacing())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeConfig {
    pub r: f64,
    pub t_end: f64,
    pub dt: f64,
    pub grid: Grid,
    /// Number of leading steps replaced by two backward-Euler half steps.
    pub startup_steps: usize,
    /// Store every `record_every`-th step (the final time is always stored).
    pub record_every: usize,
}

impl PdeConfig {
    pub fn new(r: f64, t_end: f64, dt: f64, grid: Grid) -> Result<Self> {
        let cfg = PdeConfig { r, t_end, dt, grid, startup_steps: 2, record_every: 1 };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !self.r.is_finite() {
            return Err(Error::NonFiniteDrift(self.r));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig("t_end must be non-negative"));
        }
        if !(self.dt > 0.0) || (self.t_end > 0.0 && self.dt > self.t_end) {
            return Err(Error::InvalidConfig("dt must lie in (0, t_end]"));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1"));
        }
        Ok(())
    }

    /// `|support of f| + |r| t + 8√t`: beyond this the solution is constant
    /// to working precision, so the artificial wall at `-L` does not matter.
    pub fn default_length(data_extent: f64, r: f64, t_end: f64) -> f64 {
        data_extent.abs() + r.abs() * t_end + 8.0 * libm::sqrt(t_end)
    }

    /// Cell Péclet number `h|r|`; above 1 the drift is upwinded.
    pub fn cell_peclet(&self) -> f64 {
        self.grid.spacing() * self.r.abs()
    }
}

/// Tridiagonal operator rows `(lower, diag, upper)` for `½ ∂² + r ∂`.
fn operator(grid: &Grid, r: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = grid.len();
    let h = grid.spacing();
    let diff = 0.5 / (h * h);
    let (lower, diag, upper) = if h * r.abs() <= 1.0 {
        let adv = r / (2.0 * h);
        (diff - adv, -2.0 * diff, diff + adv)
    } else if r > 0.0 {
        (diff, -2.0 * diff - r / h, diff + r / h)
    } else {
        (diff - r / h, -2.0 * diff + r / h, diff)
    };
    let mut lo = vec![lower; n];
    let mut di = vec![diag; n];
    let mut up = vec![upper; n];
    // mirror ghosts: ½(2u_1 - 2u_0)/h², drift term vanishes
    lo[0] = 0.0;
    di[0] = -2.0 * diff;
    up[0] = 2.0 * diff;
    lo[n - 1] = 2.0 * diff;
    di[n - 1] = -2.0 * diff;
    up[n - 1] = 0.0;
    (lo, di, up)
}

/// Thomas algorithm for `(lower, diag, upper) x = rhs`, overwriting `rhs`.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) -> Result<()> {
    let n = rhs.len();
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::SingularSystem(0));
    }
    rhs[0] /= pivot;
    for i in 1..n {
        scratch[i] = upper[i - 1] / pivot;
        pivot = diag[i] - lower[i] * scratch[i];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularSystem(i));
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}

struct Stepper {
    lo: Vec<f64>,
    di: Vec<f64>,
    up: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
    a_lo: Vec<f64>,
    a_di: Vec<f64>,
    a_up: Vec<f64>,
}

impl Stepper {
    fn new(grid: &Grid, r: f64) -> Self {
        let (lo, di, up) = operator(grid, r);
        let n = grid.len();
        Stepper {
            lo,
            di,
            up,
            rhs: vec![0.0; n],
            scratch: vec![0.0; n],
            a_lo: vec![0.0; n],
            a_di: vec![0.0; n],
            a_up: vec![0.0; n],
        }
    }

    /// One θ-step of size `dt` (θ = ½ Crank–Nicolson, θ = 1 backward Euler).
    fn step(&mut self, u: &mut [f64], dt: f64, theta: f64) -> Result<()> {
        let n = u.len();
        let explicit = (1.0 - theta) * dt;
        for i in 0..n {
            let mut v = u[i] + explicit * self.di[i] * u[i];
            if i > 0 {
                v += explicit * self.lo[i] * u[i - 1];
            }
            if i + 1 < n {
                v += explicit * self.up[i] * u[i + 1];
            }
            self.rhs[i] = v;
            self.a_lo[i] = -theta * dt * self.lo[i];
            self.a_di[i] = 1.0 - theta * dt * self.di[i];
            self.a_up[i] = -theta * dt * self.up[i];
        }
        solve_tridiagonal(&self.a_lo, &self.a_di, &self.a_up, &mut self.rhs, &mut self.scratch)?;
        u.copy_from_slice(&self.rhs);
        Ok(())
    }
}

/// Time-steps `f0` to `cfg.t_end`. The returned trajectory starts at `t = 0`
/// and ends at `t_end`; `dt` is shrunk slightly so that an integer number of
/// steps lands exactly on `t_end`.
pub fn solve(f0: &FieldOnGrid, cfg: &PdeConfig) -> Result<Vec<(f64, FieldOnGrid)>> {
    cfg.validate()?;
    if f0.grid != cfg.grid {
        return Err(Error::GridMismatch);
    }
    let mut trajectory = vec![(0.0, f0.clone())];
    if cfg.t_end == 0.0 {
        return Ok(trajectory);
    }
    let steps = libm::ceil(cfg.t_end / cfg.dt - 1e-9).max(1.0) as usize;
    let dt = cfg.t_end / steps as f64;

    let mut stepper = Stepper::new(&cfg.grid, cfg.r);
    let mut u = f0.values.clone();
    for k in 1..=steps {
        if k <= cfg.startup_steps {
            stepper.step(&mut u, 0.5 * dt, 1.0)?;
            stepper.step(&mut u, 0.5 * dt, 1.0)?;
        } else {
            stepper.step(&mut u, dt, 0.5)?;
        }
        if k % cfg.record_every == 0 || k == steps {
            let time = if k == steps { cfg.t_end } else { k as f64 * dt };
            trajectory.push((time, FieldOnGrid { grid: cfg.grid, values: u.clone() }));
        }
    }
    Ok(trajectory)
}

/// Outcome of a solver-versus-kernel comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub max_abs_error: f64,
    pub at_x: f64,
    pub nodes_compared: usize,
}

fn compare_on_window<F>(solution: &FieldOnGrid, reference: F) -> Result<ComparisonReport>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let grid = solution.grid;
    let cutoff = -0.5 * grid.length();
    let idx: Vec<usize> = (0..grid.len()).filter(|&i| grid.node(i) >= cutoff).collect();
    let xs: Vec<f64> = idx.iter().map(|&i| grid.node(i)).collect();
    let want = reference(&xs)?;
    let mut report = ComparisonReport { max_abs_error: 0.0, at_x: xs[0], nodes_compared: xs.len() };
    for ((&i, &x), &w) in idx.iter().zip(xs.iter()).zip(want.iter()) {
        let err = (solution.values[i] - w).abs();
        if err > report.max_abs_error {
            report.max_abs_error = err;
            report.at_x = x;
        }
    }
    Ok(report)
}

/// Solves with step data `f` (projected by cell averages) up to `params.t`
/// and compares against quadrature smoothing on nodes with `x ≥ -L/2`.
pub fn compare_with_kernel(f: &StepFunction, params: KernelParams, cfg: &PdeConfig) -> Result<ComparisonReport> {
    if params.r != cfg.r {
        return Err(Error::DriftMismatch(params.r, cfg.r));
    }
    let run = PdeConfig { t_end: params.t, record_every: usize::MAX, ..*cfg };
    let f0 = FieldOnGrid::from_step(cfg.grid, f);
    let end = solve(&f0, &run)?.pop().expect("trajectory is never empty").1;
    compare_on_window(&end, |xs| Ok(smooth_profile(f, params, xs)?.values))
}

/// Same comparison for smooth initial data `f`, referenced by direct
/// quadrature of `f(y) p_t(x, y)`.
pub fn compare_with_kernel_fn<F>(f: F, params: KernelParams, cfg: &PdeConfig) -> Result<ComparisonReport>
where
    F: Fn(f64) -> f64,
{
    if params.r != cfg.r {
        return Err(Error::DriftMismatch(params.r, cfg.r));
    }
    let run = PdeConfig { t_end: params.t, record_every: usize::MAX, ..*cfg };
    let f0 = FieldOnGrid::from_fn(cfg.grid, &f);
    let end = solve(&f0, &run)?.pop().expect("trajectory is never empty").1;
    compare_on_window(&end, |xs| {
        if params.t == 0.0 {
            return Ok(xs.iter().map(|&x| f(x)).collect());
        }
        xs.iter().map(|&x| crate::smoother::smooth_function_at(&f, params, x, &[])).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smoother::Extension;

    #[test]
    fn grid_layout() {
        let g = Grid::new(12.0, 2401).unwrap();
        assert_eq!(g.node(2400), 0.0);
        assert_eq!(g.node(0), -12.0);
        assert!((g.spacing() - 0.005).abs() < 1e-15);
        assert_eq!(Grid::new(1.0, 2), Err(Error::TooFewNodes(2)));
        assert!(Grid::new(0.0, 10).is_err());
    }

    #[test]
    fn tridiagonal_solves_known_system() {
        // [2 1 0; 1 2 1; 0 1 2] x = [4 8 8] → x = [1 2 3]
        let lo = [0.0, 1.0, 1.0];
        let di = [2.0, 2.0, 2.0];
        let up = [1.0, 1.0, 0.0];
        let mut rhs = [4.0, 8.0, 8.0];
        let mut scratch = [0.0; 3];
        solve_tridiagonal(&lo, &di, &up, &mut rhs, &mut scratch).unwrap();
        for (got, want) in rhs.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let mut rhs = [1.0, 1.0, 1.0];
        assert_eq!(
            solve_tridiagonal(&[0.0; 3], &[0.0, 1.0, 1.0], &[0.0; 3], &mut rhs, &mut scratch),
            Err(Error::SingularSystem(0))
        );
    }

    #[test]
    fn constants_are_exact() {
        let grid = Grid::new(5.0, 101).unwrap();
        let cfg = PdeConfig::new(0.7, 1.0, 0.05, grid).unwrap();
        let traj = solve(&FieldOnGrid::from_fn(grid, |_| 3.0), &cfg).unwrap();
        assert_eq!(traj.first().unwrap().0, 0.0);
        assert_eq!(traj.last().unwrap().0, 1.0);
        for (_, u) in &traj {
            assert!(u.values.iter().all(|v| (v - 3.0).abs() < 1e-12));
        }
    }

    #[test]
    fn cosine_mode_decays_at_spectral_rate() {
        // r = 0: cos(πx/L) satisfies both zero-flux ends and decays as e^{-½(π/L)² t}
        let length = 4.0;
        let grid = Grid::new(length, 801).unwrap();
        let k = core::f64::consts::PI / length;
        let cfg = PdeConfig::new(0.0, 1.0, 1e-3, grid).unwrap();
        let traj = solve(&FieldOnGrid::from_fn(grid, |x| libm::cos(k * x)), &cfg).unwrap();
        let norm = |u: &FieldOnGrid| libm::sqrt(u.values.iter().map(|v| v * v).sum::<f64>());
        let n0 = norm(&traj[0].1);
        let mut prev = n0;
        for (_, u) in &traj[1..] {
            let n = norm(u);
            assert!(n < prev);
            prev = n;
        }
        let want = libm::exp(-0.5 * k * k * 1.0);
        assert!((prev / n0 - want).abs() < 1e-5, "{} vs {want}", prev / n0);
    }

    #[test]
    fn config_validation() {
        let grid = Grid::new(5.0, 11).unwrap();
        assert!(PdeConfig::new(0.0, 1.0, 2.0, grid).is_err());
        assert!(PdeConfig::new(0.0, 1.0, 0.0, grid).is_err());
        assert!(PdeConfig::new(f64::NAN, 1.0, 0.1, grid).is_err());
        let cfg = PdeConfig::new(0.0, 1.0, 0.1, grid).unwrap();
        let other = FieldOnGrid::from_fn(Grid::new(5.0, 12).unwrap(), |_| 0.0);
        assert_eq!(solve(&other, &cfg), Err(Error::GridMismatch));
    }

    #[test]
    fn present_slope_shrinks_quadratically() {
        let f = StepFunction::new(alloc::vec![-2.0, -0.5, 0.0], alloc::vec![1.0, 4.0], Extension::Constant).unwrap();
        let slope = |n: usize| {
            let grid = Grid::new(6.0, n).unwrap();
            let cfg = PdeConfig::new(0.5, 0.5, 6.0 / (n - 1) as f64, grid).unwrap();
            let traj = solve(&FieldOnGrid::from_step(grid, &f), &cfg).unwrap();
            traj.last().unwrap().1.one_sided_slope_at_present().abs()
        };
        let (coarse, fine) = (slope(301), slope(601));
        assert!(coarse < 1e-3, "{coarse}");
        assert!(fine < 0.35 * coarse, "{coarse} -> {fine}");
    }

    #[test]
    fn upwind_fallback_keeps_bounds() {
        // h|r| = 2: centred drift would oscillate
        let grid = Grid::new(10.0, 51).unwrap();
        let cfg = PdeConfig::new(10.0, 1.0, 0.01, grid).unwrap();
        assert!(cfg.cell_peclet() > 1.0);
        let f = StepFunction::new(alloc::vec![-5.0, -2.0, 0.0], alloc::vec![0.0, 1.0], Extension::Constant).unwrap();
        for (_, u) in solve(&FieldOnGrid::from_step(grid, &f), &cfg).unwrap() {
            let (lo, hi) = u.min_max();
            assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
        }
    }
}

//! The `smooth`, `weights` and `compare-exponential` commands.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use scale_smooth_core::kernel::{effective_support, kernel_density, kernel_small_t, stationary_density, KernelParams};
use scale_smooth_core::smoother::{smooth_at, step_from_samples_with, IncomeSeries, StepFunction};

use crate::config::{Command, Format, RunConfig};
use crate::io::{companion_path, read_series_file, with_output, write_json, write_rows, LONG_HEADER};
use crate::parallel::smooth_profile_par;
use crate::verify;
use crate::{CliError, Result};

pub const COMPARE_HEADER: [&str; 5] = ["scale", "kernel", "exponential", "flat", "kernel_minus_exponential"];

#[derive(Debug, Clone, Serialize)]
pub struct ProfileResult {
    pub scale: f64,
    pub x: Vec<f64>,
    pub value: Vec<f64>,
    /// `g(0) = u(t, 0)`
    pub present: f64,
}

/// Smoothed income at every sample time, one profile per scale.
pub fn smooth(cfg: &RunConfig, series: &IncomeSeries) -> Result<Vec<ProfileResult>> {
    let f = step_from_samples_with(series, cfg.extension.into());
    let xs: Vec<f64> = series.samples().iter().map(|s| s.0).collect();
    cfg.scales
        .iter()
        .map(|&t| {
            let params = KernelParams::new(cfg.r, t)?;
            let profile = smooth_profile_par(&f, params, &xs)?;
            let present = profile.present_value().unwrap_or_else(|| f.value_at(0.0));
            Ok(ProfileResult { scale: t, x: profile.xs, value: profile.values, present })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Kernel,
    Gaussian,
    Stationary,
}

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub curve: CurveKind,
    /// `None` for the stationary (`t → ∞`) curve.
    pub scale: Option<f64>,
    pub x: Vec<f64>,
    pub value: Vec<f64>,
}

impl Curve {
    fn rows(&self) -> Vec<Vec<f64>> {
        let scale = self.scale.unwrap_or(f64::INFINITY);
        self.x.iter().zip(&self.value).map(|(&x, &v)| vec![scale, x, v]).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightsOutput {
    pub curves: Vec<Curve>,
    pub warnings: Vec<String>,
}

fn uniform(lo: f64, n: usize) -> Vec<f64> {
    let h = -lo / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { 0.0 } else { lo + i as f64 * h }).collect()
}

/// `p_t(0, y)` for each scale on `[support, 0]`, the small-scale Gaussian on
/// the same grid, and `2r e^{2ry}` when `r > 0`.
pub fn weights(cfg: &RunConfig) -> Result<WeightsOutput> {
    let mut curves = Vec::new();
    let mut lowest: f64 = 0.0;
    for &t in &cfg.scales {
        let params = KernelParams::new(cfg.r, t)?;
        let lo = effective_support(params, 0.0)?;
        lowest = lowest.min(lo);
        let ys = uniform(lo, cfg.points);
        let kernel = ys.iter().map(|&y| kernel_density(params, 0.0, y)).collect::<std::result::Result<_, _>>()?;
        let gauss = ys.iter().map(|&y| kernel_small_t(params, 0.0, y)).collect::<std::result::Result<_, _>>()?;
        curves.push(Curve { curve: CurveKind::Kernel, scale: Some(t), x: ys.clone(), value: kernel });
        curves.push(Curve { curve: CurveKind::Gaussian, scale: Some(t), x: ys, value: gauss });
    }
    let mut warnings = Vec::new();
    if cfg.r > 0.0 {
        let ys = uniform(lowest, cfg.points);
        let value = ys.iter().map(|&y| stationary_density(cfg.r, y)).collect::<std::result::Result<_, _>>()?;
        curves.push(Curve { curve: CurveKind::Stationary, scale: None, x: ys, value });
    } else {
        warnings.push(format!("r = {} ≤ 0: no stationary weighting, curve omitted", cfg.r));
    }
    Ok(WeightsOutput { curves, warnings })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub scale: f64,
    pub kernel: f64,
    pub exponential: f64,
    pub flat: f64,
    pub kernel_minus_exponential: f64,
}

/// `∫ f(y) 2r e^{2ry} dy`, exact for a step function.
pub fn exponential_average(f: &StepFunction, r: f64) -> f64 {
    let b = f.breakpoints();
    let mut total = f.tail_value() * (2.0 * r * b[0]).exp();
    for (w, &v) in b.windows(2).zip(f.values()) {
        total += v * ((2.0 * r * w[1]).exp() - (2.0 * r * w[0]).exp());
    }
    total
}

/// Present-time averages under the kernel at each scale, the exponential
/// weight `2r e^{2ry}` (the large-scale limit), and a flat window of width
/// `1/(2r)` (same mean look-back as the exponential).
pub fn compare_exponential(cfg: &RunConfig, series: &IncomeSeries) -> Result<Vec<ComparisonRow>> {
    if !(cfg.r > 0.0) {
        return Err(CliError::Usage(format!("compare-exponential needs r > 0, got {}", cfg.r)));
    }
    let f = step_from_samples_with(series, cfg.extension.into());
    let exponential = exponential_average(&f, cfg.r);
    let flat = f.average_over(-0.5 / cfg.r, 0.0);
    cfg.scales
        .par_iter()
        .map(|&t| {
            let kernel = smooth_at(&f, KernelParams::new(cfg.r, t)?, 0.0)?;
            Ok(ComparisonRow { scale: t, kernel, exponential, flat, kernel_minus_exponential: kernel - exponential })
        })
        .collect()
}

fn require_input(cfg: &RunConfig) -> Result<IncomeSeries> {
    let path = cfg.input.as_deref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    read_series_file(path)
}

/// Runs the configured command, writing to `--output` or stdout. Warnings
/// go to `diag`.
pub fn run(cfg: &RunConfig, diag: &mut dyn Write) -> Result<()> {
    let out = cfg.output.as_deref();
    match cfg.command {
        Command::Smooth => {
            let series = require_input(cfg)?;
            let results = smooth(cfg, &series)?;
            with_output(out, |w| match cfg.format {
                Format::Json => write_json(w, cfg, &results),
                Format::Csv => {
                    let rows: Vec<Vec<f64>> = results
                        .iter()
                        .flat_map(|p| p.x.iter().zip(&p.value).map(move |(&x, &v)| vec![p.scale, x, v]))
                        .collect();
                    write_rows(w, &LONG_HEADER, &rows)
                }
            })
        }
        Command::Weights => {
            let result = weights(cfg)?;
            for msg in &result.warnings {
                writeln!(diag, "warning: {msg}")?;
            }
            match cfg.format {
                Format::Json => with_output(out, |w| write_json(w, cfg, &result.curves)),
                Format::Csv => write_weight_curves(out, &result, diag),
            }
        }
        Command::CompareExponential => {
            let series = require_input(cfg)?;
            let rows = compare_exponential(cfg, &series)?;
            with_output(out, |w| match cfg.format {
                Format::Json => write_json(w, cfg, &rows),
                Format::Csv => {
                    let table: Vec<Vec<f64>> = rows
                        .iter()
                        .map(|c| vec![c.scale, c.kernel, c.exponential, c.flat, c.kernel_minus_exponential])
                        .collect();
                    write_rows(w, &COMPARE_HEADER, &table)
                }
            })
        }
        Command::Verify => {
            let report = verify::run_suite(cfg)?;
            with_output(out, |w| verify::write_report(w, cfg, &report))?;
            let failed = report.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(CliError::VerificationFailed { failed, total: report.len() });
            }
            Ok(())
        }
    }
}

/// Kernel curves go to the main output; the Gaussian and stationary curves to
/// `<stem>.gaussian.csv` and `<stem>.stationary.csv` beside it.
fn write_weight_curves(out: Option<&Path>, result: &WeightsOutput, diag: &mut dyn Write) -> Result<()> {
    let rows_of = |kind: CurveKind| -> Vec<Vec<f64>> {
        result.curves.iter().filter(|c| c.curve == kind).flat_map(Curve::rows).collect()
    };
    with_output(out, |w| write_rows(w, &LONG_HEADER, &rows_of(CurveKind::Kernel)))?;
    match out {
        Some(path) => {
            with_output(Some(&companion_path(path, "gaussian")), |w| {
                write_rows(w, &LONG_HEADER, &rows_of(CurveKind::Gaussian))
            })?;
            let stationary = rows_of(CurveKind::Stationary);
            if !stationary.is_empty() {
                with_output(Some(&companion_path(path, "stationary")), |w| write_rows(w, &LONG_HEADER, &stationary))?;
            }
        }
        None => writeln!(diag, "note: Gaussian and stationary curves are only written with --output or --format json")?,
    }
    Ok(())
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use scale_smooth_core::smoother::Extension;

use crate::{CliError, Result};

pub const SEED_ENV: &str = "SCALE_SMOOTH_SEED";

#[derive(Debug, Parser)]
#[command(name = "scale-smooth", version, about = "Multi-scale smoothing of past-only income series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Smoothed profiles and present-time averages of an income series
    Smooth,
    /// Weighting curves p_t(0, y) with their Gaussian and exponential limits
    Weights,
    /// Run the invariant and cross-engine checks
    Verify,
    /// Kernel average against exponential smoothing and a flat window
    CompareExponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionArg {
    Constant,
    Zero,
}

impl From<ExtensionArg> for Extension {
    fn from(e: ExtensionArg) -> Self {
        match e {
            ExtensionArg::Constant => Extension::Constant,
            ExtensionArg::Zero => Extension::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Flip the sign of the drift term of the kernel
    KernelSign,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Drift toward the present (1/time)
    #[arg(long = "r", global = true, default_value_t = 0.5, allow_negative_numbers = true)]
    pub r: f64,
    /// Comma-separated smoothing scales
    #[arg(long, global = true, value_delimiter = ',', default_values_t = vec![0.1, 1.0, 10.0])]
    pub scales: Vec<f64>,
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// How income before the first sample is filled in
    #[arg(long, global = true, value_enum, default_value_t = ExtensionArg::Constant)]
    pub extension: ExtensionArg,
    /// Overridden by the SCALE_SMOOTH_SEED environment variable
    #[arg(long, global = true, default_value_t = 20_190_101)]
    pub seed: u64,
    /// Reduced verification grid
    #[arg(long, global = true)]
    pub quick: bool,
    #[arg(long = "mc-paths", global = true, default_value_t = 100_000)]
    pub mc_paths: usize,
    #[arg(long = "mc-dt", global = true, default_value_t = 1e-3)]
    pub mc_dt: f64,
    /// Solver domain length (default: derived from data extent and scale)
    #[arg(long = "pde-L", global = true)]
    pub pde_length: Option<f64>,
    #[arg(long = "pde-n", global = true, default_value_t = 2401)]
    pub pde_n: usize,
    #[arg(long = "pde-dt", global = true, default_value_t = 1e-3)]
    pub pde_dt: f64,
    /// Label for the time axis, echoed in JSON output
    #[arg(long = "time-unit", global = true, default_value = "year")]
    pub time_unit: String,
    /// Samples per weighting curve
    #[arg(long, global = true, default_value_t = 4001)]
    pub points: usize,
    #[arg(long = "inject-fault", global = true, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

/// Validated settings for one invocation; echoed in JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub r: f64,
    pub scales: Vec<f64>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub extension: ExtensionArg,
    pub seed: u64,
    pub quick: bool,
    pub mc_paths: usize,
    pub mc_dt: f64,
    pub pde_length: Option<f64>,
    pub pde_n: usize,
    pub pde_dt: f64,
    pub time_unit: String,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inject_fault: Option<Fault>,
}

impl RunConfig {
    /// `env_seed` is the raw value of [`SEED_ENV`], if set.
    pub fn from_cli(cli: Cli, env_seed: Option<String>) -> Result<Self> {
        let o = cli.opts;
        let seed = match env_seed {
            Some(raw) => raw
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{SEED_ENV}={raw:?} is not an unsigned integer")))?,
            None => o.seed,
        };
        if !o.r.is_finite() {
            return Err(CliError::Usage(format!("--r must be finite, got {}", o.r)));
        }
        let zero_ok = cli.command == Command::Smooth;
        for &t in &o.scales {
            let ok = t.is_finite() && (t > 0.0 || (zero_ok && t == 0.0));
            if !ok {
                return Err(CliError::Usage(format!("invalid scale {t}")));
            }
        }
        if o.scales.is_empty() {
            return Err(CliError::Usage("--scales is empty".into()));
        }
        if o.points < 3 {
            return Err(CliError::Usage("--points must be at least 3".into()));
        }
        Ok(RunConfig {
            command: cli.command,
            r: o.r,
            scales: o.scales,
            input: o.input,
            output: o.output,
            format: o.format,
            extension: o.extension,
            seed,
            quick: o.quick,
            mc_paths: o.mc_paths,
            mc_dt: o.mc_dt,
            pde_length: o.pde_length,
            pde_n: o.pde_n,
            pde_dt: o.pde_dt,
            time_unit: o.time_unit,
            points: o.points,
            inject_fault: o.inject_fault,
        })
    }

    /// Parses `args` (including the program name) with the given seed override.
    pub fn parse_from<I, T>(args: I, env_seed: Option<String>) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
        RunConfig::from_cli(cli, env_seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_seed_overrides_flag() {
        let cfg = RunConfig::parse_from(["scale-smooth", "verify", "--seed", "5"], Some("77".into())).unwrap();
        assert_eq!(cfg.seed, 77);
        let cfg = RunConfig::parse_from(["scale-smooth", "verify", "--seed", "5"], None).unwrap();
        assert_eq!(cfg.seed, 5);
        assert!(RunConfig::parse_from(["scale-smooth", "verify"], Some("abc".into())).is_err());
    }

    #[test]
    fn scale_rules() {
        assert!(RunConfig::parse_from(["scale-smooth", "smooth", "--scales", "0,1"], None).is_ok());
        assert!(RunConfig::parse_from(["scale-smooth", "weights", "--scales", "0,1"], None).is_err());
        assert!(RunConfig::parse_from(["scale-smooth", "weights", "--scales", "-1"], None).is_err());
        let cfg =
            RunConfig::parse_from(["scale-smooth", "weights", "--r", "-0.5", "--scales", "0.05,200"], None).unwrap();
        assert_eq!(cfg.r, -0.5);
        assert_eq!(cfg.scales, vec![0.05, 200.0]);
    }
}

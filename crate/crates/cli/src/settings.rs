//! Diffusion flags, the optional TOML config file, and how they combine.

use std::path::{Path, PathBuf};

use chromadiff::{DiffusionConfig, SchemeKind};
use clap::Args;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_SIGMA_N: f64 = 20.0;

fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    s.parse().map_err(|e: chromadiff::Error| e.to_string())
}

/// Flags shared by `denoise` and `bench`. Unset flags fall back to the
/// config file, then to the library defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct DiffusionFlags {
    /// Diffusion scheme: proposed, td or pm
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<SchemeKind>,
    /// Gaussian scale of the multigradient, in pixels [default: 2]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Gaussian scale applied to the TV gradient magnitudes [default: 2]
    #[arg(long)]
    pub rho: Option<f64>,
    /// Time step of the main diffusion [default: 0.2]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of diffusion iterations [default: 40]
    #[arg(long)]
    pub iters: Option<usize>,
    /// Number of TV flow iterations used for the channel weights [default: 50]
    #[arg(long)]
    pub tv_iters: Option<usize>,
    /// Weight of the chromatic coupling term [default: 0.4]
    #[arg(long)]
    pub coupling_gain: Option<f64>,
    /// Contrast parameter of the Perona-Malik baseline [default: 0.05]
    #[arg(long)]
    pub pm_kappa: Option<f64>,
    /// Noise level on the 0..255 scale [default: 20]
    #[arg(long)]
    pub sigma_n: Option<f64>,
    /// Noise seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file with any of the settings above (flags take precedence)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scheme: Option<String>,
    sigma: Option<f64>,
    rho: Option<f64>,
    dt: Option<f64>,
    iters: Option<usize>,
    tv_iters: Option<usize>,
    coupling_gain: Option<f64>,
    pm_kappa: Option<f64>,
    sigma_n: Option<f64>,
    seed: Option<u64>,
}

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| {
        CliError::Core(chromadiff::Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e.message())))
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub scheme: SchemeKind,
    pub diffusion: DiffusionConfig,
    pub sigma_n: f64,
    pub seed: u64,
}

impl DiffusionFlags {
    pub fn resolve(&self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let scheme = match (self.scheme, &file.scheme) {
            (Some(s), _) => s,
            (None, Some(s)) => parse_scheme(s).map_err(CliError::Usage)?,
            (None, None) => SchemeKind::Proposed,
        };

        let mut cfg = DiffusionConfig::default();
        let pick = |flag: Option<f64>, file: Option<f64>, default: f64| flag.or(file).unwrap_or(default);
        cfg.sigma = pick(self.sigma, file.sigma, cfg.sigma);
        cfg.tv.rho = pick(self.rho, file.rho, cfg.tv.rho);
        cfg.dt = pick(self.dt, file.dt, cfg.dt);
        cfg.coupling_gain = pick(self.coupling_gain, file.coupling_gain, cfg.coupling_gain);
        cfg.pm_kappa = pick(self.pm_kappa, file.pm_kappa, cfg.pm_kappa);
        cfg.iterations = self.iters.or(file.iters).unwrap_or(cfg.iterations);
        cfg.tv.iterations = self.tv_iters.or(file.tv_iters).unwrap_or(cfg.tv.iterations);
        cfg.validate().map_err(CliError::Core)?;

        let sigma_n = pick(self.sigma_n, file.sigma_n, DEFAULT_SIGMA_N);
        if !(sigma_n >= 0.0) || !sigma_n.is_finite() {
            return Err(CliError::Usage(format!("--sigma-n must be >= 0, got {sigma_n}")));
        }
        Ok(Settings {
            scheme,
            diffusion: cfg,
            sigma_n,
            seed: self.seed.or(file.seed).unwrap_or(0),
        })
    }
}

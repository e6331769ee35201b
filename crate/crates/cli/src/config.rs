//! Command-line flags, TOML config files and the resolved [`RunConfig`].

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use qctf_core::spectrum::{SpectrumMode, FULL_MODE_MAX_SITES};
use qctf_core::Params;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Merged pole spectrum of one spin.
    Spectrum,
    /// Q_q(t) of one spin on a uniform grid.
    Evolve,
    /// Q_q(t) for every spin, long format.
    Heatmap,
    /// Closed-form derivative table with spectral moments.
    Derivatives,
    /// Exact Q_q(t) next to the Bessel transient.
    Transient,
    /// Arrival times and the fitted edge velocity.
    Edge,
    /// Acceptance suite.
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Dominant,
}

impl From<Mode> for SpectrumMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Full => SpectrumMode::Full,
            Mode::Dominant => SpectrumMode::DominantOnly,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Desk,
}

/// Exact single-magnon entanglement dynamics of the periodic XXZ chain.
#[derive(Debug, Parser)]
#[command(name = "qctf", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of sites (odd).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q_max: Option<i64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Acceptance level for `verify`.
    #[arg(long, value_enum)]
    pub level: Option<Level>,
    /// Restrict `verify` to these criterion ids.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u8>>,
}

/// Keys accepted in a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub j: Option<f64>,
    pub delta: Option<f64>,
    pub hbar: Option<f64>,
    pub q: Option<i64>,
    pub q_min: Option<i64>,
    pub q_max: Option<i64>,
    pub tmax: Option<f64>,
    pub steps: Option<usize>,
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub level: Option<Level>,
    pub only: Option<Vec<u8>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))
    }
}

/// Fully resolved run; echoed verbatim in every output header.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub j: f64,
    pub delta: f64,
    pub hbar: f64,
    pub q: Option<i64>,
    pub q_min: Option<i64>,
    pub q_max: Option<i64>,
    pub tmax: f64,
    pub steps: usize,
    pub mode: Mode,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
    pub level: Option<Level>,
    pub only: Option<Vec<u8>>,
}

impl RunConfig {
    pub fn params(&self) -> Result<Params, CliError> {
        Ok(Params::new(self.n, self.j, self.delta, self.hbar)?)
    }

    /// Uniform grid `0..=tmax` with `steps` points.
    pub fn times(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| self.tmax * i as f64 / (self.steps - 1) as f64)
            .collect()
    }

    pub fn q_range(&self) -> std::ops::RangeInclusive<i64> {
        self.q_min.unwrap_or(0)..=self.q_max.unwrap_or(0)
    }
}

/// Time needed for the front of spin `q_max` to cross its threshold, with margin.
fn edge_horizon(q_max: i64, j: f64, hbar: f64) -> f64 {
    1.1 * 1.3 * 2.0 * q_max as f64 * hbar / (std::f64::consts::E * j)
}

pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let command = cli.command;
    let n = cli.n.or(file.n).unwrap_or(33);
    let j = cli.j.or(file.j).unwrap_or(1.0);
    let delta = cli.delta.or(file.delta).unwrap_or(0.0);
    let hbar = cli.hbar.or(file.hbar).unwrap_or(1.0);
    let params = Params::new(n, j, delta, hbar)?;
    let h = params.half_width();

    let q = cli.q.or(file.q);
    let q_min = cli.q_min.or(file.q_min);
    let q_max = cli.q_max.or(file.q_max);
    let (q, q_min, q_max) = match command {
        Command::Spectrum | Command::Evolve => (Some(q.unwrap_or(0)), None, None),
        Command::Transient => (Some(q.unwrap_or(1)), None, None),
        Command::Heatmap => (None, Some(q_min.unwrap_or(-h)), Some(q_max.unwrap_or(h))),
        Command::Derivatives => (None, Some(q_min.unwrap_or(1)), Some(q_max.unwrap_or(5.min(h)))),
        Command::Edge => (None, Some(q_min.unwrap_or(10)), Some(q_max.unwrap_or(24))),
        Command::Verify => (None, None, None),
    };
    for site in [q, q_min, q_max].into_iter().flatten() {
        params.check_site(site)?;
    }
    if let (Some(lo), Some(hi)) = (q_min, q_max) {
        if lo > hi {
            return Err(CliError::Validation(format!("q-min {lo} exceeds q-max {hi}")));
        }
    }

    let default_tmax = match command {
        Command::Edge => edge_horizon(q_max.unwrap_or(1), j, hbar),
        _ => 20.0 * hbar / j,
    };
    let tmax = cli.tmax.or(file.tmax).unwrap_or(default_tmax);
    let steps = cli.steps.or(file.steps).unwrap_or(match command {
        Command::Edge => 5001,
        _ => 400,
    });
    if !(tmax.is_finite() && tmax > 0.0) {
        return Err(CliError::Validation(format!("tmax must be positive and finite, got {tmax}")));
    }
    if steps < 2 {
        return Err(CliError::Validation(format!("steps must be at least 2, got {steps}")));
    }

    let mode = cli.mode.or(file.mode).unwrap_or(Mode::Full);
    if command == Command::Spectrum && mode == Mode::Full && n > FULL_MODE_MAX_SITES {
        return Err(CliError::Validation(format!(
            "full mode supports N ≤ {FULL_MODE_MAX_SITES} (got {n}); pass --mode dominant"
        )));
    }
    let workers = cli.workers.or(file.workers).unwrap_or(1);
    if workers == 0 {
        return Err(CliError::Validation("workers must be at least 1".into()));
    }
    let level = match command {
        Command::Verify => Some(cli.level.or(file.level).unwrap_or(Level::Desk)),
        _ => None,
    };
    let only = match command {
        Command::Verify => cli.only.or(file.only),
        _ => None,
    };
    if let Some(ids) = &only {
        if let Some(bad) = ids.iter().find(|id| !qctf_core::acceptance::IDS.contains(id)) {
            return Err(CliError::Validation(format!("unknown criterion id {bad}")));
        }
    }

    Ok(RunConfig {
        command,
        n,
        j,
        delta,
        hbar,
        q,
        q_min,
        q_max,
        tmax,
        steps,
        mode,
        out: cli.out.or(file.out),
        format: cli.format.or(file.format).unwrap_or(Format::Csv),
        workers,
        level,
        only,
    })
}

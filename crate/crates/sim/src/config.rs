//! Run configuration: defaults, an optional key=value file, and command-line
//! overrides, applied in that order (flags win).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use singlet_core::DetectionMode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown model '{0}' (expected 'constraint' or 'bivector')")]
    UnknownModel(String),
    #[error("unknown detection mode '{0}' (expected 'per-station' or 'paired-filter')")]
    UnknownMode(String),
    #[error("unknown output format '{0}' (expected 'csv' or 'json')")]
    UnknownFormat(String),
    #[error("invalid value for '{key}': {message}")]
    InvalidValue { key: String, message: String },
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("malformed config line '{0}' (expected key=value)")]
    MalformedLine(String),
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("chunk size must be at least 1")]
    NoChunk,
    #[error("grid needs at least 2 points, got {0}")]
    GridTooSmall(usize),
    #[error("expected 4 comma-separated CHSH angles, got {0}")]
    BadChshAngles(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelKind {
    Constraint,
    Bivector,
}

impl FromStr for ModelKind {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "constraint" => Ok(ModelKind::Constraint),
            "bivector" => Ok(ModelKind::Bivector),
            other => Err(ConfigError::UnknownModel(other.to_string())),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Constraint => "constraint",
            ModelKind::Bivector => "bivector",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(ConfigError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

pub fn parse_mode(s: &str) -> Result<DetectionMode, ConfigError> {
    match s {
        "per-station" => Ok(DetectionMode::PerStation),
        "paired-filter" => Ok(DetectionMode::PairedFilter),
        other => Err(ConfigError::UnknownMode(other.to_string())),
    }
}

pub fn mode_name(mode: DetectionMode) -> &'static str {
    match mode {
        DetectionMode::PerStation => "per-station",
        DetectionMode::PairedFilter => "paired-filter",
    }
}

pub const DEFAULT_SEED: u64 = 0x5EED_CAFE;
pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_GRID_POINTS: usize = 37;
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

/// Detector angles `(a, a', b, b')` saturating the CHSH statistic
/// `|E(a,b) + E(a,b') + E(a',b) - E(a',b')|` at 2 sqrt(2) for the cosine
/// correlation: three pair separations of pi/4 and one of 3 pi/4 on the
/// subtracted term.
pub const DEFAULT_CHSH_ANGLES: [f64; 4] = [0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub kappa: f64,
    pub mode: DetectionMode,
    pub trials: u64,
    pub seed: u64,
    pub grid_points: usize,
    /// `(a, a', b, b')` detector angles in the x-z plane.
    pub chsh_angles: [f64; 4],
    pub output_format: OutputFormat,
    pub chunk_size: u64,
    /// Worker threads; `None` uses the process default. The results are
    /// bit-identical for every choice.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Constraint,
            kappa: 1.0,
            mode: DetectionMode::PerStation,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            grid_points: DEFAULT_GRID_POINTS,
            chsh_angles: DEFAULT_CHSH_ANGLES,
            output_format: OutputFormat::Csv,
            chunk_size: DEFAULT_CHUNK_SIZE,
            workers: None,
        }
    }
}

impl RunConfig {
    /// Evenly spaced angles from 0 to pi inclusive.
    pub fn angle_grid(&self) -> Vec<f64> {
        let n = self.grid_points;
        (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::NoTrials);
        }
        if self.chunk_size == 0 {
            return Err(ConfigError::NoChunk);
        }
        if self.grid_points < 2 {
            return Err(ConfigError::GridTooSmall(self.grid_points));
        }
        if !(self.kappa.is_finite() && (self.kappa >= 0.0 || self.kappa == -1.0)) {
            return Err(ConfigError::InvalidValue {
                key: "kappa".into(),
                message: format!("{} is not in {{-1}} U [0, inf)", self.kappa),
            });
        }
        Ok(())
    }

    /// Applies a `key=value` file. Keys use the long-flag spelling; `#`
    /// starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::MalformedLine(raw.to_string()))?;
            self.apply_key(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn apply_key(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
        where
            T::Err: fmt::Display,
        {
            value.parse().map_err(|e: T::Err| ConfigError::InvalidValue {
                key: key.to_string(),
                message: e.to_string(),
            })
        }
        match key {
            "model" => self.model = value.parse()?,
            "kappa" => self.kappa = parse(key, value)?,
            "mode" => self.mode = parse_mode(value)?,
            "trials" => self.trials = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "grid-points" => self.grid_points = parse(key, value)?,
            "chsh-angles" => self.chsh_angles = parse_angle_list(value)?,
            "format" => self.output_format = value.parse()?,
            "chunk-size" => self.chunk_size = parse(key, value)?,
            "workers" => self.workers = Some(parse(key, value)?),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }
}

/// Parses `a,a',b,b'` as four comma-separated angles in radians.
pub fn parse_angle_list(value: &str) -> Result<[f64; 4], ConfigError> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|p| {
            p.trim().parse::<f64>().map_err(|e| ConfigError::InvalidValue {
                key: "chsh-angles".into(),
                message: e.to_string(),
            })
        })
        .collect::<Result<_, _>>()?;
    let n = parts.len();
    parts.try_into().map_err(|_| ConfigError::BadChshAngles(n))
}

/// Parses a comma-separated kappa list for sweeps.
pub fn parse_kappa_list(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad kappa '{p}': {e}")))
        .collect()
}

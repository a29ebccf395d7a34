//! Flag resolution: command-line flags override an optional plain
//! `key=value` config file, which overrides the built-in defaults.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nonmarkov::dynamics::BathSpec;
use nonmarkov::measure::defaults;
use nonmarkov::Bath64;

/// Failures split by exit code: usage problems exit 2, runtime problems 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<nonmarkov::Error> for CliError {
    fn from(err: nonmarkov::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

const KNOWN_KEYS: &[&str] = &[
    "lambda-ratio",
    "t-max",
    "steps",
    "r",
    "r-grid",
    "lambda-grid",
    "out",
    "precision",
];

/// Parsed `key=value` file; keys mirror the long flag names.
#[derive(Debug, Default)]
pub struct FileConfig {
    values: HashMap<String, String>,
}

impl FileConfig {
    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {} is not key=value: {line}",
                    lineno + 1
                )));
            };
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Usage(format!("unknown config key: {key}")));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::Usage(format!("config key {key} has invalid value {raw}: {e}"))
            }),
        }
    }
}

/// Validated run parameters shared by the subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub lambda_ratio: f64,
    pub t_max: f64,
    pub steps: usize,
    pub r: f64,
    pub precision: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn bath(&self) -> CliResult<Bath64> {
        Ok(BathSpec::new(self.lambda_ratio)?)
    }
}

pub struct Resolver<'a> {
    pub file: &'a FileConfig,
}

impl<'a> Resolver<'a> {
    pub fn new(file: &'a FileConfig) -> Self {
        Self { file }
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.file.get(key),
        }
    }

    pub fn run_config(
        &self,
        lambda_ratio: Option<f64>,
        t_max: Option<f64>,
        steps: Option<usize>,
        r: Option<f64>,
        precision: Option<usize>,
        out: Option<PathBuf>,
    ) -> CliResult<RunConfig> {
        let lambda_ratio = self
            .pick(lambda_ratio, "lambda-ratio")?
            .unwrap_or(3.0);
        if lambda_ratio <= 0.0 || !lambda_ratio.is_finite() {
            return Err(CliError::Usage(format!(
                "--lambda-ratio must be a positive real, got {lambda_ratio}"
            )));
        }
        let t_max = match self.pick(t_max, "t-max")? {
            Some(v) => v,
            None => {
                if lambda_ratio < 2.0 {
                    defaults::T_MAX_OSCILLATORY
                } else {
                    defaults::T_MAX_MARKOVIAN
                }
            }
        };
        if t_max <= 0.0 || !t_max.is_finite() {
            return Err(CliError::Usage(format!(
                "--t-max must be a positive real, got {t_max}"
            )));
        }
        let steps = self.pick(steps, "steps")?.unwrap_or(defaults::STEPS);
        if steps < 200 {
            return Err(CliError::Usage(format!(
                "--steps must be at least 200, got {steps}"
            )));
        }
        let r = self.pick(r, "r")?.unwrap_or(0.0);
        if !(0.0..=1.0).contains(&r) {
            return Err(CliError::Usage(format!(
                "--r must lie in [0, 1], got {r}"
            )));
        }
        let precision = self.pick(precision, "precision")?.unwrap_or(9);
        if !(1..=17).contains(&precision) {
            return Err(CliError::Usage(format!(
                "--precision must lie in 1..=17, got {precision}"
            )));
        }
        let out = match out {
            Some(p) => Some(p),
            None => self.file.get::<String>("out")?.map(PathBuf::from),
        };
        Ok(RunConfig { lambda_ratio, t_max, steps, r, precision, out })
    }

    pub fn grid(
        &self,
        flag: Option<&str>,
        key: &str,
        range: Option<(f64, f64)>,
    ) -> CliResult<Option<Vec<f64>>> {
        let raw = match flag {
            Some(v) => Some(v.to_string()),
            None => self.file.get::<String>(key)?,
        };
        let Some(raw) = raw else {
            return Ok(None);
        };
        let mut grid = Vec::new();
        for piece in raw.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let value: f64 = piece.parse().map_err(|_| {
                CliError::Usage(format!("--{key}: {piece} is not a number"))
            })?;
            if let Some((lo, hi)) = range {
                if !(lo..=hi).contains(&value) {
                    return Err(CliError::Usage(format!(
                        "--{key}: {value} lies outside [{lo}, {hi}]"
                    )));
                }
            } else if value <= 0.0 || !value.is_finite() {
                return Err(CliError::Usage(format!(
                    "--{key}: {value} must be a positive real"
                )));
            }
            grid.push(value);
        }
        if grid.is_empty() {
            return Err(CliError::Usage(format!("--{key}: empty grid")));
        }
        grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid entries"));
        grid.dedup();
        Ok(Some(grid))
    }
}

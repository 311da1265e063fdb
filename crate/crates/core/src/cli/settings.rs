use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::CliError;
use crate::channel::{CorrelationSpec, SystemConfig};
use crate::montecarlo::SampleSpec;

/// `start:stop:step` in dB, inclusive of `stop`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGrid {
    pub fn points_db(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

impl FromStr for SnrGrid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(CliError::Usage(format!(
                "SNR grid must be start:stop:step, got {s:?}"
            )));
        };
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("bad number {x:?} in SNR grid {s:?}")))
        };
        let grid = SnrGrid {
            start: parse(start)?,
            stop: parse(stop)?,
            step: parse(step)?,
        };
        if !(grid.step > 0.0) {
            return Err(CliError::Usage(format!(
                "SNR grid step must be positive, got {}",
                grid.step
            )));
        }
        if grid.stop < grid.start {
            return Err(CliError::Usage(format!(
                "SNR grid stop {} is below start {}",
                grid.stop, grid.start
            )));
        }
        if (grid.stop - grid.start) / grid.step > 1e6 {
            return Err(CliError::Usage(
                "SNR grid has more than a million points".into(),
            ));
        }
        Ok(grid)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Quantities a sweep reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Emit {
    pub mc: bool,
    pub asy: bool,
    pub inf_mc: bool,
    pub inf_asy: bool,
}

impl Emit {
    pub fn any_mc(&self) -> bool {
        self.mc || self.inf_mc
    }

    pub fn any_limit(&self) -> bool {
        self.inf_mc || self.inf_asy
    }
}

impl FromStr for Emit {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut emit = Emit::default();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match item {
                "mc" => emit.mc = true,
                "asy" => emit.asy = true,
                "inf_mc" => emit.inf_mc = true,
                "inf_asy" => emit.inf_asy = true,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown output {other:?}; expected a subset of mc,asy,inf_mc,inf_asy"
                    )))
                }
            }
        }
        if emit == Emit::default() {
            return Err(CliError::Usage("--emit selects nothing".into()));
        }
        Ok(emit)
    }
}

pub fn parse_l_list(s: &str) -> Result<Vec<u32>, CliError> {
    let values = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<u32>()
                .ok()
                .filter(|&l| l > 0)
                .ok_or_else(|| CliError::Usage(format!("bad diversity order {x:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::Usage("empty diversity order list".into()));
    }
    Ok(values)
}

/// Everything a command may need, after defaults, config file and flags.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub nt: u32,
    pub nr: u32,
    pub eta: f64,
    pub ps: f64,
    pub l_values: Vec<u32>,
    pub snr: SnrGrid,
    pub samples: u64,
    pub seed: u64,
    pub streams: u32,
    pub emit: Emit,
    pub corr: CorrelationSpec,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            nt: 4,
            nr: 2,
            eta: 0.2,
            ps: 1.0,
            l_values: vec![1],
            snr: SnrGrid {
                start: 0.0,
                stop: 40.0,
                step: 5.0,
            },
            samples: 100_000,
            seed: 42,
            streams: 16,
            emit: Emit {
                mc: true,
                asy: true,
                inf_mc: false,
                inf_asy: false,
            },
            corr: CorrelationSpec::Identity,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value {value:?} for {key}")))
}

impl Settings {
    /// Applies one `key=value` setting; keys match the long flag names with
    /// `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key.trim().replace('-', "_").as_str() {
            "nt" => self.nt = parse_value(key, value)?,
            "nr" => self.nr = parse_value(key, value)?,
            "eta" => self.eta = parse_value(key, value)?,
            "ps" => self.ps = parse_value(key, value)?,
            "l" => self.l_values = parse_l_list(value)?,
            "snr_db" => self.snr = value.trim().parse()?,
            "samples" => self.samples = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "streams" => self.streams = parse_value(key, value)?,
            "emit" => self.emit = value.parse()?,
            "corr" => self.corr = value.trim().parse()?,
            other => return Err(CliError::Usage(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    /// Reads a flat `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let mut seen = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    n + 1
                )));
            };
            seen.insert(key.trim().to_string(), value.trim().to_string());
        }
        for (key, value) in &seen {
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn config(&self, l: u32) -> Result<SystemConfig, CliError> {
        Ok(SystemConfig::new(self.nt, self.nr, l, self.eta, self.ps)?)
    }

    pub fn sample_spec(&self) -> Result<SampleSpec, CliError> {
        Ok(SampleSpec::new(self.seed, self.samples, self.streams)?)
    }
}

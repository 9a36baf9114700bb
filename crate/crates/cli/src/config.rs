//! Experiment configuration: per-experiment defaults, `key=value` config files and
//! command-line overrides, applied in that order.

use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// One degree, several ridge penalties.
    RegSweep,
    /// Several degrees, one ridge penalty.
    DegreeSweep,
    /// Score a test CSV against a training CSV.
    Score,
}

impl Experiment {
    pub fn file_prefix(&self) -> &'static str {
        match self {
            Experiment::RegSweep => "fig1",
            Experiment::DegreeSweep => "fig2",
            Experiment::Score => "fit",
        }
    }
}

/// Evenly spaced test points `lo, ..., hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.hi
                } else {
                    self.lo + span * (k as f64 / last)
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("grid must be lo:hi:count, got `{s}`")));
        }
        Ok(Grid {
            lo: parse_f64("grid lo", parts[0])?,
            hi: parse_f64("grid hi", parts[1])?,
            count: parse_usize("grid count", parts[2])?,
        })
    }
}

/// How training labels are produced for the sweeps.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelGen {
    /// `y = sum_k coeffs[k] t^k` plus optional Gaussian noise with standard deviation `noise`.
    Polynomial { coeffs: Vec<f64>, noise: f64 },
    /// Labels come from the training CSV (score mode).
    FromFile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_train: usize,
    pub degrees: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub sigma2: f64,
    pub grid: Grid,
    pub seed: u64,
    pub label_gen: LabelGen,
    pub out_dir: PathBuf,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
}

/// Default label polynomial `t^2 - 0.5 t`, lowest power first.
pub const DEFAULT_COEFFS: [f64; 3] = [0.0, -0.5, 1.0];
pub const DEFAULT_SEED: u64 = 2019;

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (n_train, degrees, lambdas, label_gen) = match experiment {
            Experiment::RegSweep => (3, vec![2], vec![0.0, 0.1, 1.0], default_labels()),
            Experiment::DegreeSweep => (10, vec![2, 3, 10], vec![1e-4], default_labels()),
            Experiment::Score => (1, vec![], vec![0.0], LabelGen::FromFile),
        };
        ExperimentConfig {
            experiment,
            n_train,
            degrees,
            lambdas,
            sigma2: 1.0,
            grid: Grid {
                lo: -1.0,
                hi: 1.0,
                count: 201,
            },
            seed: DEFAULT_SEED,
            label_gen,
            out_dir: PathBuf::from("out"),
            train: None,
            test: None,
        }
    }

    /// Apply one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "n_train" | "n-train" => self.n_train = parse_usize(key, value)?,
            "degrees" => self.degrees = parse_list(key, value, parse_usize)?,
            "lambdas" => self.lambdas = parse_list(key, value, parse_f64)?,
            "sigma2" => self.sigma2 = parse_f64(key, value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| CliError::Config(format!("seed: `{value}` is not a 64-bit unsigned integer")))?
            }
            "grid" => self.grid = value.parse()?,
            "out_dir" | "out-dir" => self.out_dir = PathBuf::from(value),
            "train" => self.train = Some(PathBuf::from(value)),
            "test" => self.test = Some(PathBuf::from(value)),
            "coeffs" => {
                let coeffs = parse_list(key, value, parse_f64)?;
                let noise = match &self.label_gen {
                    LabelGen::Polynomial { noise, .. } => *noise,
                    LabelGen::FromFile => 0.0,
                };
                self.label_gen = LabelGen::Polynomial { coeffs, noise };
            }
            "noise" => {
                let noise = parse_f64(key, value)?;
                let coeffs = match &self.label_gen {
                    LabelGen::Polynomial { coeffs, .. } => coeffs.clone(),
                    LabelGen::FromFile => DEFAULT_COEFFS.to_vec(),
                };
                self.label_gen = LabelGen::Polynomial { coeffs, noise };
            }
            other => return Err(CliError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Apply a UTF-8 `key=value` config file; `#` starts a comment.
    pub fn apply_file_contents(&mut self, contents: &str) -> Result<()> {
        for (lineno, raw) in contents.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("config line {}: expected key=value, got `{raw}`", lineno + 1))
            })?;
            self.set(key, value)
                .map_err(|e| CliError::Config(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if !(g.lo.is_finite() && g.hi.is_finite() && g.lo < g.hi) {
            return Err(CliError::Config(format!("grid needs lo < hi, got {}:{}", g.lo, g.hi)));
        }
        if g.count < 2 {
            return Err(CliError::Config("grid count must be >= 2".into()));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(CliError::Config(format!("sigma2 must be > 0, got {}", self.sigma2)));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(CliError::Config(format!("lambdas must be finite and >= 0, got {l}")));
        }
        if self.lambdas.is_empty() {
            return Err(CliError::Config("at least one lambda is required".into()));
        }
        match self.experiment {
            Experiment::RegSweep | Experiment::DegreeSweep => {
                if self.n_train < 1 {
                    return Err(CliError::Config("n_train must be >= 1".into()));
                }
                if self.degrees.is_empty() {
                    return Err(CliError::Config("degrees must be nonempty for sweeps".into()));
                }
                match &self.label_gen {
                    LabelGen::Polynomial { coeffs, noise } => {
                        if coeffs.iter().any(|c| !c.is_finite()) || !(noise.is_finite() && *noise >= 0.0) {
                            return Err(CliError::Config("coeffs must be finite and noise >= 0".into()));
                        }
                    }
                    LabelGen::FromFile => return Err(CliError::Config("sweeps generate their own labels".into())),
                }
            }
            Experiment::Score => {
                if self.lambdas.len() != 1 {
                    return Err(CliError::Config("fit takes exactly one lambda".into()));
                }
                if self.train.is_none() || self.test.is_none() {
                    return Err(CliError::Config("fit needs --train and --test".into()));
                }
            }
        }
        Ok(())
    }
}

fn default_labels() -> LabelGen {
    LabelGen::Polynomial {
        coeffs: DEFAULT_COEFFS.to_vec(),
        noise: 0.0,
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: `{value}` is not a number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: `{value}` is not a nonnegative integer")))
}

fn parse_list<T>(key: &str, value: &str, parse: fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s))
        .collect()
}

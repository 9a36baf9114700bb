//! Polynomial-fitting sweeps and dataset scoring.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use pnml_core::{build_vandermonde, learnability_profile, monomials, pnml_predict, Dataset, Execution, RidgeConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::{Experiment, ExperimentConfig, LabelGen};
use crate::error::{CliError, Result};

/// Training points closer than this are treated as duplicates and resampled.
pub const MIN_POINT_GAP: f64 = 1e-12;
pub const MAX_RESAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

/// Draw `n_train` points uniformly on `[-1, 1)` from a ChaCha8 stream seeded with `seed`,
/// then the labels (noise draws follow the point draws in the same stream).
pub fn sample_training(cfg: &ExperimentConfig) -> Result<TrainingSet> {
    let (coeffs, noise) = match &cfg.label_gen {
        LabelGen::Polynomial { coeffs, noise } => (coeffs.as_slice(), *noise),
        LabelGen::FromFile => return Err(CliError::Config("sweeps need a polynomial label generator".into())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for attempt in 0..=MAX_RESAMPLES {
        let t: Vec<f64> = (0..cfg.n_train).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut sorted = t.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[1] - w[0] <= MIN_POINT_GAP) {
            eprintln!("warning: duplicate training points in draw {attempt}, resampling");
            continue;
        }
        let y = t
            .iter()
            .map(|&ti| {
                let clean = coeffs.iter().rev().fold(0.0, |acc, c| acc * ti + c);
                if noise > 0.0 {
                    clean + noise * rng.sample::<f64, _>(StandardNormal)
                } else {
                    clean
                }
            })
            .collect();
        return Ok(TrainingSet { t, y });
    }
    Err(CliError::Data(format!(
        "could not draw {} distinct training points after {MAX_RESAMPLES} retries",
        cfg.n_train
    )))
}

/// Prediction and regret curves of one `(degree, lambda)` learner over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub degree: usize,
    pub lambda: f64,
    pub yhat: Vec<f64>,
    pub regret: Vec<f64>,
}

impl Curve {
    pub fn label(&self) -> String {
        format!("deg{}_lam{}", self.degree, self.lambda)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub experiment: Experiment,
    pub training: TrainingSet,
    pub grid: Vec<f64>,
    pub curves: Vec<Curve>,
}

impl SweepOutput {
    pub fn curve(&self, degree: usize, lambda: f64) -> Option<&Curve> {
        self.curves.iter().find(|c| c.degree == degree && c.lambda == lambda)
    }

    fn table(&self, column: &str, pick: fn(&Curve) -> &[f64]) -> String {
        let mut out = String::from("t");
        for c in &self.curves {
            let _ = write!(out, ",{column}_{}", c.label());
        }
        out.push('\n');
        for (k, t) in self.grid.iter().enumerate() {
            let _ = write!(out, "{t}");
            for c in &self.curves {
                let _ = write!(out, ",{}", pick(c)[k]);
            }
            out.push('\n');
        }
        out
    }

    pub fn predictions_csv(&self) -> String {
        self.table("yhat", |c| &c.yhat)
    }

    pub fn regret_csv(&self) -> String {
        self.table("regret", |c| &c.regret)
    }

    pub fn training_csv(&self) -> String {
        let mut out = String::from("t,y\n");
        for (t, y) in self.training.t.iter().zip(&self.training.y) {
            let _ = writeln!(out, "{t},{y}");
        }
        out
    }

    /// Write `<prefix>_predictions.csv`, `<prefix>_regret.csv` and `<prefix>_training.csv`.
    pub fn write(&self, out_dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(out_dir)?;
        let prefix = self.experiment.file_prefix();
        let files = [
            (format!("{prefix}_predictions.csv"), self.predictions_csv()),
            (format!("{prefix}_regret.csv"), self.regret_csv()),
            (format!("{prefix}_training.csv"), self.training_csv()),
        ];
        let mut written = Vec::new();
        for (name, body) in files {
            let path = out_dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Fit a polynomial pNML learner and evaluate it on every grid point.
pub fn polynomial_curve(
    training: &TrainingSet,
    degree: usize,
    cfg: &RidgeConfig,
    grid: &[f64],
    exec: Execution,
) -> Result<Curve> {
    let features = build_vandermonde(&training.t, degree)?;
    let data = Dataset::new(features, DVector::from_column_slice(&training.y))?;
    let points = exec.map(grid, |&t| {
        let x = monomials(t, degree)?;
        pnml_predict(&data, &x, cfg).map(|p| (p.y_hat(), p.regret()))
    });
    let mut yhat = Vec::with_capacity(grid.len());
    let mut regret = Vec::with_capacity(grid.len());
    for p in points {
        let (y, r) = p?;
        yhat.push(y);
        regret.push(r);
    }
    Ok(Curve {
        degree,
        lambda: cfg.lambda(),
        yhat,
        regret,
    })
}

fn run_sweep(cfg: &ExperimentConfig, experiment: Experiment) -> Result<SweepOutput> {
    let cfg = ExperimentConfig {
        experiment,
        ..cfg.clone()
    };
    cfg.validate()?;
    let training = sample_training(&cfg)?;
    let grid = cfg.grid.points();
    let mut curves = Vec::new();
    for &degree in &cfg.degrees {
        for &lambda in &cfg.lambdas {
            let ridge = RidgeConfig::new(lambda, cfg.sigma2)?;
            curves.push(polynomial_curve(
                &training,
                degree,
                &ridge,
                &grid,
                Execution::default(),
            )?);
        }
    }
    Ok(SweepOutput {
        experiment,
        training,
        grid,
        curves,
    })
}

/// Regularization sweep: one degree, every configured lambda.
pub fn run_reg_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    run_sweep(cfg, Experiment::RegSweep)
}

/// Degree sweep: every configured degree, every configured lambda.
pub fn run_degree_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    run_sweep(cfg, Experiment::DegreeSweep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreRow {
    pub y_hat: f64,
    pub h: f64,
    pub regret: f64,
    pub gamma: f64,
    pub learnable: bool,
}

pub const SCORE_HEADER: &str = "y_hat,h,regret,gamma,flag";

impl ScoreRow {
    pub fn csv_row(&self) -> String {
        let flag = if self.learnable { "learnable" } else { "non-learnable" };
        format!("{},{},{},{},{flag}", self.y_hat, self.h, self.regret, self.gamma)
    }
}

/// pNML prediction and spectral gamma for every test row.
pub fn score(train: &Dataset, test: &Dataset, cfg: &RidgeConfig) -> Result<Vec<ScoreRow>> {
    if test.is_empty() {
        return Ok(Vec::new());
    }
    if test.dim() != train.dim() {
        return Err(CliError::Data(format!(
            "test set has {} features, training set has {}",
            test.dim(),
            train.dim()
        )));
    }
    let xs: Vec<DVector<f64>> = (0..test.len()).map(|i| test.sample(i).0).collect();
    let profile = learnability_profile(train, &xs)?;
    let preds = Execution::default().map(&xs, |x| pnml_predict(train, x, cfg));
    preds
        .into_iter()
        .zip(profile)
        .map(|(pred, prof)| {
            let pred = pred?;
            Ok(ScoreRow {
                y_hat: pred.y_hat(),
                h: pred.h(),
                regret: pred.regret(),
                gamma: prof.gamma,
                learnable: pred.is_learnable(),
            })
        })
        .collect()
}

fn read_dataset(path: &Path) -> Result<Option<Dataset>> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(None);
    }
    Dataset::read_csv(bytes.as_slice())
        .map(Some)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn scores_csv(rows: &[ScoreRow]) -> String {
    let mut out = format!("{SCORE_HEADER}\n");
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Score `test_csv` against `train_csv` and write `<out_dir>/fit_scores.csv`.
pub fn run_score(cfg: &ExperimentConfig, train_csv: &Path, test_csv: &Path) -> Result<PathBuf> {
    let ridge = RidgeConfig::new(cfg.lambdas[0], cfg.sigma2)?;
    let train = read_dataset(train_csv)?
        .ok_or_else(|| CliError::Data(format!("{}: empty training file", train_csv.display())))?;
    let rows = match read_dataset(test_csv)? {
        Some(test) => score(&train, &test, &ridge)?,
        None => Vec::new(),
    };
    fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join("fit_scores.csv");
    fs::write(&path, scores_csv(&rows))?;
    Ok(path)
}

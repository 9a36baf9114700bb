//! Experiment runner for the pNML polynomial-regression study.
//!
//! `fig1` sweeps the ridge penalty at a fixed degree, `fig2` sweeps the polynomial
//! degree at a fixed penalty, and `fit` scores an arbitrary test CSV against a
//! training CSV. All numerics come from `pnml-core`; this crate only samples,
//! orchestrates and formats.

pub mod config;
pub mod error;
pub mod experiment;

pub use config::{Experiment, ExperimentConfig, Grid, LabelGen};
pub use error::{CliError, Result};
pub use experiment::{run_degree_sweep, run_reg_sweep, run_score, score, Curve, ScoreRow, SweepOutput, TrainingSet};

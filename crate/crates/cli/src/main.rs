use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pnml_cli::{run_degree_sweep, run_reg_sweep, run_score, CliError, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "pnml", version, about = "pNML linear-regression experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a test CSV against a training CSV.
    Fit(Flags),
    /// Regularization sweep: one polynomial degree, several ridge penalties.
    Fig1(Flags),
    /// Degree sweep: several polynomial degrees, one ridge penalty.
    Fig2(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// key=value config file, applied before the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_train: Option<String>,
    /// comma-separated polynomial degrees
    #[arg(long)]
    degrees: Option<String>,
    /// comma-separated ridge penalties
    #[arg(long, allow_hyphen_values = true)]
    lambdas: Option<String>,
    #[arg(long)]
    sigma2: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// test-point grid as lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// label polynomial coefficients, lowest power first
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// standard deviation of Gaussian label noise
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
}

fn build_config(experiment: Experiment, flags: &Flags) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::defaults(experiment);
    if let Some(path) = &flags.config {
        let contents =
            std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_file_contents(&contents)?;
    }
    let pairs = [
        ("n_train", &flags.n_train),
        ("degrees", &flags.degrees),
        ("lambdas", &flags.lambdas),
        ("sigma2", &flags.sigma2),
        ("seed", &flags.seed),
        ("grid", &flags.grid),
        ("coeffs", &flags.coeffs),
        ("noise", &flags.noise),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(dir) = &flags.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(p) = &flags.train {
        cfg.train = Some(p.clone());
    }
    if let Some(p) = &flags.test {
        cfg.test = Some(p.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let (experiment, flags) = match &cli.command {
        Command::Fit(f) => (Experiment::Score, f),
        Command::Fig1(f) => (Experiment::RegSweep, f),
        Command::Fig2(f) => (Experiment::DegreeSweep, f),
    };
    let cfg = build_config(experiment, flags)?;
    match experiment {
        Experiment::RegSweep => run_reg_sweep(&cfg)?.write(&cfg.out_dir),
        Experiment::DegreeSweep => run_degree_sweep(&cfg)?.write(&cfg.out_dir),
        Experiment::Score => {
            let train = cfg.train.clone().expect("validated");
            let test = cfg.test.clone().expect("validated");
            Ok(vec![run_score(&cfg, &train, &test)?])
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

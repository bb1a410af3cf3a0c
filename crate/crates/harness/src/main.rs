//! `tpsim`: CLI front end for the template-protection simulator.
//! Exit codes: 0 success, 2 config/parameter error, 3 I/O error.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tpsim_harness::config::{CliOverrides, ExperimentConfig, ExperimentId};
use tpsim_harness::db::{build_sca_database, verify_user, EnrollmentDatabase};
use tpsim_harness::{experiments, HarnessError};

#[derive(Parser)]
#[command(name = "tpsim", version, about = "Biometric template-protection leakage simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Master RNG seed (required here or as `seed=` in the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Cohort size C.
    #[arg(long)]
    users: Option<usize>,
    /// Feature dimensionality N (= L; square projections).
    #[arg(long)]
    dim: Option<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pin the worker thread count (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Continuum-helper leakage curves vs F(-tau)/p0 for three p0.
    Fig5(CommonArgs),
    /// Verification error probabilities vs ambiguation ratio.
    Fig6(CommonArgs),
    /// Stored-codeword leakage vs ambiguation ratio, identity and PCA.
    Fig7(CommonArgs),
    /// Monte-Carlo vs closed-form leakage over a quantizer grid.
    HdsValidate(CommonArgs),
    /// Exhaustive code-offset leakage and correction checks.
    ComValidate(CommonArgs),
    /// Support-enumeration attack candidate rankings.
    AttackDemo(CommonArgs),
    /// Enroll a cohort into a template database file.
    Enroll {
        #[command(flatten)]
        common: CommonArgs,
        /// Database file to create.
        #[arg(long)]
        db: PathBuf,
    },
    /// Score a probe vector against an enrolled template.
    Verify {
        /// Database file created by `enroll`.
        #[arg(long)]
        db: PathBuf,
        /// Enrolled user id.
        #[arg(long)]
        user: u32,
        /// Text file of whitespace-separated probe components.
        #[arg(long)]
        probe: PathBuf,
        /// Decision threshold (default: S_t / 2).
        #[arg(long)]
        threshold: Option<i32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Fig5(c) => run_experiment(ExperimentId::Fig5, c),
        Command::Fig6(c) => run_experiment(ExperimentId::Fig6, c),
        Command::Fig7(c) => run_experiment(ExperimentId::Fig7, c),
        Command::HdsValidate(c) => run_experiment(ExperimentId::HdsValidate, c),
        Command::ComValidate(c) => run_experiment(ExperimentId::ComValidate, c),
        Command::AttackDemo(c) => run_experiment(ExperimentId::AttackDemo, c),
        Command::Enroll { common, db } => enroll(common, &db),
        Command::Verify { db, user, probe, threshold } => verify(&db, user, &probe, threshold),
    }
}

fn load_config(id: ExperimentId, common: &CommonArgs) -> Result<ExperimentConfig, HarnessError> {
    let file = match &common.config {
        Some(path) => Some(std::fs::read_to_string(path)?),
        None => None,
    };
    ExperimentConfig::from_sources(
        id,
        file.as_deref(),
        &CliOverrides { seed: common.seed, users: common.users, dim: common.dim },
    )
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, HarnessError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn run_experiment(id: ExperimentId, common: CommonArgs) -> Result<(), HarnessError> {
    let cfg = load_config(id, &common)?;
    let csv = with_threads(common.threads, || experiments::run(&cfg))??;
    emit(common.out.as_deref(), &csv)
}

fn emit(out: Option<&Path>, csv: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn enroll(common: CommonArgs, db_path: &Path) -> Result<(), HarnessError> {
    let cfg = load_config(ExperimentId::Enroll, &common)?;
    let db = with_threads(common.threads, || build_sca_database(&cfg))??;
    db.save(db_path)?;
    println!("enrolled {} users into {}", db.len(), db_path.display());
    Ok(())
}

fn verify(
    db_path: &Path,
    user: u32,
    probe_path: &Path,
    threshold: Option<i32>,
) -> Result<(), HarnessError> {
    let db = EnrollmentDatabase::load(db_path)?;
    let probe = read_probe(probe_path)?;
    let outcome = verify_user(&db, user, &probe, threshold)?;
    println!(
        "decision={} score={} threshold={}",
        if outcome.accept { "accept" } else { "reject" },
        outcome.score,
        outcome.threshold
    );
    Ok(())
}

fn read_probe(path: &Path) -> Result<DVector<f64>, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let values: Result<Vec<f64>, _> = text
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().context(format!("bad probe value `{tok}`")))
        .collect();
    let values = values.map_err(|e| HarnessError::Config(e.to_string()))?;
    if values.is_empty() {
        return Err(HarnessError::Config("probe file is empty".into()));
    }
    Ok(DVector::from_vec(values))
}

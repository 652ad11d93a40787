//! `wignerkit`: analyze linear maps on matrices for Wigner form.
//!
//! Exit codes: 0 = Wigner / success, 1 = not Wigner / failed check, 2 = input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wignerkit::acceptance::{self, Mode};
use wignerkit::genmaps::GeneratorSpec;
use wignerkit::matrix::{haar_unitary, UnitaryMatrix};
use wignerkit::superop::SuperOp;
use wignerkit::wigner::{
    classify, extract_unitary, lemma1_projections, ClassifyConfig, DECOMPOSITION_TOL,
};

const SEED_ENV: &str = "WIGNERKIT_SEED";

#[derive(Parser)]
#[command(
    name = "wignerkit",
    version,
    about = "Wigner-form analysis of linear maps on n x n matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the hypotheses on a map file and decompose it if they hold.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Single tolerance for every check (defaults: 1e-8 projections, 1e-6 decomposition, 1e-9 certification).
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Extract U and the variant without checking hypotheses.
    Decompose {
        file: PathBuf,
        #[arg(long, default_value_t = DECOMPOSITION_TOL)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Write a generated map file.
    Generate {
        /// Generator spec: a path, or inline JSON starting with `{`.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the k+1 rank-k projections that combine to a rank-one projection.
    Lemma {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Draw a Haar-random basis from this seed; the standard basis is used otherwise.
        #[arg(long)]
        seed: Option<u64>,
        /// Basis column spanning the rank-one projection.
        #[arg(long, default_value_t = 0)]
        which: usize,
    },
    /// Run the acceptance criteria.
    Selftest {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
    },
}

#[derive(Args)]
struct Output {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn default_seed() -> Result<u64, InputError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| InputError(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn read_map(path: &Path) -> Result<SuperOp, InputError> {
    let text =
        fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn emit(value: &serde_json::Value, out: &Output) -> Result<(), InputError> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match &out.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, InputError> {
    match cli.command {
        Command::Analyze {
            file,
            k,
            samples,
            seed,
            tol,
            out,
        } => {
            let map = read_map(&file)?;
            let mut config = ClassifyConfig::default().with_seed(match seed {
                Some(s) => s,
                None => default_seed()?,
            });
            if let Some(t) = tol {
                config = config.with_tolerance(t);
            }
            if let Some(s) = samples {
                config.samples = s;
            }
            let report = classify(&map, k, &config)?;
            emit(&report.to_json(), &out)?;
            Ok(if report.is_wigner() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Decompose { file, tol, out } => {
            let map = read_map(&file)?;
            match extract_unitary(&map, tol) {
                Ok(form) => {
                    emit(&form.to_json(), &out)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("wignerkit: {e}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Generate { spec, out } => {
            let text = if spec.trim_start().starts_with('{') {
                spec
            } else {
                fs::read_to_string(&spec).map_err(|e| InputError(format!("{spec}: {e}")))?
            };
            let spec: GeneratorSpec = serde_json::from_str(&text)?;
            let (map, _) = spec.build(default_seed()?)?;
            let body = serde_json::to_string(&map)? + "\n";
            fs::write(&out, body).map_err(|e| InputError(format!("{}: {e}", out.display())))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Lemma { n, k, seed, which } => {
            if n == 0 {
                return Err(InputError("n must be positive".into()));
            }
            let basis = match seed {
                Some(s) => haar_unitary(n, s),
                None => UnitaryMatrix::identity(n),
            };
            let decomposition = lemma1_projections(n, k, &basis, which)?;
            emit(&decomposition.to_json(), &Output { out: None })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { quick, full: _ } => {
            let mode = if quick { Mode::Quick } else { Mode::Full };
            let seed = default_seed()?;
            let mut all = true;
            for &id in mode.criteria() {
                let outcome = acceptance::run_criterion(id, mode.max_n(), seed);
                println!("{outcome}");
                all &= outcome.passed;
            }
            println!(
                "{}",
                if all {
                    "all criteria passed"
                } else {
                    "some criteria FAILED"
                }
            );
            Ok(if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("wignerkit: {msg}");
            ExitCode::from(2)
        }
    }
}

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use skewcoh::commands::{
    cmd_experiment, cmd_figure1, cmd_measure, cmd_verify, parse_dims, render_experiment,
    render_figure1, render_measure, render_verify, verify_table, ExperimentArgs, Format, Scheme,
};
use skewcoh::error::{CliError, EXIT_OK, EXIT_PROPERTY_FAILURE};

/// Skew-information coherence: measures, interferometric protocol
/// simulation and numerical property checks.
#[derive(Parser)]
#[command(name = "skewcoh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Skew information, lower bound, variance and purity of a state.
    Measure {
        #[arg(long)]
        state: PathBuf,
        /// pauli:n=x,y,z | diag:k1,...,kd | path to a matrix JSON file
        #[arg(long)]
        observable: String,
    },
    /// Variance, skew information and linear entropy of (1 + p sigma_x)/2
    /// against sigma_z on a grid of p.
    Figure1 {
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Simulate a detection scheme, exactly (--shots 0) or with shot noise.
    Experiment {
        #[arg(long, value_enum, default_value = "1")]
        scheme: Scheme,
        #[arg(long)]
        state: PathBuf,
        /// Second state for scheme 2; purity mode when absent.
        #[arg(long)]
        state_b: Option<PathBuf>,
        #[arg(long)]
        observable: Option<String>,
        /// Ancilla qubit state for scheme 1 (default |0><0|).
        #[arg(long)]
        ancilla: Option<PathBuf>,
        /// Phase for scheme 1 (default 1e-3 / ||K||).
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a property suite; exit status 1 if any property fails.
    Verify {
        #[arg(long, default_value = "default")]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value = "2,3,4,5,8")]
        dims: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output {
                    path: "stdout".into(),
                    message: e.to_string(),
                })
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Measure { state, observable } => {
            let report = cmd_measure(&state, &observable)?;
            emit(&cli.out, &render_measure(&report, cli.format))?;
        }
        Command::Figure1 { step } => {
            let rows = cmd_figure1(step)?;
            emit(&cli.out, &render_figure1(&rows, cli.format))?;
        }
        Command::Experiment {
            scheme,
            state,
            state_b,
            observable,
            ancilla,
            t,
            shots,
            seed,
        } => {
            let args = ExperimentArgs {
                scheme,
                state,
                state_b,
                observable,
                ancilla,
                t,
                shots,
                seed,
            };
            let report = cmd_experiment(&args)?;
            for q in &report.open_questions {
                eprintln!("open question: {q}");
            }
            emit(&cli.out, &render_experiment(&report, cli.format))?;
        }
        Command::Verify {
            suite,
            trials,
            dims,
            seed,
            jobs,
        } => {
            let dims = parse_dims(&dims)?;
            let report = cmd_verify(&suite, trials, &dims, seed, jobs)?;
            eprint!("{}", verify_table(&report));
            emit(&cli.out, &render_verify(&report, cli.format))?;
            return Ok(if report.pass {
                EXIT_OK
            } else {
                EXIT_PROPERTY_FAILURE
            });
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

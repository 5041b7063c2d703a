use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weakdamp::cli::report::{exit_code_for, format_certifications, EXIT_CERTIFICATION, EXIT_OK};
use weakdamp::cli::{self, ScenarioConfig};
use weakdamp::Result;

#[derive(Parser)]
#[command(name = "weakdamp", version, about = "Weakly damped oscillator laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or the name of a built-in scenario).
    Run {
        config: String,
        /// Output directory [default: out/<scenario name>]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the integration tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Override the horizon (elapsed time past t0).
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Run only the algebra and resolvent certifications of a scenario.
    Certify { scenario: String },
}

/// A config file path, or the name of a built-in scenario when no such file exists.
fn load(arg: &str) -> Result<ScenarioConfig> {
    let path = std::path::Path::new(arg);
    if !path.exists() {
        if let Some(c) = cli::builtin_scenario(arg) {
            return Ok(c);
        }
        return Err(weakdamp::LabError::Config {
            line: 0,
            key: "config".into(),
            message: format!("`{arg}` is neither a file nor a built-in scenario"),
        });
    }
    let text = std::fs::read_to_string(path)?;
    cli::parse_config(&text)
}

/// Write to stdout, tolerating a closed pipe (`weakdamp run ... | head`).
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Run { config, out, tol, horizon } => {
            let mut cfg = load(&config)?;
            if let Some(t) = tol {
                cfg = cfg.with_tol(t)?;
            }
            if let Some(h) = horizon {
                cfg = cfg.with_horizon(h)?;
            }
            let dir = out.unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
            let mut result = cli::run_scenario(&cfg)?;
            cli::write_outputs(&mut result, &dir)?;
            emit(&result.report.summary());
            emit(&format!("artifacts written to {}\n", dir.display()));
            Ok(result.report.exit_code())
        }
        Command::ListScenarios => {
            for c in cli::builtin_scenarios() {
                emit(&format!(
                    "{:<26} family={:<22} forcing={:<18} omega={}\n",
                    c.name, c.family, c.forcing, c.omega
                ));
            }
            Ok(EXIT_OK)
        }
        Command::Certify { scenario } => {
            let cfg = load(&scenario)?;
            let certs = cli::certify_scenario(&cfg)?;
            emit(&format_certifications(&certs));
            Ok(if certs.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_CERTIFICATION })
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}

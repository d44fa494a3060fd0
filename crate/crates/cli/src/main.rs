//! `gtp`: simulate predictive betting games, parse words, run analyses,
//! and verify the library's identities.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gtp_cli::commands::{cmd_analyze, cmd_parse, cmd_simulate};
use gtp_cli::config::ExperimentConfig;
use gtp_cli::verify::{run_suite, VerifyOptions, SUITE_NAMES};
use gtp_cli::CliError;
use gtp_core::Alphabet;

#[derive(Parser)]
#[command(name = "gtp", about = "Predictive betting game simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured game and write trajectory/summary files.
    Simulate {
        /// JSON experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config file's seed (and the GTP_SEED variable).
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config file's horizon.
        #[arg(long)]
        horizon: Option<usize>,
        /// Overrides the config file's trajectory output path.
        #[arg(long)]
        trajectory_csv: Option<PathBuf>,
        /// Overrides the config file's summary output path.
        #[arg(long)]
        summary_json: Option<PathBuf>,
    },
    /// Incrementally parse a word and print its phrase decomposition.
    Parse(WordInput),
    /// Emit a JSON analysis report for a word.
    Analyze {
        #[command(flatten)]
        input: WordInput,
        /// Reference distribution, comma-separated probabilities.
        #[arg(long)]
        reference: Option<String>,
        /// Kernel config file enabling the divergence decomposition.
        #[arg(long)]
        kernel: Option<PathBuf>,
        /// Context length for the decomposition and the slack bound.
        #[arg(long, default_value_t = 1)]
        context_len: usize,
    },
    /// Run a verification suite and report pass/fail.
    Verify {
        /// One of: lemma-2.2, ziv, lemma-2.5, eq3, martingale,
        /// ld-closed-form, or "all".
        suite: String,
        /// Maximum word length for exhaustive suites.
        #[arg(long)]
        max_len: Option<usize>,
        /// Number of randomized instances.
        #[arg(long)]
        instances: Option<usize>,
        /// Seed for randomized suites.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct WordInput {
    /// The word itself; "-" or omitted reads standard input.
    word: Option<String>,
    /// Read the word from a file instead.
    #[arg(long, conflicts_with = "word")]
    file: Option<PathBuf>,
    /// Alphabet size.
    #[arg(long, default_value_t = 2)]
    alphabet: usize,
}

impl WordInput {
    fn text(&self) -> Result<String, CliError> {
        if let Some(path) = &self.file {
            return Ok(fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?);
        }
        match self.word.as_deref() {
            Some("-") | None => {
                let mut buf = String::new();
                std::io::stdin().read_to_string(&mut buf)?;
                Ok(buf)
            }
            Some(w) => Ok(w.to_string()),
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            horizon,
            trajectory_csv,
            summary_json,
        } => {
            let mut config = ExperimentConfig::from_file(&config)?;
            if let Some(n) = horizon {
                config.horizon = n;
            }
            if trajectory_csv.is_some() {
                config.trajectory_csv = trajectory_csv;
            }
            if summary_json.is_some() {
                config.summary_json = summary_json;
            }
            let summary = cmd_simulate(&config, seed)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(true)
        }
        Command::Parse(input) => {
            let report = cmd_parse(&input.text()?, Alphabet::new(input.alphabet)?)?;
            println!("{}", report.decomposition);
            println!("c = {}", report.complexity);
            println!("|V| = {}", report.candidate_set_size);
            Ok(true)
        }
        Command::Analyze {
            input,
            reference,
            kernel,
            context_len,
        } => {
            let reference = reference
                .map(|text| -> Result<Vec<f64>, CliError> {
                    text.split(',')
                        .map(|t| t.trim().parse::<f64>().map_err(|e| e.into()))
                        .collect()
                })
                .transpose()?;
            let report = cmd_analyze(
                &input.text()?,
                Alphabet::new(input.alphabet)?,
                reference,
                kernel.as_deref(),
                context_len,
            )?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(true)
        }
        Command::Verify {
            suite,
            max_len,
            instances,
            seed,
        } => {
            let options = VerifyOptions {
                max_len,
                instances,
                seed,
            };
            let names: Vec<&str> = if suite == "all" {
                SUITE_NAMES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut all_passed = true;
            for name in names {
                let report = run_suite(name, options)?;
                all_passed &= report.passed;
                println!("{}", serde_json::to_string(&report)?);
            }
            Ok(all_passed)
        }
    }
}

//! `miml`: run configured experiments, print dataset statistics and write
//! fold files.
//!
//! Exit codes: 0 success, 1 usage, 2 configuration, 3 data, 4 runtime.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use miml_core::data::{labels_xml_string, parse_dataset, to_arff_string, DataError};
use miml_core::experiment::{run_config_file, ExperimentError, RunOptions};
use miml_core::partition::{materialize_folds, partition, PartitionError, Strategy};
use miml_core::stats::compute_stats;
use miml_core::Execution;

#[derive(Debug, Parser)]
#[command(name = "miml", version, about = "Multi-instance multi-label experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a configuration file.
    Run {
        /// Configuration file.
        #[arg(short = 'c', long = "config")]
        config: PathBuf,
        /// Disable multi-threading.
        #[arg(long)]
        sequential: bool,
        /// Replace an existing report file.
        #[arg(long)]
        overwrite: bool,
    },
    /// Print dataset statistics as key=value lines.
    Stats { arff: PathBuf, xml: PathBuf },
    /// Write train/test ARFF and label files for every fold.
    Partition {
        arff: PathBuf,
        xml: PathBuf,
        /// random, powerset or iterative.
        #[arg(long, default_value = "iterative", value_parser = parse_strategy)]
        strategy: Strategy,
        /// Number of folds.
        #[arg(short, long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory, created if needed.
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let code = match e {
            ExperimentError::Config(_) => 2,
            ExperimentError::Data(_) => 3,
            ExperimentError::Eval(_) | ExperimentError::Report(_) => 4,
        };
        Failure::new(code, e)
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        Failure::new(3, format!("data: {e}"))
    }
}

impl From<PartitionError> for Failure {
    fn from(e: PartitionError) -> Self {
        match e {
            PartitionError::Data(e) => e.into(),
            e @ PartitionError::InvalidK { .. } => Failure::new(1, format!("partition: {e}")),
            e => Failure::new(4, format!("partition: {e}")),
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(4, format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            config,
            sequential,
            overwrite,
        } => {
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let outcome = run_config_file(&config, RunOptions { exec, overwrite })?;
            println!("{}", outcome.report_path.display());
        }
        Command::Stats { arff, xml } => {
            let ds = parse_dataset(&arff, &xml)?;
            print!("{}", compute_stats(&ds).to_key_value());
        }
        Command::Partition {
            arff,
            xml,
            strategy,
            k,
            seed,
            out,
        } => {
            let ds = parse_dataset(&arff, &xml)?;
            let fa = partition(&ds, strategy, k, seed)?;
            fs::create_dir_all(&out).map_err(|e| Failure::new(4, format!("{}: {e}", out.display())))?;
            let stem = arff.file_stem().map_or("data".into(), |s| s.to_string_lossy());
            let labels = labels_xml_string(ds.labels().names());
            for fold in 0..k {
                let (train, test) = materialize_folds(&ds, &fa, fold)?;
                for (part, set) in [("train", &train), ("test", &test)] {
                    let base = out.join(format!("{stem}_fold{}_{part}", fold + 1));
                    write_file(&base.with_extension("arff"), &to_arff_string(set))?;
                    write_file(&base.with_extension("xml"), &labels)?;
                }
            }
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("miml: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

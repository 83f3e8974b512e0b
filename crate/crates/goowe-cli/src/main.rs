//! `goowe` command line: generate streams, run experiments, compare suites,
//! and compute comparison statistics.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 data error,
//! 3 partial suite failure.

mod commands;
mod descriptor;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use descriptor::{EnsembleSection, EvalSection, RunDescriptor, StreamSection};

#[derive(Parser)]
#[command(
    name = "goowe",
    version,
    about = "Streaming ensemble classification workbench"
)]
struct Cli {
    /// Output directory (default: $GOOWE_OUT_DIR or ./goowe-out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic stream to CSV with a JSON schema sidecar.
    Generate {
        /// Stream spec, e.g. "sea:noise=0.1" or "rbf:classes=10,drift=0.01".
        #[arg(long)]
        stream: String,
        /// Number of instances to write.
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one ensemble over one stream (interleaved test-then-train).
    Run {
        /// TOML run descriptor; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Ensemble spec, e.g. "goowe:m=10" or "base1:rule=mv".
        #[arg(long)]
        algo: Option<String>,
        /// Stream spec (synthetic generator).
        #[arg(long)]
        stream: Option<String>,
        /// Data file (.arff, or headerless CSV with a schema sidecar).
        #[arg(long)]
        data: Option<PathBuf>,
        /// Schema sidecar path for CSV data files.
        #[arg(long)]
        schema: Option<PathBuf>,
        /// Instance cap (required for synthetic streams).
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Trace record interval in instances.
        #[arg(long)]
        report_every: Option<usize>,
        /// Run label used in output file names.
        #[arg(long)]
        name: Option<String>,
    },
    /// Run an ensembles x streams x seeds suite and emit result matrices.
    Compare {
        /// TOML suite descriptor.
        #[arg(long)]
        suite: PathBuf,
        /// Skip runs whose outputs already exist with a matching config hash.
        #[arg(long)]
        resume: bool,
        /// Worker threads (default: cores - 1).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Statistics over a result-matrix CSV.
    Stats {
        #[command(subcommand)]
        test: StatsCommand,
    },
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Friedman test with average ranks over algorithms x datasets.
    Friedman {
        #[arg(long)]
        matrix: PathBuf,
        /// Treat lower values as better (e.g. time or memory matrices).
        #[arg(long)]
        lower_is_better: bool,
    },
    /// Wilcoxon signed-rank test between two algorithm columns.
    Wilcoxon {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("GOOWE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("goowe-out"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own message (including --help/--version).
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let out = out_dir(cli.out_dir);
    match dispatch(cli.command, &out) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

fn classify(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<goowe::Error>() {
        Some(goowe::Error::Config(_)) | Some(goowe::Error::NoComponents) => 1,
        Some(_) => 2,
        // anyhow-level errors come from spec/descriptor validation (usage)
        // unless they wrap I/O.
        None => {
            if err.downcast_ref::<std::io::Error>().is_some() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(command: Command, out: &std::path::Path) -> Result<ExitCode> {
    match command {
        Command::Generate {
            stream,
            count,
            seed,
            out: path,
        } => {
            commands::generate(&stream, count, seed, &path)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            config,
            algo,
            stream,
            data,
            schema,
            count,
            seed,
            report_every,
            name,
        } => {
            let mut desc = match config {
                Some(path) => RunDescriptor::from_toml_path(&path)?,
                None => RunDescriptor {
                    name: None,
                    ensemble: EnsembleSection {
                        spec: "goowe".into(),
                    },
                    stream: StreamSection {
                        spec: None,
                        path: None,
                        schema: None,
                        seed: 1,
                        count: None,
                    },
                    eval: EvalSection::default(),
                },
            };
            if let Some(algo) = algo {
                desc.ensemble.spec = algo;
            }
            if let Some(stream) = stream {
                desc.stream.spec = Some(stream);
                desc.stream.path = None;
            }
            if let Some(data) = data {
                desc.stream.path = Some(data);
                desc.stream.spec = None;
            }
            if let Some(schema) = schema {
                desc.stream.schema = Some(schema);
            }
            if let Some(count) = count {
                desc.stream.count = Some(count);
            }
            if let Some(seed) = seed {
                desc.stream.seed = seed;
            }
            if let Some(interval) = report_every {
                desc.eval.report_every = interval;
            }
            if let Some(name) = name {
                desc.name = Some(name);
            }
            let summary = commands::run(&desc, out)?;
            println!(
                "{} on {} (seed {}): accuracy {:.3}% over {} instances, \
                 {:.2} cs/1k, max {:.3} MB [config {}]",
                summary.ensemble,
                summary.stream,
                summary.seed,
                summary.aggregate_accuracy_pct,
                summary.instances,
                summary.time_cs_per_1k,
                summary.max_memory_mb,
                summary.config_hash
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            suite,
            resume,
            threads,
        } => {
            let suite = descriptor::SuiteDescriptor::from_toml_path(&suite)?;
            let all_ok = commands::compare(&suite, out, resume, threads)?;
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Stats { test } => {
            match test {
                StatsCommand::Friedman {
                    matrix,
                    lower_is_better,
                } => commands::stats_friedman(&matrix, lower_is_better)?,
                StatsCommand::Wilcoxon {
                    matrix,
                    first,
                    second,
                } => commands::stats_wilcoxon(&matrix, &first, &second)?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

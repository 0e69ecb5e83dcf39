//! `ptloc`: build point-location indexes, query them, and benchmark them
//! against a brute-force oracle.
//!
//! Exit status is 0 on success, 1 on bad input (unreadable or malformed
//! files, invalid subdivisions, corrupt indexes) and 2 when a benchmark
//! finds a disagreement with the oracle.

mod bench;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ptloc", version, about = "Word-parallel planar point location")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WordBits {
    #[value(name = "64")]
    W64,
    #[value(name = "128")]
    W128,
}

#[derive(Args)]
struct WordArg {
    /// Register width for packed edge coefficients.
    #[arg(long, value_enum, default_value = "64")]
    word_bits: WordBits,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a subdivision file.
    Build {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        word: WordArg,
    },
    /// Locate one point or a file of points.
    #[command(allow_negative_numbers = true)]
    Locate {
        index: PathBuf,
        #[arg(requires = "y", conflicts_with = "queries")]
        x: Option<f64>,
        y: Option<f64>,
        /// File with one `x y` pair per line.
        #[arg(long, required_unless_present = "x")]
        queries: Option<PathBuf>,
        /// Report the first packed candidate without exact confirmation.
        #[arg(long)]
        no_fallback: bool,
    },
    /// Random subdivisions checked query by query against the oracle.
    Bench {
        /// Vertex counts, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "16,1024")]
        sizes: Vec<usize>,
        /// Queries per size.
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        word: WordArg,
        #[arg(long)]
        no_fallback: bool,
        /// Measure queries per second; reports are then no longer
        /// reproducible byte for byte.
        #[arg(long)]
        timing: bool,
    },
    /// Write a seeded random subdivision in the text format.
    Generate {
        vertices: usize,
        output: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// A failure and the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Verification(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) | Failure::Verification(m) => f.write_str(m),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Build { input, output, word } => {
            commands::build(&input, &output, word.word_bits == WordBits::W128, &mut out)
        }
        Command::Locate {
            index,
            x,
            y,
            queries,
            no_fallback,
        } => {
            let points = match (x, y, queries) {
                (Some(x), Some(y), _) => commands::Queries::Single(x, y),
                (_, _, Some(path)) => commands::Queries::File(path),
                _ => return Err(Failure::Input("give either `x y` or --queries".into())),
            };
            commands::locate(&index, points, no_fallback, &mut out)
        }
        Command::Bench {
            sizes,
            queries,
            seed,
            word,
            no_fallback,
            timing,
        } => {
            let opts = bench::Options {
                sizes,
                queries,
                seed,
                no_fallback,
                timing,
            };
            if word.word_bits == WordBits::W128 {
                bench::run::<u128>(&opts, &mut out)
            } else {
                bench::run::<u64>(&opts, &mut out)
            }
        }
        Command::Generate { vertices, output, seed } => commands::generate(vertices, &output, seed),
    }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ptloc: {f}");
            ExitCode::from(f.code())
        }
    }
}

//! `cyclolog` command-line front end.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Failure, Outcome};

#[derive(Debug, Parser)]
#[command(name = "cyclolog", version, about = "Certified evaluation of L(1, f) and log-sine relations")]
struct Cli {
    /// Target precision in bits.
    #[arg(long, global = true, env = "CYCLOLOG_PREC", default_value_t = 128,
          value_parser = clap::value_parser!(u32).range(64..=4096))]
    prec: u32,

    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Json)]
    output: OutputMode,

    /// Worker threads for `scan` (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Append-only JSONL file that `scan` records into.
    #[arg(long, global = true, default_value = "./cyclolog-scans.jsonl")]
    store: PathBuf,

    /// Do not read or write the scan store.
    #[arg(long, global = true)]
    no_store: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// L(1, f) for a periodic f given by its values f(1), ..., f(q).
    Lseries {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value = "digamma")]
        route: String,
    },
    /// Coefficients of L(1, f) over pi, log(2 sin kπ/q) and log 2.
    Decompose {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// Constructed log-sine relations mod q, each verified numerically.
    Relations {
        #[arg(long)]
        q: u64,
    },
    /// Direct and factored determinant of the log-sine matrix mod a prime.
    Dedekind {
        #[arg(long)]
        p: u64,
    },
    /// Nonvanishing certificate for every factor of the determinant.
    Certificate {
        #[arg(long)]
        p: u64,
    },
    /// L(1, f) for every ±1 function mod q with f(q) = 0 and zero sum.
    Scan {
        #[arg(long)]
        q: u64,
    },
    /// Which alternative holds for f mod a prime: L ≠ 0 or all trig sums vanish.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
    /// The vanishing kernel functions f_l mod q.
    Bbw {
        #[arg(long)]
        q: u64,
        /// One odd l; default is every valid l.
        #[arg(long)]
        l: Option<u64>,
    },
    /// Lattice search for an integer relation on the log basis mod q.
    Intrel {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 10_000)]
        bound: u64,
    },
    /// Rank of the integer relation lattice mod q, found by repeated search.
    Rank {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
    },
    /// Dirichlet characters mod q.
    Characters {
        #[arg(long)]
        q: u64,
        /// Even characters only.
        #[arg(long)]
        even: bool,
    },
}

pub struct Config {
    pub prec: u32,
    pub threads: Option<usize>,
    pub store: Option<PathBuf>,
}

fn emit(outcome: &Outcome, mode: OutputMode) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match mode {
        OutputMode::Json => {
            for line in &outcome.json {
                writeln!(out, "{}", serde_json::to_string(line).expect("JSON values serialize"))?;
            }
        }
        OutputMode::Text => out.write_all(outcome.text.as_bytes())?,
    }
    out.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let cfg = Config { prec: cli.prec, threads: cli.threads, store: if cli.no_store { None } else { Some(cli.store) } };
    match commands::run(&cli.command, &cfg) {
        Ok(outcome) => {
            if let Some(note) = &outcome.note {
                eprintln!("{note}");
            }
            if let Err(e) = emit(&outcome, cli.output) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(outcome.code)
        }
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

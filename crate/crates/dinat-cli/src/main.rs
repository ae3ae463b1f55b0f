use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dinat::cli::commands::{cmd_check, cmd_corpus, cmd_eval, cmd_verify, Options, EXIT_IO, EXIT_USAGE};
use dinat::finsem::max_set_size;
use dinat::par::Exec;

#[derive(Parser)]
#[command(name = "dinat", version, about = "Checks and evaluates directed type theory derivations")]
struct Cli {
    /// Emit line-delimited JSON records.
    #[arg(long, global = true)]
    json: bool,
    /// Process (entry, model) pairs on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every derivation of a file.
    Check { file: PathBuf },
    /// Print the function tables of a file's derivations on one model.
    Eval {
        file: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Restrict to one context point, given as object names.
        #[arg(long, value_delimiter = ',')]
        at: Option<Vec<String>>,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Run round trips, obligations and enumeration comparisons.
    Verify {
        file: PathBuf,
        /// Directory of model files; the built-in suite when omitted.
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        max_size: Option<usize>,
        /// Also search random models for a composition failure.
        #[arg(long)]
        seed: Option<u64>,
        /// Include the properties that enumerate all dinaturals.
        #[arg(long)]
        enumerate: bool,
    },
    /// Run the shipped corpus on the model suite.
    Corpus {
        /// Extra model files to include.
        #[arg(long)]
        models: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let opts = |max: Option<usize>| Options { json: cli.json, exec, max_size: max.unwrap_or_else(max_set_size) };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let res = match &cli.command {
        Command::Check { file } => cmd_check(file, &opts(None), &mut out),
        Command::Eval { file, model, at, max_size } => cmd_eval(file, model, at.as_deref(), &opts(*max_size), &mut out),
        Command::Verify { file, models, max_size, seed, enumerate } => {
            cmd_verify(file, models.as_deref(), *seed, *enumerate, &opts(*max_size), &mut out)
        }
        Command::Corpus { models } => cmd_corpus(models.as_deref(), &opts(None), &mut out),
    };
    let code = match res.and_then(|c| out.flush().map(|_| c)) {
        Ok(c) => c,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_IO
        }
    };
    ExitCode::from(code as u8)
}

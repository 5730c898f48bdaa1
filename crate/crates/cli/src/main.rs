//! `pronil`: command-line driver for the verification suites and the witness
//! constructor. Reports are JSON; exit codes are 0 (all checks pass), 1 (a
//! mathematical check failed), 2 (usage error), 3 (resource or I/O error).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{CliError, Outcome};

#[derive(Parser, Debug)]
#[command(
    name = "pronil",
    version,
    about = "Exact checks in free nilpotent and lamplighter groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Truncation weight K.
    #[arg(short = 'K', long = "weight", global = true)]
    weight: Option<usize>,

    /// Coefficient ring: Z, Q or Zp:<p> (p an odd prime).
    #[arg(long, global = true)]
    ring: Option<String>,

    /// Integer sequence, e.g. "1,0,1,1".
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<String>,

    /// Also write the JSON report (for `construct`, the witness) to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Print the JSON report on stdout instead of a summary.
    #[arg(long, global = true)]
    json: bool,

    /// Extra diagnostics on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Lie-ring identities for n = 1..=max-n and their group-level corollary.
    Identities {
        #[arg(long, default_value_t = 3)]
        max_n: usize,
    },
    /// Build and verify the witness pair for --q at weight K.
    Construct,
    /// Re-verify a witness file.
    Verify { input: PathBuf },
    /// Image of a group word in the completed lamplighter group.
    Phi { word: String },
    /// Coinvariant space and theta classes. Inputs are `q=1,0,1` (the series
    /// of that witness) or `f=0,0,1/2,...` (explicit coefficients); without
    /// inputs, every 0/1 sequence of length min(3, (K-1)/2) is used.
    Coinv {
        inputs: Vec<String>,
        /// Extra acting exponents r (t^r acts as (1+x)^r), e.g. 1/2.
        #[arg(long = "act", allow_hyphen_values = true)]
        act: Vec<String>,
    },
    /// Exactness tester on the built-in involutive-field instances.
    Lemma23 {
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Witness, its series f_q, the lamplighter image and theta classes, in one report.
    Report,
}

/// Everything a subcommand needs, with defaults not yet applied.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub weight: Option<usize>,
    pub ring: Option<String>,
    pub q: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub json: bool,
    pub verbose: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = RunConfig {
        command: cli.command,
        weight: cli.weight,
        ring: cli.ring,
        q: cli.q,
        out: cli.out,
        seed: cli.seed,
        json: cli.json,
        verbose: cli.verbose,
    };
    let start = Instant::now();
    let result = commands::run(&cfg);
    eprintln!("runtime: {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(Outcome { passed, .. }) if passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Math(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Resource(_) | CliError::Io(_) => 3,
        }
    }
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use opaque::commands::{self, CheckArgs, CompleteArgs, Format, ReduceArgs, SearchArgs, VerifyArgs};
use opaque::propositions::Options;
use opaque_core::order::DEFAULT_GUARD;

#[derive(Parser)]
#[command(name = "opaque", version, about = "Exact checks of dominance and Pareto principles over incomparable lives")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Largest carrier the completion enumerator accepts.
    #[arg(long, global = true)]
    guard: Option<usize>,
    /// Seed for the random lottery pairs of `prop4`.
    #[arg(long, default_value_t = opaque::prop4::DEFAULT_SEED, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rebuild the canonical constructions and check every expected verdict.
    VerifyPropositions {
        /// prop1 prop2 table3 prop3 prop4 table6 hare cycle supervaluation
        selectors: Vec<String>,
        #[arg(long)]
        all: bool,
        /// Truncation depth of the table6 construction.
        #[arg(long, default_value_t = opaque_core::constructions::canonical::TABLE6_DEFAULT_K)]
        k: u32,
        /// Number of random lottery pairs for prop4.
        #[arg(long, default_value_t = opaque::prop4::RANDOM_PAIRS)]
        pairs: usize,
        /// Write every instance as a model file into this directory.
        #[arg(long)]
        emit_model: Option<PathBuf>,
    },
    /// Run axioms and claims against a model file.
    Check {
        model: PathBuf,
        claims: Option<PathBuf>,
        /// Exit 1 if any certificate is Violated.
        #[arg(long)]
        expect_holds: bool,
    },
    /// Reduce a pair of lotteries to a pair of outcomes.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        left: Option<String>,
        #[arg(long)]
        right: Option<String>,
        /// Substitution provider; only `relocation` is built in.
        #[arg(long)]
        provider: Option<String>,
    },
    /// Enumerate the complete extensions of an order, one JSON object per line.
    Complete {
        file: PathBuf,
        /// Require Pareto-better pairs to be ranked better.
        #[arg(long)]
        pareto: bool,
        /// Also complete the personal order, one pass per completion.
        #[arg(long)]
        joint: bool,
        /// Forbid new ties.
        #[arg(long)]
        linear: bool,
        /// Restrict to the supports of these lotteries or gambles.
        #[arg(long, value_delimiter = ',')]
        support: Vec<String>,
        /// Allow carriers up to the hard ceiling.
        #[arg(long)]
        force: bool,
    },
    /// Search small models for orders satisfying a set of axioms.
    Search {
        spec: PathBuf,
        /// Print per-axiom elimination counts.
        #[arg(long)]
        tally: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::VerifyPropositions { selectors, all, k, pairs, emit_model } => {
            let options = Options { k, seed: cli.seed, pairs, guard: cli.guard.unwrap_or(DEFAULT_GUARD) };
            commands::verify_propositions(&VerifyArgs { selectors, all, options, emit_model }, cli.format, &mut out)
        }
        Command::Check { model, claims, expect_holds } => {
            commands::check(&CheckArgs { model, claims, expect_holds }, cli.format, &mut out)
        }
        Command::Reduce { file, left, right, provider } => {
            commands::reduce(&ReduceArgs { file, left, right, provider }, cli.format, &mut out)
        }
        Command::Complete { file, pareto, joint, linear, support, force } => {
            let args = CompleteArgs { file, pareto, joint, linear, support, guard: cli.guard.unwrap_or(DEFAULT_GUARD), force };
            commands::complete(&args, cli.format, &mut out)
        }
        Command::Search { spec, tally } => {
            commands::search(&SearchArgs { file: spec, tally, guard: cli.guard }, cli.format, &mut out)
        }
    };
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

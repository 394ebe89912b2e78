mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Workbench for the meet-implication fragment of intuitionistic logic.
#[derive(Parser, Debug)]
#[command(name = "meetimp", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Point budget for universal-model constructions.
    #[arg(long, global = true, default_value_t = 200_000)]
    pub max_points: usize,
    /// Largest formula size explored by formula extraction.
    #[arg(long, global = true, default_value_t = 41)]
    pub max_formula_size: u64,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 2024)]
    pub seed: u64,
    /// Print only machine-readable lines.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a formula and classify its connectives.
    Parse { formula: String },
    /// Evaluate a formula on a model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Build the depth-bounded part of the universal model.
    Universal {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: usize,
        #[command(flatten)]
        export: Export,
    },
    /// Build the universal model of the meet-implication fragment.
    MeetimpUniversal {
        #[arg(short)]
        n: usize,
        #[command(flatten)]
        export: Export,
    },
    /// Describe the free implicative meet-semilattice on n generators.
    Free {
        #[arg(short)]
        n: usize,
        /// List every element with a defining formula.
        #[arg(long)]
        table: bool,
    },
    /// De Jongh formulas of the points of a universal truncation.
    Dejongh {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: usize,
        /// Only this store id.
        #[arg(long)]
        point: Option<u32>,
    },
    /// Translate a formula into the free implicative meet-semilattice.
    STranslate {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        formula: String,
    },
    /// Decide whether an up-set is meet-implication definable.
    Definable {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated point ids.
        #[arg(long, allow_hyphen_values = true)]
        upset: String,
    },
    /// Least meet-implication definable up-set containing an up-set.
    Closure {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        upset: String,
    },
    /// All meet-implication definable up-sets of a model.
    Family {
        #[arg(long)]
        model: PathBuf,
    },
    /// A meet-implication formula defining an up-set.
    Witness {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        upset: String,
    },
    /// The double-negation example on the one-variable universal model.
    RnReport {
        #[arg(short)]
        d: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Subframe colouring, verification flags and subframe formula of a frame.
    Subframe {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, default_value = "combined")]
        variant: String,
        #[arg(long)]
        emit_formula: bool,
        /// A model to test for refutation.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Dual poset of the up-set lattice of a frame, or of the free algebra.
    Dualize {
        #[arg(long, conflicts_with = "free", required_unless_present = "free")]
        frame: Option<PathBuf>,
        /// Use the free algebra on this many generators instead.
        #[arg(long)]
        free: Option<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Count the up-sets of a frame exactly.
    CountUpsets {
        #[arg(long, conflicts_with = "meetimp", required_unless_present = "meetimp")]
        frame: Option<PathBuf>,
        /// Count the up-sets of U(n)∧,→ instead.
        #[arg(long)]
        meetimp: Option<usize>,
    },
    /// Run the seeded property suite.
    Selftest {
        #[arg(long, default_value_t = 500)]
        models: usize,
        #[arg(long, default_value_t = 3)]
        max_vars: usize,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct Export {
    /// Write a DOT drawing.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Write the model as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cliffseed::pauli::{load_hamiltonian, Hamiltonian};
use cliffseed::Error;

mod commands;

/// Clifford-space initialization search for variational circuits.
#[derive(Debug, Parser)]
#[command(name = "cliffseed", version, about)]
struct Cli {
    /// Worker threads for evaluation (1 gives bit-reproducible runs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search the quarter-turn (or eighth-turn with --k) angle space.
    Search(SearchArgs),
    /// Per-term expectations of an assignment, optionally beside HF and exact.
    Terms(TermsArgs),
    /// Exact, HF and Clifford-search energies for one or more Hamiltonians.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Bo,
    Random,
    Exhaustive,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Bo => "bo",
            Strategy::Random => "random",
            Strategy::Exhaustive => "exhaustive",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SearchOpts {
    /// Ansatz repetitions (entangling layers).
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, value_enum, default_value_t = Strategy::Bo)]
    pub strategy: Strategy,
    /// Total evaluations [default: min(2000, space size)].
    #[arg(long)]
    pub budget: Option<usize>,
    /// Random warmup evaluations [default: min(1000, space/4, budget)].
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Surrogate candidate pool per iteration.
    #[arg(long, default_value_t = 500)]
    pub pool: usize,
    /// Trees in the random-forest surrogate.
    #[arg(long, default_value_t = 20)]
    pub trees: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Allow up to K odd eighth-turn (T-like) slots.
    #[arg(long)]
    pub k: Option<usize>,
    /// Override the weight of every constraint in the Hamiltonian file.
    #[arg(long)]
    pub constraint_weight: Option<f64>,
    /// Comma-separated slot indices to search; the rest stay at 0.
    #[arg(long, value_delimiter = ',')]
    pub active_slots: Option<Vec<usize>>,
    /// Stop after WINDOW guided evaluations without improvement beyond TOL.
    #[arg(long, value_names = ["WINDOW", "TOL"], num_args = 2)]
    pub stagnation: Option<Vec<String>>,
    /// Largest space the exhaustive strategy may enumerate.
    #[arg(long, default_value_t = 1 << 20)]
    pub cap: u128,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    ham: PathBuf,
    #[command(flatten)]
    opts: SearchOpts,
    /// Directory for trace.csv, trace.json and best_assignment.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TermsArgs {
    #[arg(long)]
    ham: PathBuf,
    /// JSON array of quarter-turn indices, one per template slot.
    #[arg(long)]
    assignment: PathBuf,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Add the best-basis-state column.
    #[arg(long)]
    hf: bool,
    /// Add the exact ground-state column.
    #[arg(long)]
    exact: bool,
    /// Output CSV file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// One or more Hamiltonian files.
    #[arg(long, num_args = 1.., required = true)]
    ham: Vec<PathBuf>,
    #[command(flatten)]
    opts: SearchOpts,
    /// Output CSV file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad files, schemas or arguments (exit 2).
    Input(String),
    /// Failures while searching or solving (exit 3).
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::BadLength { .. }
            | Error::BadChar(_)
            | Error::SchemaError(_)
            | Error::InconsistentQubitCount(_)
            | Error::NonFiniteCoefficient(_)
            | Error::QubitOutOfRange { .. }
            | Error::LengthMismatch { .. }
            | Error::IndexOutOfAlphabet { .. }
            | Error::OddBudgetExceeded { .. }
            | Error::SizeMismatch { .. }
            | Error::InvalidConfig(_) => CliError::Input(msg),
            _ => CliError::Runtime(msg),
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_hamiltonian(path: &Path) -> Result<Hamiltonian, CliError> {
    load_hamiltonian(&read_file(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let threads = cli.threads.unwrap_or_else(rayon::current_num_threads);
    let result = match cli.command {
        Command::Search(a) => commands::search(&a.ham, &a.opts, a.out.as_deref(), threads),
        Command::Terms(a) => commands::terms(&a.ham, &a.assignment, a.reps, a.hf, a.exact, a.out.as_deref()),
        Command::Compare(a) => commands::compare(&a.ham, &a.opts, a.out.as_deref(), threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Input(msg) | CliError::Runtime(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}

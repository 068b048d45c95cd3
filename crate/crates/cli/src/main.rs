mod fail;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fail::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "tamefill",
    version,
    about = "Fillings, combings and tame filling functions of finitely presented groups"
)]
pub struct Cli {
    #[command(flatten)]
    pub source: Source,

    /// Step and node budget for rewriting and unfolding.
    #[arg(long, global = true, env = "TAMEFILL_BUDGET", value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,

    /// Directory for exported artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
#[group(multiple = false)]
pub struct Source {
    /// Built-in group (F1 F2 Z2 Z3 Z5 S3 BS12 F).
    #[arg(long, global = true)]
    pub preset: Option<String>,

    /// Presentation file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normal form of a word.
    Nf {
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        word: Vec<String>,
    },
    /// String growth complexity γ(n), or γ_p(n) with --prefix.
    Gamma {
        n: usize,
        #[arg(long)]
        prefix: bool,
    },
    /// Enumerate the Cayley ball of radius N.
    Ball {
        n: usize,
        #[arg(long, value_enum, default_value_t = BallFormat::Summary)]
        format: BallFormat,
    },
    /// Almost convexity at every level 1..=N with constant K.
    AcCheck { n: usize, k: usize },
    /// Build or verify a flow function.
    Flow {
        #[arg(value_enum)]
        action: FlowAction,
        #[arg(value_enum)]
        kind: FlowChoice,
        #[arg(long, default_value_t = 5)]
        radius: usize,
        /// Path length bound for the almost convex flow.
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Build the N-diagram of an edge or the filling of a word.
    Diagram {
        /// Read TOKENS as a source normal form followed by one letter.
        #[arg(long)]
        edge: bool,
        #[arg(required = true, num_args = 1..)]
        tokens: Vec<String>,
        #[arg(long, value_enum, default_value_t = FlowChoice::Rewriting)]
        flow: FlowChoice,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, value_enum, default_value_t = DiagramFormat::Summary)]
        format: DiagramFormat,
    },
    /// Measure a tame filling function over a word sample, as CSV.
    Tameness {
        #[arg(value_enum)]
        kind: Kind,
        /// File with one word per line.
        #[arg(long, conflicts_with = "all_to", required_unless_present = "all_to")]
        words: Option<PathBuf>,
        /// Every freely reduced identity word up to this length.
        #[arg(long)]
        all_to: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Inclusive)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = FlowChoice::Rewriting)]
        flow: FlowChoice,
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// κ, μ, k_r′ and growth-bound tables up to N, as CSV.
    Bounds {
        n: usize,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Run the full acceptance suite.
    CheckAll,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BallFormat {
    Summary,
    Dot,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DiagramFormat {
    Summary,
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FlowAction {
    Verify,
    Build,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlowChoice {
    Rewriting,
    Ac,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Intrinsic,
    Extrinsic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Inclusive,
    Strict,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.report());
            ExitCode::from(f.code())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

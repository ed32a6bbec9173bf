use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "apo", version, about = "Compile probabilistic action theories to logic programs and SAT, and compare with the POMDP oracle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and check a theory; exit 2 on violations
    Validate(Common),
    /// Print the theory with every variable substituted
    Ground(Common),
    /// Print the np-program for a horizon
    Compile(Common),
    /// Print the normal program (probability and value rules removed)
    Normalize(Common),
    /// Print the completion as DIMACS with its atom map
    Sat(Common),
    /// Enumerate answer sets of a compiled theory or of an np-program file
    Solve {
        #[command(flatten)]
        common: Common,
        /// Solve the normal program instead
        #[arg(long)]
        normal: bool,
    },
    /// Best policy read from the answer sets
    Policy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Class::Plan)]
        class: Class,
    },
    /// Best policy by brute-force evaluation of the decision process
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Class::Plan)]
        class: Class,
    },
    /// Cross-check answer sets against the oracle; exit 4 on failure
    Check(Common),
    /// Cross-check random theories; exit 4 on failure
    Fuzz {
        #[command(flatten)]
        options: Options,
        /// Number of theories
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(Args, Debug)]
pub struct Common {
    /// Theory file (.apo); `solve` also accepts np-program files (.np, .lp)
    pub input: PathBuf,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    #[arg(long, short = 'n', default_value_t = 1)]
    pub horizon: usize,
    /// Overrides the theory's discount; the effective value is echoed
    #[arg(long)]
    pub discount: Option<String>,
    /// Disjunctive strategy for atoms without a directive
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<apo_core::nhplp::Strategy>,
    #[arg(long, value_enum, env = "APO_FORMAT", default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_strategy(s: &str) -> Result<apo_core::nhplp::Strategy, String> {
    s.parse()
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Plan,
    Stationary,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { commands::EXIT_INPUT } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Validate(c) => commands::validate(&c),
        Command::Ground(c) => commands::ground(&c),
        Command::Compile(c) => commands::compile(&c),
        Command::Normalize(c) => commands::normalize(&c),
        Command::Sat(c) => commands::sat(&c),
        Command::Solve { common, normal } => commands::solve(&common, normal),
        Command::Policy { common, class } => commands::policy(&common, class),
        Command::Oracle { common, class } => commands::oracle(&common, class),
        Command::Check(c) => commands::check(&c),
        Command::Fuzz { options, count } => commands::fuzz(&options, count),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}

//! `tropmod`: enumerate, build and verify tropical moduli from the command line.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or input error,
//! 3 search budget exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "tropmod", version, about = "Tropical moduli of curves as combinatorial cone stacks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Table,
}

#[derive(clap::Args, Clone, Debug)]
pub struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List stable graphs of type (g, n).
    Enumerate {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        markings: u32,
        #[arg(long)]
        maximal_only: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Dump the moduli stack, or its groupoid presentation.
    Stack {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        markings: u32,
        #[arg(long)]
        presentation: bool,
        #[command(flatten)]
        output: Output,
    },
    /// The universal curve over a tropical curve. `--out dot|json` selects the format.
    ConeOver {
        #[arg(long)]
        curve: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Forget a leg and report the section datum it defines.
    Forget {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        leg: Option<u32>,
        #[command(flatten)]
        output: Output,
    },
    /// Clutch two curves, or one curve to itself when `--right` is absent.
    Clutch {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: Option<PathBuf>,
        /// Length of the new edge as a covector, e.g. "[5]".
        #[arg(long)]
        length: String,
        /// Leg of the left curve (default: its largest label).
        #[arg(long)]
        star: Option<u32>,
        /// Leg of the right curve (default: its smallest label), or the second
        /// leg of the left curve when self-clutching.
        #[arg(long)]
        bullet: Option<u32>,
        #[command(flatten)]
        output: Output,
    },
    /// Dual tropical curve of a nodal degeneration.
    Tropicalize {
        #[arg(long)]
        degeneration: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run a verification and report each check.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// Sections, attach/forget, H and the fiber-product equivalence for a curve.
    Universal {
        #[arg(long)]
        curve: PathBuf,
        /// Leg distances are sampled up to this bound on every ray.
        #[arg(long, default_value_t = 3)]
        leg_bound: i64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Specialization and forgetful squares for a degeneration, plus an
    /// optional seeded random corpus.
    Squares {
        #[arg(long)]
        degeneration: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Category axioms of a stack, and whether it is a cone space / cone complex.
    Axioms {
        #[arg(long)]
        stack: PathBuf,
        /// Also fail unless the stack is a cone space.
        #[arg(long)]
        require_cone_space: bool,
        /// Also fail unless the stack is a cone complex.
        #[arg(long)]
        require_cone_complex: bool,
        #[command(flatten)]
        output: Output,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Enumerate { genus, markings, maximal_only, output } => commands::enumerate(genus, markings, maximal_only, &output),
        Command::Stack { genus, markings, presentation, output } => commands::stack(genus, markings, presentation, &output),
        Command::ConeOver { curve, output } => commands::cone_over(&curve, &output),
        Command::Forget { curve, leg, output } => commands::forget(&curve, leg, &output),
        Command::Clutch { left, right, length, star, bullet, output } => {
            commands::clutch(&left, right.as_deref(), &length, star, bullet, &output)
        }
        Command::Tropicalize { degeneration, output } => commands::tropicalize(&degeneration, &output),
        Command::Verify { target } => match target {
            VerifyTarget::Universal { curve, leg_bound, budget, output } => commands::verify_universal(&curve, leg_bound, budget, &output),
            VerifyTarget::Squares { degeneration, seed, count, output } => {
                commands::verify_squares(degeneration.as_deref(), seed, count, &output)
            }
            VerifyTarget::Axioms { stack, require_cone_space, require_cone_complex, output } => {
                commands::verify_axioms(&stack, require_cone_space, require_cone_complex, &output)
            }
        },
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

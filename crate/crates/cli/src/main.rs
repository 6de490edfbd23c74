//! `stefan` — classify, solve, verify and export traveling free-boundary
//! solutions of the two-phase melting/evaporation problem.
//!
//! Exit codes: 0 success, 2 parse/validation error, 3 no root found,
//! 4 unsupported flux case, 5 audit failure. The first stderr line of any
//! failure is machine-greppable: `error: <category>: <message>`.
//!
//! Logs go to standard error and are controlled by the `STEFAN_LOG`
//! environment variable; data goes to files or standard output only.

mod commands;
mod problem;
mod report;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use stefan_core::solver::SolveMethod;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub category: &'static str,
    pub message: String,
}

impl CliError {
    pub fn parse(message: String) -> Self {
        Self {
            code: 2,
            category: "parse",
            message,
        }
    }

    pub fn no_root(message: String) -> Self {
        Self {
            code: 3,
            category: "no-root",
            message,
        }
    }

    pub fn unsupported(message: String) -> Self {
        Self {
            code: 4,
            category: "unsupported",
            message,
        }
    }

    pub fn audit_failure(message: String) -> Self {
        Self {
            code: 5,
            category: "audit-failure",
            message,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "stefan",
    version,
    about = "Traveling free-boundary solutions of a two-phase melting/evaporation problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    ClosedForm,
    Shooting,
}

impl From<MethodArg> for SolveMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => SolveMethod::Auto,
            MethodArg::ClosedForm => SolveMethod::ClosedForm,
            MethodArg::Shooting => SolveMethod::Shooting,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WhatArg {
    Surfaces,
    FieldSlice,
}

#[derive(Subcommand)]
enum Command {
    /// Print the invariance classification of the flux and diffusivity pair.
    Classify { problem: PathBuf },
    /// Solve the reduced free-boundary problem and write profile/parameter files.
    Solve {
        problem: PathBuf,
        /// auto picks a closed form when the diffusivity family has one.
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Audit a solved problem against the governing equations.
    Verify {
        problem: PathBuf,
        /// Directory holding profiles.csv and solution.report (defaults to
        /// the problem's output directory).
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Stencil spacing override.
        #[arg(long)]
        grid: Option<f64>,
        /// 1 = one grid, 2 = add a halved grid and convergence orders.
        #[arg(long)]
        levels: Option<u8>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Export surface samples or a field slice for external plotting.
    Export {
        problem: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(long, value_enum)]
        what: WhatArg,
        /// Sample time.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        /// Plane spec for field-slice: axis=value[,half_extent[,n]].
        #[arg(long)]
        plane: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classify { problem } => commands::cmd_classify(&problem),
        Command::Solve {
            problem,
            method,
            out_dir,
        } => commands::cmd_solve(&problem, method.into(), &out_dir),
        Command::Verify {
            problem,
            solution,
            grid,
            levels,
            out_dir,
        } => {
            if let Some(l) = levels {
                if !(1..=2).contains(&l) {
                    return Err(CliError::parse(format!(
                        "--levels must be 1 or 2, got {l}"
                    )));
                }
            }
            commands::cmd_verify(&problem, &solution, grid, levels, &out_dir)
        }
        Command::Export {
            problem,
            solution,
            what,
            t,
            plane,
            out_dir,
        } => {
            let what = match what {
                WhatArg::Surfaces => commands::ExportWhat::Surfaces,
                WhatArg::FieldSlice => commands::ExportWhat::FieldSlice,
            };
            commands::cmd_export(&problem, &solution, what, t, &plane, &out_dir)
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("STEFAN_LOG", "warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!(
            "error: {}: {}",
            e.category,
            e.message.lines().next().unwrap_or("")
        );
        for line in e.message.lines().skip(1) {
            eprintln!("  {line}");
        }
        std::process::exit(e.code);
    }
}

//! Command-line front end: fan and bundle checks, orbital decompositions,
//! mixed volumes, resultant degrees and the trace inversion round trip.
//!
//! Exit status: 0 pass, 1 mathematical degeneracy, 2 input error, 3 numeric
//! failure.

mod commands;
mod render;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toricabel::{Error, ErrorClass};

#[derive(Parser, Debug)]
#[command(
    name = "toricabel",
    version,
    about = "Toric bundle combinatorics and trace inversion"
)]
struct Cli {
    /// Print the machine-readable report.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative backward error accepted for a root.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 1e-7)]
    cluster: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    singular: f64,
    /// Held-out residual accepted by the rational fits.
    #[arg(long, global = true, default_value_t = 1e-8)]
    fit_tol: f64,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// `P2`, `P1xP1`, `P1xP1xP1`, `Hirzebruch(a)`, JSON or a file.
    #[arg(long)]
    fan: String,
    /// `H`, `2H+H`, `(2,0)`, `[k_0,...]`, JSON or a file.
    #[arg(long)]
    bundle: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Smoothness, completeness and per-bundle predicates.
    Check(Input),
    /// The orbital decomposition table.
    Decompose(Input),
    /// Intersection numbers with orbit closures of dimension rank E.
    Mixvol {
        #[command(flatten)]
        input: Input,
        /// Cone such as `0.2`; all cones of the right dimension when omitted.
        #[arg(long)]
        tau: Option<String>,
    },
    /// Multidegree of the resultant of a cycle class.
    ResultantDegree {
        #[command(flatten)]
        input: Input,
        /// `τ:ν,...`, e.g. `0:1` or `0.1:2,1.2:1`; empty for the zero class.
        #[arg(long, default_value = "")]
        cycle: String,
    },
    /// Synthesize traces of a form along a curve and recover both.
    Invert {
        #[command(flatten)]
        input: Input,
        /// Curve as `{"coeffs": [[[e1,e2], re, im], ...]}` in chart coordinates.
        #[arg(long, conflicts_with = "random")]
        curve: Option<String>,
        /// Random curve with the support of this line bundle, e.g. `2` on P2
        /// or `2,1` on P1xP1.
        #[arg(long)]
        random: Option<String>,
        /// Form numerator in the curve format; random on the bundle's chart
        /// support by default.
        #[arg(long, conflicts_with_all = ["form_const", "form_zero"])]
        form: Option<String>,
        #[arg(long, conflicts_with = "form_zero")]
        form_const: bool,
        #[arg(long)]
        form_zero: bool,
        /// Index of the maximal cone whose chart is used.
        #[arg(long, default_value_t = 0)]
        chart: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Degenerate => 1,
        ErrorClass::Input => 2,
        ErrorClass::Numeric => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.status)
        }
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e}");
            if cli.json {
                print!("{}", render::error_report(&e, code));
            }
            ExitCode::from(code)
        }
    }
}

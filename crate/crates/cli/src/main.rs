//! `gencol`: big-O queries, law suites and generalized-function checks from
//! the command line.

mod cmd_bigo;
mod cmd_genfun;
mod cmd_laws;
mod report;
mod session;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gencol::index::IndexKind;

use report::Outcome;
use session::{CliError, FileConfig, Overrides, Session, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "gencol",
    version,
    about = "Generalized big-O and Colombeau generalized functions"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Index set: special, full, nsa-base or trivial.
    #[arg(long, global = true, value_parser = parse_kind)]
    index: Option<IndexKind>,
    /// Moment class A_q of the full instance.
    #[arg(long, global = true)]
    q: Option<u32>,
    /// First probe exponent k of the gauges 2^-k.
    #[arg(long, global = true)]
    kmin: Option<u32>,
    /// Last probe exponent.
    #[arg(long, global = true)]
    kmax: Option<u32>,
    /// Allowed gap between fitted and bookkept growth exponents.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the probe or counterexample table to this CSV file.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print one JSON record instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    /// TOML file with defaults for any of these flags.
    #[arg(long, global = true, value_name = "TOML")]
    config: Option<PathBuf>,
    /// Open domain of generalized functions, `(lo, hi)` or `R`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    domain: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide `LHS = O(RHS)` for symbolic nets in the gauge `u`.
    Bigo { lhs: String, rhs: String },
    /// Run the big-O law suite on random symbolic nets.
    Laws {
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Check the set-of-indices axioms on sampled points and classes.
    Validate {
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Queries on generalized functions.
    Genfun {
        #[command(subcommand)]
        query: Genfun,
    },
}

#[derive(Subcommand)]
enum Genfun {
    /// Growth orders N per compact set and derivative order.
    Moderate { u: String },
    /// Whether sup_K |u_eps| = O(u^m) for every probed m.
    Negligible { u: String },
    /// Whether [u] = [v] in the quotient.
    Equal { u: String, v: String },
    /// The generalized number u(x) at the generalized point x, a net in `u`.
    PointEval {
        u: String,
        x: String,
        /// Compact set `lo,hi` holding x_eps; inferred when omitted.
        #[arg(long, allow_hyphen_values = true)]
        k: Option<String>,
    },
    /// Whether u = 0, decided through its values at generalized points.
    ZeroTest { u: String },
}

fn parse_kind(s: &str) -> Result<IndexKind, String> {
    s.parse()
}

fn run(cli: Cli) -> Result<(Outcome, Session), CliError> {
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let g = cli.global;
    let mut flags = Overrides {
        index: g.index,
        q: g.q,
        kmin: g.kmin,
        kmax: g.kmax,
        tol: g.tol,
        csv: g.csv,
        seed: g.seed,
        json: g.json,
        domain: g.domain,
        ..Overrides::default()
    };
    match &cli.command {
        Command::Laws { trials } => flags.trials = *trials,
        Command::Validate { budget } => flags.budget = *budget,
        _ => {}
    }
    let session = Session::new(file, flags)?;
    let outcome = match &cli.command {
        Command::Bigo { lhs, rhs } => cmd_bigo::run(lhs, rhs, &session)?,
        Command::Laws { .. } => cmd_laws::laws(&session)?,
        Command::Validate { .. } => cmd_laws::validate(&session)?,
        Command::Genfun { query } => match query {
            Genfun::Moderate { u } => cmd_genfun::moderate(u, &session)?,
            Genfun::Negligible { u } => cmd_genfun::negligible(u, &session)?,
            Genfun::Equal { u, v } => cmd_genfun::equal(u, v, &session)?,
            Genfun::PointEval { u, x, k } => cmd_genfun::point_eval(u, x, k.as_deref(), &session)?,
            Genfun::ZeroTest { u } => cmd_genfun::zero_test(u, &session)?,
        },
    };
    Ok((outcome, session))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok((outcome, session)) => {
            if let (Some(path), Some(table)) = (&session.csv, &outcome.csv) {
                if let Err(e) = table.write_csv(path) {
                    eprintln!("error: {}", e.message());
                    return ExitCode::from(e.code() as u8);
                }
            }
            let mut stdout = std::io::stdout().lock();
            let _ = if session.json {
                writeln!(stdout, "{}", outcome.json)
            } else {
                write!(stdout, "{}", outcome.text)
            };
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code() as u8)
        }
    }
}

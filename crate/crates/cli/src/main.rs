//! `hyperval` command-line tool.
//!
//! Exit status: 0 success, 1 negative answer, 2 invalid input, 3 precision
//! refusal, 4 counterexample found, 5 budget exceeded.

mod commands;
mod expr;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperval::lifting::DEFAULT_BUDGET;
use hyperval::Error;
use serde_json::json;

use commands::{Outcome, Status, Suite};

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "hyperval",
    version,
    about = "p-adic fields, their valued hyperfields and homomorphism lifting"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Print one JSON record per result instead of the summary.
    #[arg(long, global = true)]
    records: bool,
    /// Cap on class evaluations during enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Field inspection.
    Field {
        #[command(subcommand)]
        cmd: FieldCmd,
    },
    /// Hyperfield arithmetic.
    Hf {
        #[command(subcommand)]
        cmd: HfCmd,
    },
    /// Enumerate homomorphisms H_n(K1) → H_m(K2).
    ///
    /// Takes `SPEC1 N SPEC2 M`, or `SPEC1 SPEC2` with --n and --m.
    Homs {
        #[arg(num_args = 2..=4, required = true)]
        args: Vec<String>,
        #[command(flatten)]
        nm: NM,
        /// Only homomorphisms fixing [p].
        #[arg(long)]
        over_p: bool,
    },
    /// Lift every homomorphism over p to a field embedding.
    ///
    /// Takes `SPEC1 N SPEC2 M`, or `SPEC1 SPEC2` with --n and --m.
    Lift {
        #[arg(num_args = 2..=4, required = true)]
        args: Vec<String>,
        #[command(flatten)]
        nm: NM,
    },
    /// Decide whether two fields are isomorphic.
    Iso {
        spec1: String,
        spec2: String,
        /// Hyperfield length; defaults to one above the uniform lifting bound.
        #[arg(long)]
        n: Option<u32>,
    },
    /// Run a verification suite on H_n(K).
    Check {
        spec: String,
        n: u32,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Levels to cover, as LO..HI.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
        /// Check this many random triples instead of all of them (axioms only).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Whether 1 + p x^q is a q-th power.
    Phiq {
        spec: String,
        q: u32,
        /// Element expression, e.g. "pi^-1" or "3 + t(2)*pi".
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Krasner number M(K) and the lifting requirement for self-maps.
    Krasner { spec: String },
    /// Truncated DVR triples.
    Triple {
        #[command(subcommand)]
        cmd: TripleCmd,
    },
}

#[derive(Args, Debug)]
struct NM {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum FieldCmd {
    /// Invariants, Krasner number and lifting bounds.
    Show { spec: String },
}

#[derive(Subcommand, Debug)]
enum HfCmd {
    /// Evaluate a class expression such as "[1] add [-1]" or "inv [1 + pi]".
    Eval {
        spec: String,
        #[arg(long)]
        n: u32,
        /// Levels of ball members to list, as LO..HI.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        expr: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum TripleCmd {
    /// Compare U(Tr(H_n(K))) with H_n(K).
    Roundtrip {
        spec: String,
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
    },
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad upper bound {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}..{hi}"));
    }
    Ok((lo, hi))
}

/// `SPEC1 N SPEC2 M` or `SPEC1 SPEC2` with `--n` and optional `--m`.
fn pair_args(args: &[String], nm: &NM) -> Result<(String, u32, String, u32), Error> {
    let num = |s: &str| {
        s.parse::<u32>()
            .map_err(|_| Error::InvalidInput(format!("expected a length, got {s:?}")))
    };
    match args {
        [a, n, b, m] => Ok((a.clone(), num(n)?, b.clone(), num(m)?)),
        [a, b] => {
            let n = nm.n.ok_or_else(|| {
                Error::InvalidInput("give N and M positionally or with --n".into())
            })?;
            Ok((a.clone(), n, b.clone(), nm.m.unwrap_or(n)))
        }
        _ => Err(Error::InvalidInput(
            "expected SPEC1 N SPEC2 M or SPEC1 SPEC2 --n N [--m M]".into(),
        )),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        e if e.is_precision_refusal() => 3,
        Error::NoConvergence(_) => 3,
        Error::BudgetExceeded { .. } => 5,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let g = &cli.global;
    match &cli.command {
        Command::Field {
            cmd: FieldCmd::Show { spec },
        } => commands::field_show(spec),
        Command::Hf {
            cmd:
                HfCmd::Eval {
                    spec,
                    n,
                    window,
                    expr,
                },
        } => commands::hf_eval(spec, *n, &expr.join(" "), *window),
        Command::Homs { args, nm, over_p } => {
            let (a, n, b, m) = pair_args(args, nm)?;
            commands::homs(&a, n, &b, m, *over_p, g.budget)
        }
        Command::Lift { args, nm } => {
            let (a, n, b, m) = pair_args(args, nm)?;
            commands::lift_cmd(&a, n, &b, m, g.budget)
        }
        Command::Iso { spec1, spec2, n } => commands::iso(spec1, spec2, *n),
        Command::Check {
            spec,
            n,
            suite,
            window,
            samples,
        } => commands::check(spec, *n, *suite, *window, *samples, g.seed),
        Command::Phiq { spec, q, x } => commands::phiq(spec, *q, x),
        Command::Krasner { spec } => commands::krasner(spec),
        Command::Triple {
            cmd: TripleCmd::Roundtrip { spec, n, window },
        } => commands::triple_roundtrip(spec, *n, *window),
    }
}

fn command_echo() -> Vec<String> {
    std::env::args().skip(1).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.global.records {
                let rec = json!({
                    "schema": SCHEMA,
                    "command": command_echo(),
                    "result": out.result,
                    "provenance": out.provenance,
                });
                println!("{rec}");
            } else {
                print!("{}", out.human);
            }
            ExitCode::from(match out.status {
                Status::Ok => 0,
                Status::Negative => 1,
                Status::Counterexample => 4,
            })
        }
        Err(err) => {
            let code = exit_code(&err);
            if cli.global.records {
                let rec = json!({
                    "schema": SCHEMA,
                    "command": command_echo(),
                    "error": err.to_string(),
                    "exit_code": code,
                });
                println!("{rec}");
            }
            eprintln!("error: {err}");
            ExitCode::from(code)
        }
    }
}

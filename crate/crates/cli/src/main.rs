use std::io::{self, Read, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use treepos::constructions::build;
use treepos::export::state_set_text;
use treepos::oracle::{
    cross_validate, default_random_alphabet, enumerate_language, random_expression, EnumerationBound,
    ValidationReport,
};
use treepos::{linearize, ConstructionKind, Expr, PositionTable, Tree};

/// Position-based automata for regular tree expressions.
#[derive(Parser)]
#[command(name = "treepos", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an automaton and print it.
    Build {
        /// Expression text, or `-` to read standard input.
        expression: String,
        #[arg(long, short, default_value = "position")]
        construction: ConstructionKind,
        /// Relabel over the original symbols instead of positions.
        #[arg(long)]
        general: bool,
        #[arg(long, short, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run an automaton on trees and report acceptance.
    Run {
        expression: String,
        #[arg(long, short, default_value = "position")]
        construction: ConstructionKind,
        /// Trees are written over positions (`f1`, `g2`, ...) rather than the original symbols.
        #[arg(long)]
        linear: bool,
        /// Tree to run; may be repeated.
        #[arg(long = "tree", short, required = true)]
        trees: Vec<String>,
    },
    /// Print the Root and Father sets of the linearized expression.
    Positions {
        expression: String,
        #[arg(long, short, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Cross-validate every construction against the enumeration oracle.
    Check {
        /// Expression to check; random expressions are generated when omitted.
        expression: Option<String>,
        #[arg(long, default_value_t = 200)]
        seed_count: u64,
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
        #[arg(long, default_value_t = 9)]
        max_nodes: usize,
        #[arg(long, default_value_t = 6)]
        max_positions: usize,
        /// Print one line per expression.
        #[arg(long, short)]
        verbose: bool,
    },
    /// List the trees of the language up to a size.
    Enumerate {
        expression: String,
        #[arg(long, default_value_t = 9)]
        max_nodes: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

/// Accepted everything or rejected something; errors are reported separately.
enum Outcome {
    Success,
    Negative,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(cli.command, &mut out) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            let _ = out.flush();
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .filter_map(|cause| cause.downcast_ref::<io::Error>())
        .any(|e| e.kind() == io::ErrorKind::BrokenPipe)
}

fn read_expression(arg: &str) -> Result<Expr> {
    let text = if arg == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).context("reading expression from standard input")?;
        buf
    } else {
        arg.to_owned()
    };
    Expr::parse(text.trim()).context("invalid expression")
}

fn execute(command: Command, out: &mut impl Write) -> Result<Outcome> {
    match command {
        Command::Build { expression, construction, general, format } => {
            let e = read_expression(&expression)?;
            let built = build(construction, &e, general)?;
            match format {
                Format::Text => write!(out, "{}", built.to_text())?,
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&built.to_json())?)?,
                Format::Dot => write!(out, "{}", built.to_dot())?,
            }
            Ok(Outcome::Success)
        }
        Command::Run { expression, construction, linear, trees } => {
            let e = read_expression(&expression)?;
            let built = build(construction, &e, !linear)?;
            let parsed = trees
                .iter()
                .map(|text| Tree::parse_over(built.alphabet(), text).with_context(|| format!("invalid tree `{text}`")))
                .collect::<Result<Vec<_>>>()?;
            let mut all = true;
            for (text, t) in trees.iter().zip(&parsed) {
                let delta = built.run(t)?;
                let accepted = built.accepts(t)?;
                all &= accepted;
                let verdict = if accepted { "accept" } else { "reject" };
                let names = state_set_text(&delta, |q| built.state_name(q).to_owned());
                writeln!(out, "{verdict} {text} {names}")?;
            }
            Ok(if all { Outcome::Success } else { Outcome::Negative })
        }
        Command::Positions { expression, format } => {
            let e = read_expression(&expression)?;
            let lin = linearize(&e)?;
            let table = PositionTable::new(&lin);
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&table.to_json())?)?,
                Format::Text => write!(out, "{}", table.to_text())?,
                Format::Dot => anyhow::bail!("positions support text and json output only"),
            }
            Ok(Outcome::Success)
        }
        Command::Check { expression, seed_count, first_seed, max_nodes, max_positions, verbose } => {
            let bound = EnumerationBound::new(max_nodes)?;
            let reports: Vec<(String, ValidationReport)> = match expression {
                Some(text) => {
                    let e = read_expression(&text)?;
                    vec![("-".to_owned(), cross_validate(&e, bound)?)]
                }
                None => {
                    let alphabet = default_random_alphabet();
                    (first_seed..first_seed + seed_count)
                        .into_par_iter()
                        .map(|seed| {
                            let e = random_expression(seed, max_positions, &alphabet)?;
                            Ok((seed.to_string(), cross_validate(&e, bound)?))
                        })
                        .collect::<treepos::Result<Vec<_>>>()?
                }
            };
            write_summary(out, &reports, verbose)?;
            Ok(if reports.iter().all(|(_, r)| r.all_agree()) { Outcome::Success } else { Outcome::Negative })
        }
        Command::Enumerate { expression, max_nodes } => {
            let e = read_expression(&expression)?;
            for t in enumerate_language(&e, EnumerationBound::new(max_nodes)?)? {
                writeln!(out, "{t}")?;
            }
            Ok(Outcome::Success)
        }
    }
}

fn write_summary(out: &mut impl Write, reports: &[(String, ValidationReport)], verbose: bool) -> Result<()> {
    if verbose {
        for (seed, report) in reports {
            writeln!(out, "{seed}\t{report}")?;
        }
    }
    let trees: u64 = reports.iter().map(|(_, r)| r.trees_checked).sum();
    let failing: Vec<&(String, ValidationReport)> = reports.iter().filter(|(_, r)| !r.all_agree()).collect();
    writeln!(out, "{:<20}{:>10}", "check", "failures")?;
    for kind in ConstructionKind::ALL {
        let n = reports.iter().filter(|(_, r)| !r.per_construction[&kind]).count();
        writeln!(out, "{:<20}{:>10}", kind.name(), n)?;
    }
    let count = |f: fn(&ValidationReport) -> bool| reports.iter().filter(|(_, r)| !f(r)).count();
    writeln!(out, "{:<20}{:>10}", "characterization", count(|r| r.characterization_agreement))?;
    writeln!(out, "{:<20}{:>10}", "delta", count(|r| r.delta_agreement))?;
    writeln!(out, "{:<20}{:>10}", "positions", count(|r| r.position_function_agreement))?;
    writeln!(
        out,
        "{} expression(s), {} tree(s) checked, {} disagreeing",
        reports.len(),
        trees,
        failing.len()
    )?;
    for (seed, report) in failing {
        writeln!(out, "disagreement at {seed}: {report}")?;
    }
    Ok(())
}

//! Command-line front end: construct loops, verify tables, run the small-
//! order census, and convert between the text and JSON table formats.
//!
//! Exit codes: 0 success, 1 verification-negative, 2 user error (bad
//! input or infeasible request), 3 internal failure.

use std::fs;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use loopforge::construct_even::{certify_even_generators, construct_even_loop, EvenError};
use loopforge::construct_odd::{construct_odd_loop, ConstructError, TargetGroup};
use loopforge::loopcore::{analyze, CayleyTable, GroupClassName, TableError};
use loopforge::search::{self, SearchOptions};

#[derive(Parser)]
#[command(name = "loopforge", version, about = "Build and verify unbreakable finite loops")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupArg {
    /// Symmetric multiplication group.
    Sym,
    /// Alternating multiplication group (odd orders, n != 5).
    Alt,
    /// Pick the default target (symmetric).
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Construct an unbreakable loop of the given order.
    Construct {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value_t = GroupArg::Auto)]
        group: GroupArg,
        /// Write the Cayley table (text format) here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// For even orders >= 10: also write the generator certificate.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Verify a Cayley table file and print its report.
    Verify { input: PathBuf },
    /// Census of loops of one small order.
    Search {
        #[arg(long)]
        order: usize,
        /// Print the census only; do not emit table files.
        #[arg(long)]
        count_only: bool,
        /// Write one canonical table file per isomorphism class.
        #[arg(long)]
        emit_dir: Option<PathBuf>,
        /// Worker threads for the census.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Opt in to long-running enumerations (order 8).
        #[arg(long)]
        allow_long_run: bool,
        /// Resumable cursor file for long enumerations.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Convert a table between the text and JSON representations.
    Convert {
        #[arg(long, value_enum)]
        to: Format,
        input: PathBuf,
    },
}

/// JSON form of a bare table, used by `convert`.
#[derive(Serialize, Deserialize)]
struct TableJson {
    schema: u32,
    order: usize,
    rows: Vec<Vec<usize>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Construct {
            order,
            group,
            out,
            certificate,
        } => cmd_construct(order, group, out.as_deref(), certificate.as_deref()),
        Command::Verify { input } => cmd_verify(&input),
        Command::Search {
            order,
            count_only,
            emit_dir,
            jobs,
            allow_long_run,
            checkpoint,
        } => cmd_search(order, count_only, emit_dir.as_deref(), jobs, allow_long_run, checkpoint),
        Command::Convert { to, input } => cmd_convert(to, &input),
    };
    ExitCode::from(code)
}

fn cmd_construct(
    order: usize,
    group: GroupArg,
    out: Option<&Path>,
    certificate: Option<&Path>,
) -> u8 {
    if order < 5 {
        eprintln!("error: no nonassociative unbreakable loops exist below order 5");
        return 2;
    }
    let target = match group {
        GroupArg::Alt => TargetGroup::Alternating,
        GroupArg::Sym | GroupArg::Auto => TargetGroup::Symmetric,
    };
    let table = if order % 2 == 0 {
        if target == TargetGroup::Alternating {
            eprintln!(
                "error: even orders admit no alternating multiplication group; only --group sym"
            );
            return 2;
        }
        match construct_even_loop(order) {
            Ok(t) => t,
            Err(EvenError::BadOrder { .. }) => {
                eprintln!("error: even construction needs order >= 6");
                return 2;
            }
            Err(e) => {
                eprintln!("internal error: {e}");
                return 3;
            }
        }
    } else {
        match construct_odd_loop(order, target) {
            Ok(t) => t,
            Err(ConstructError::Infeasible { .. }) => {
                eprintln!(
                    "error: no {target} unbreakable loop of order {order} (infeasible request)"
                );
                return 2;
            }
            Err(e) => {
                eprintln!("internal error: {e}");
                return 3;
            }
        }
    };

    let report = analyze(&table);
    let class_ok = match target {
        TargetGroup::Symmetric => report.group_class == Some(GroupClassName::Symmetric),
        TargetGroup::Alternating => report.group_class == Some(GroupClassName::Alternating),
    };
    let shape_ok = report.is_loop
        && report.unbreakable
        && if order % 2 == 0 {
            !report.commutative
        } else {
            order == 5 || report.commutative
        };
    if !class_ok || !shape_ok {
        eprintln!("internal error: constructed table failed verification");
        return 3;
    }
    if order % 2 == 0 && order >= 10 {
        match certify_even_generators(&table) {
            Ok(cert) => {
                if let Some(path) = certificate {
                    let json = serde_json::to_string_pretty(&cert).expect("certificate serializes");
                    if let Err(e) = fs::write(path, json) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
            }
            Err(e) => {
                eprintln!("internal error: generator certificate failed: {e}");
                return 3;
            }
        }
    } else if certificate.is_some() {
        eprintln!("error: --certificate applies to even orders >= 10");
        return 2;
    }
    if let Some(path) = out {
        if let Err(e) = fs::write(path, table.to_text()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    0
}

fn cmd_verify(input: &Path) -> u8 {
    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", input.display());
            return 2;
        }
    };
    let table = match CayleyTable::from_text(&text) {
        Ok(t) => t,
        Err(TableError::Parse { line, column, message }) => {
            eprintln!("parse error at line {line}, column {column}: {message}");
            return 2;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let report = analyze(&table);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.is_loop {
        0
    } else {
        1
    }
}

fn cmd_search(
    order: usize,
    count_only: bool,
    emit_dir: Option<&Path>,
    jobs: usize,
    allow_long_run: bool,
    checkpoint: Option<PathBuf>,
) -> u8 {
    let opts = SearchOptions {
        allow_long_run,
        jobs,
        checkpoint,
        ..Default::default()
    };
    if let (false, Some(dir)) = (count_only, emit_dir) {
        if let Err(e) = fs::create_dir_all(dir) {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return 2;
        }
        let mut index = 0usize;
        let emit = search::enumerate_loops(order, allow_long_run, |t| {
            let path = dir.join(format!("loop-{order}-{index:06}.tbl"));
            index += 1;
            match fs::write(&path, t.to_text()) {
                Ok(()) => ControlFlow::Continue(()),
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ControlFlow::Break(())
                }
            }
        });
        if let Err(e) = emit {
            eprintln!("error: {e}");
            return 2;
        }
    }
    match search::census(order, &opts) {
        Ok(census) => {
            println!("{}", serde_json::to_string_pretty(&census).expect("census serializes"));
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn cmd_convert(to: Format, input: &Path) -> u8 {
    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", input.display());
            return 2;
        }
    };
    match to {
        Format::Json => match CayleyTable::from_text(&text) {
            Ok(t) => {
                let n = t.order();
                let rows: Vec<Vec<usize>> = (0..n).map(|i| t.row(i).to_vec()).collect();
                let json = TableJson {
                    schema: loopforge::JSON_SCHEMA_VERSION,
                    order: n,
                    rows,
                };
                println!("{}", serde_json::to_string_pretty(&json).expect("table serializes"));
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Format::Text => match serde_json::from_str::<TableJson>(&text) {
            Ok(json) => match CayleyTable::from_rows(json.rows) {
                Ok(t) if t.order() == json.order => {
                    print!("{}", t.to_text());
                    0
                }
                Ok(_) => {
                    eprintln!("error: order field does not match row count");
                    2
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            },
            Err(e) => {
                eprintln!("error: invalid table JSON: {e}");
                2
            }
        },
    }
}

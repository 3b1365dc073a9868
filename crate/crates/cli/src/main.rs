mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use scottrank::{OrdinalCnf, Rational, Subscript};
use serde::Serialize;
use serde_json::Value;

use input::InputDigest;

/// Back-and-forth equivalence, Scott rank and distance-matrix invariants of
/// finite metric spaces and finite trees.
#[derive(Parser)]
#[command(name = "scottrank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print one JSON document on stdout instead of text.
    #[arg(long, global = true)]
    machine: bool,
    /// Ceiling on tuples held by the equivalence engines.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_tuples: u128,
    /// Ceiling on point sets visited by the symmetry search.
    #[arg(long, global = true, default_value_t = 200_000)]
    max_sets: usize,
    /// Ceiling on generated tree nodes.
    #[arg(long, global = true, default_value_t = 200_000)]
    max_nodes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewArg {
    Metric,
    Function,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitArg {
    Nodes,
    Space,
    Function,
}

#[derive(Subcommand)]
enum Command {
    /// Scott rank and the classes table of a space or node file.
    Rank {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "metric")]
        view: ViewArg,
        /// Longest tuple length in the classes table.
        #[arg(long)]
        max_n: Option<usize>,
    },
    /// Whether two tuples are alpha-equivalent. Tuples are comma-separated
    /// point labels or indices.
    Equiv {
        file: PathBuf,
        a: String,
        b: String,
        #[arg(long, default_value = "w")]
        alpha: OrdinalCnf,
        #[arg(long, value_enum, default_value = "metric")]
        view: ViewArg,
    },
    /// Whether every partial isometry extends to an auto-isometry.
    Homogeneous { file: PathBuf },
    /// Whether two spaces are isometric.
    Isometric { x: PathBuf, y: PathBuf },
    /// The set of distance matrices of all k-tuples.
    Dnset {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_n: usize,
    },
    /// Compare distance-matrix sets up to order k, or test approximate
    /// anchored equivalence when --eps is given.
    CompareDn {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_n: usize,
        #[arg(long)]
        eps: Option<Rational>,
        /// Anchor tuple in X (with --eps).
        #[arg(long, default_value = "")]
        anchor_x: String,
        /// Anchor tuple in Y (with --eps).
        #[arg(long, default_value = "")]
        anchor_y: String,
    },
    /// Generate the truncated tree T_n^alpha.
    Tree {
        /// Subscript: a natural number or `w`.
        n: Subscript,
        #[arg(long, default_value = "0")]
        alpha: OrdinalCnf,
        /// Truncation: ordinals and copies taken per limit stage.
        #[arg(long, default_value_t = 3)]
        cap: u64,
        /// Drop nodes deeper than this.
        #[arg(long)]
        depth_cap: Option<usize>,
        #[arg(long, value_enum, default_value = "nodes")]
        emit: EmitArg,
    },
    /// Greedy eps-net in point order.
    Epsnet {
        file: PathBuf,
        #[arg(long)]
        eps: Rational,
    },
}

/// What a command produced: the stdout payload for text mode, notes for
/// stderr, the structured result and, for decisions, the verdict.
pub struct Outcome {
    pub text: String,
    pub notes: Vec<String>,
    pub result: Value,
    pub verdict: Option<bool>,
}

pub enum Failure {
    Input(String),
    Resource(String),
}

impl From<scottrank::Error> for Failure {
    fn from(e: scottrank::Error) -> Self {
        match e {
            scottrank::Error::Resource { .. } => Failure::Resource(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<input::LoadError> for Failure {
    fn from(e: input::LoadError) -> Self {
        Failure::Input(e.to_string())
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a [String],
    inputs: &'a [InputDigest],
    status: &'static str,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    elapsed_ms: f64,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let mut inputs = Vec::new();
    let outcome = commands::run(&cli, &mut inputs);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let (status, code, error) = match &outcome {
        Ok(o) if o.verdict == Some(false) => ("negative", 1, None),
        Ok(_) => ("ok", 0, None),
        Err(Failure::Input(m)) => ("input_error", 2, Some(m.as_str())),
        Err(Failure::Resource(m)) => ("resource_ceiling", 3, Some(m.as_str())),
    };

    if cli.machine {
        let report = Report {
            command: &argv,
            inputs: &inputs,
            status,
            exit_code: code,
            result: outcome.as_ref().ok().map(|o| &o.result),
            error,
            elapsed_ms,
        };
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        eprintln!("# scottrank {}", argv.join(" "));
        for i in &inputs {
            eprintln!("# sha256 {} {}", i.sha256, i.path);
        }
        match &outcome {
            Ok(o) => {
                for n in &o.notes {
                    eprintln!("# {n}");
                }
                print!("{}", o.text);
            }
            Err(_) => eprintln!("error: {}", error.unwrap_or_default()),
        }
        eprintln!("# elapsed {elapsed_ms:.1} ms");
    }
    ExitCode::from(code)
}

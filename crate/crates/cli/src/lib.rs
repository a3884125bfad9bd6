//! `owi`: evaluate process specs, reproduce the built-in tables and export
//! causal graphs.
//!
//! Exit codes: 0 success, 1 spec or usage error, 2 capacity exceeded,
//! 3 a table row differs from its closed form by more than the tolerance.

mod graph;
mod render;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use owi_core::protocol::{Engine, Options};
use owi_core::specfile::ProcessSpec;
use owi_core::tables::{run_table, DEFAULT_SEED};
use owi_core::{Error, DEFAULT_MAX_DIM};

pub use render::{format_value, round12, OutputRecord};

/// Environment variable overriding the doubled-dimension budget.
pub const BUDGET_ENV: &str = "OWI_MAX_DIM";
/// Largest allowed `|computed - closed form|` in `tables`.
pub const TABLE_TOL: f64 = 1e-9;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SPEC: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    StateVector,
    DensityMatrix,
}

#[derive(Debug, Parser)]
#[command(name = "owi", version, about = "One-way information through unitary channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every query of a spec file.
    Evaluate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, value_enum, default_value = "state-vector")]
        engine: EngineArg,
    },
    /// Recompute a built-in table and compare with its closed forms.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        table: u8,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Write the causal matrix of a spec as a DOT graph plus JSON adjacency.
    Graph {
        file: PathBuf,
        #[arg(long)]
        dot: PathBuf,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(stdout: String, stderr: String) -> Self {
        Output {
            code: EXIT_OK,
            stdout,
            stderr,
        }
    }

    fn fail(code: i32, msg: impl std::fmt::Display) -> Self {
        Output {
            code,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

fn core_failure(e: Error) -> Output {
    let code = match e {
        Error::Capacity { .. } => EXIT_CAPACITY,
        _ => EXIT_SPEC,
    };
    Output::fail(code, e)
}

fn parse_budget(raw: Option<&str>) -> Result<usize, Output> {
    match raw {
        None => Ok(DEFAULT_MAX_DIM),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Output::fail(
                EXIT_SPEC,
                format!("{BUDGET_ENV} must be a positive integer, got `{s}`"),
            )),
        },
    }
}

fn load(path: &Path, budget: usize) -> Result<ProcessSpec, Output> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Output::fail(EXIT_SPEC, format!("{}: {e}", path.display())))?;
    let spec = ProcessSpec::parse(&text).map_err(|e| Output::fail(EXIT_SPEC, format!("{}: {e}", path.display())))?;
    let required = spec.doubled_dim();
    if required > budget {
        return Err(core_failure(Error::Capacity { required, budget }));
    }
    Ok(spec)
}

/// Run the CLI on `args` (including the program name). `budget` is the raw
/// value of [`BUDGET_ENV`], if set.
pub fn run<I, T>(args: I, budget: Option<&str>) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_SPEC } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output::ok(text, String::new())
            };
        }
    };
    let budget = match parse_budget(budget) {
        Ok(b) => b,
        Err(out) => return out,
    };
    let result = match cli.command {
        Command::Evaluate { file, format, engine } => evaluate(&file, format, engine, budget),
        Command::Tables { table, d, seed, format } => tables(table, d, seed, format, budget),
        Command::Graph { file, dot } => graph(&file, &dot, budget),
    };
    result.unwrap_or_else(|out| out)
}

fn evaluate(file: &Path, format: Format, engine: EngineArg, budget: usize) -> Result<Output, Output> {
    let spec = load(file, budget)?;
    let process = spec.to_process().map_err(core_failure)?;
    let options = Options {
        max_dim: budget,
        engine: match engine {
            EngineArg::StateVector => Engine::StateVector,
            EngineArg::DensityMatrix => Engine::DensityMatrix,
        },
        ..Options::default()
    };
    let results = process.run(&options).map_err(core_failure)?;
    let records: Vec<OutputRecord> = results.iter().map(OutputRecord::from).collect();
    let mut warnings = String::new();
    for r in &records {
        for w in &r.warnings {
            warnings.push_str(&format!("warning: owi {}: {w}\n", r.query));
        }
    }
    let stdout = match format {
        Format::Text => render::records_text(&records),
        Format::Json => render::records_json(&records),
        Format::Csv => render::records_csv(&records),
    };
    Ok(Output::ok(stdout, warnings))
}

fn tables(table: u8, d: usize, seed: u64, format: Format, budget: usize) -> Result<Output, Output> {
    let options = Options {
        max_dim: budget,
        ..Options::default()
    };
    let rows = run_table(table, d, seed, &options).map_err(core_failure)?;
    let worst = rows.iter().map(|r| r.max_diff()).fold(0.0, f64::max);
    let pass = worst <= TABLE_TOL;
    let stdout = match format {
        Format::Text => render::table_text(table, d, seed, &rows, worst, pass),
        Format::Json => render::table_json(table, d, seed, &rows, worst, pass),
        Format::Csv => render::table_csv(table, d, &rows),
    };
    let mut out = Output::ok(stdout, String::new());
    if !pass {
        out.code = EXIT_MISMATCH;
        out.stderr = format!("error: table {table} differs from its closed forms by {worst:.3e}\n");
    }
    Ok(out)
}

fn graph(file: &Path, dot: &Path, budget: usize) -> Result<Output, Output> {
    let spec = load(file, budget)?;
    if spec.systems.len() < 2 {
        return Err(Output::fail(EXIT_SPEC, "a causal graph needs at least two systems"));
    }
    let process = spec.to_process().map_err(core_failure)?;
    let options = Options {
        max_dim: budget,
        ..Options::default()
    };
    let matrix = process
        .execute(&options)
        .and_then(|o| o.causal_matrix(options.exec))
        .map_err(core_failure)?;
    let json_path = graph::adjacency_path(dot);
    let write = |path: &Path, body: String| {
        std::fs::write(path, body).map_err(|e| Output::fail(EXIT_SPEC, format!("{}: {e}", path.display())))
    };
    write(dot, graph::dot(&matrix))?;
    write(&json_path, graph::adjacency_json(&matrix))?;
    Ok(Output::ok(graph::summary(&matrix, dot, &json_path), String::new()))
}

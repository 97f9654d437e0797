//! The `nlqc` command line: argument grammar, subcommands, the acceptance
//! suite and report rendering.

pub mod acceptance;
pub mod commands;
pub mod output;
pub mod quick;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::Value;
use thiserror::Error;

use commands::*;
use output::{Format, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] nlqc_core::Error),
    #[error(transparent)]
    Geometry(#[from] nlqc_geometry::GeometryError),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Parser, Debug)]
#[command(name = "nlqc", version, about = "Non-local quantum computation laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Clifford protocol for random or given Cliffords, checked on every outcome.
    CliffordNlqc(CliffordArgs),
    /// Port-teleport both inputs, then apply a two-qubit unitary.
    Bk(BkArgs),
    /// Port-based teleportation fidelity, distance and POVM checks.
    Pbt(PbtArgs),
    /// Garden-hose routing, combinatorial and quantum.
    Gh(GhArgs),
    /// Code-routing with a qudit threshold scheme.
    CodeRoute(CodeRouteArgs),
    /// Rewrite a protocol into local interaction form.
    Surgery(SurgeryArgs),
    /// Scattering region, ridge and boundary mutual information in AdS₃.
    Geometry(GeometryArgs),
    /// Product-replacement bound over seeded protocol/task pairs.
    BoundCheck(BoundArgs),
    /// Acceptance criteria, or the trivial checks with --quick.
    Suite(SuiteArgs),
}

#[derive(clap::Args, Clone, Debug)]
pub struct SuiteArgs {
    /// Only the fast trivial checks.
    #[arg(long)]
    pub quick: bool,
    /// Criteria to run (default all).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::CliffordNlqc(a) => clifford_nlqc(a, c),
        Command::Bk(a) => bk(a, c),
        Command::Pbt(a) => pbt(a, c),
        Command::Gh(a) => gh(a, c),
        Command::CodeRoute(a) => code_route_cmd(a, c),
        Command::Surgery(a) => surgery(a, c),
        Command::Geometry(a) => geometry(a),
        Command::BoundCheck(a) => bound_check(a, c),
        Command::Suite(a) => suite(a),
    }
}

/// Runs in parallel; rows keep criterion order. Timings go to stderr so the
/// report itself stays deterministic.
pub fn suite(a: &SuiteArgs) -> Result<Report, CliError> {
    let mut r = Report::new("suite", &["id", "name", "pass", "detail"]);
    if a.quick {
        for q in quick::run_all() {
            eprintln!("{} {} {}", if q.pass { "PASS" } else { "FAIL" }, q.id, q.name);
            r.pass &= q.pass;
            r.row(vec![q.id.into(), q.name.into(), q.pass.into(), q.detail.into()]);
        }
        r.set("tier", "quick");
        return Ok(r);
    }
    let ids: Vec<u32> = if a.only.is_empty() { acceptance::CRITERIA.iter().map(|c| c.0).collect() } else { a.only.clone() };
    for id in &ids {
        if acceptance::CRITERIA.iter().all(|c| c.0 != *id) {
            return Err(CliError::Usage(format!("no criterion {id}")));
        }
    }
    let results: Vec<acceptance::Criterion> = ids.par_iter().map(|&id| acceptance::run(id).expect("checked above")).collect();
    for c in results {
        eprintln!("{}", c.line());
        r.pass &= c.pass;
        r.row(vec![c.id.into(), c.name.into(), c.pass.into(), c.detail.into()]);
    }
    r.set("tier", "acceptance");
    r.set("limits_seconds", Value::Object(
        acceptance::CRITERIA.iter().filter_map(|c| c.2.map(|s| (c.0.to_string(), Value::from(s)))).collect(),
    ));
    Ok(r)
}

/// Parses, runs and writes the report. Exit code 0 on pass, 1 when a check
/// fails, 2 on usage or I/O errors.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Ok(n) = std::env::var("NLQC_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: NLQC_THREADS must be a positive integer");
                return 2;
            }
        }
    }
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Err(e) = report.emit(cli.format, cli.out.as_deref()) {
        eprintln!("error: {e}");
        return 2;
    }
    if report.pass {
        0
    } else {
        1
    }
}

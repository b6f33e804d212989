//! Scenario runner for ℝ/ℤ pairing computations.
//!
//! A scenario file is validated in full, evaluated (optionally in
//! parallel, output order preserved) and rendered as a table, JSON or CSV.

pub mod catalog;
pub mod eval;
pub mod generators;
pub mod report;
pub mod scenario;

use rayon::prelude::*;

use rz_pairing::{Error, Result};

pub use report::{Record, Status, Summary};

/// Bundled scenario file reproducing every closed-form value.
pub const GOLDEN: &str = include_str!("../golden/reference_table.toml");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub tol: f64,
    pub grid: usize,
    pub cutoff: u64,
    pub format: Format,
    /// Worker threads; `0` uses rayon's default.
    pub jobs: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { tol: 1e-9, grid: 1024, cutoff: 1000, format: Format::Table, jobs: 0 }
    }
}

/// Plans, evaluates and checks every scenario in `src`.
pub fn run(src: &str, opts: &Options) -> Result<Vec<Record>> {
    let planned = scenario::plan(src, opts)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    let evaluated: Vec<Result<Record>> = pool.install(|| {
        planned
            .par_iter()
            .map(|p| {
                let outputs = eval::evaluate(&p.task).map_err(|e| Error::Parse(format!("scenario '{}': {e}", p.id)))?;
                let checks = p
                    .expect
                    .iter()
                    .map(|(name, expected)| {
                        let actual = outputs
                            .iter()
                            .find(|(k, _)| k == name)
                            .map(|(_, v)| v.clone())
                            .expect("expectations are validated against output names");
                        let pass = report::matches(&actual, expected, p.tol);
                        report::Check { output: name.clone(), expected: expected.clone(), actual, tolerance: p.tol, pass }
                    })
                    .collect();
                Ok(Record {
                    id: p.id.clone(),
                    kind: p.kind.clone(),
                    origin: p.origin.clone(),
                    inputs: p.inputs.clone(),
                    outputs,
                    checks,
                })
            })
            .collect()
    });
    evaluated.into_iter().collect()
}

pub fn render(records: &[Record], format: Format) -> String {
    match format {
        Format::Table => report::to_table(records),
        Format::Json => report::to_json(records),
        Format::Csv => report::to_csv(records),
    }
}

/// `0` when no record fails, `1` otherwise.
pub fn exit_code(records: &[Record]) -> i32 {
    if records.iter().any(|r| r.status() == Status::Fail) {
        EXIT_MISMATCH
    } else {
        EXIT_PASS
    }
}

/// Runs the bundled golden file.
pub fn reproduce_reference_table(opts: &Options) -> Result<Vec<Record>> {
    run(GOLDEN, opts)
}

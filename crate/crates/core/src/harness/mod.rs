//! Seeded Monte-Carlo experiments: trials, sweeps, the convergence study and
//! CSV/JSON output.

mod emit;
mod sweep;
mod trial;

pub use emit::{format_number, CSV_HEADER, parse_csv, to_csv, to_json, write_table, OutputFormat};
pub use sweep::{
    convergence_study, run_sweep, ConvergenceStudy, ConvergenceTrace, SweepRow, SweepSpec, SweepTable,
};
pub use trial::{run_trial, solve_method, TrialRecord};

//! Benchmark problems and the experiment harness.

pub mod problems;
pub mod run;

pub use problems::{gen_procrustes_problem, gen_trace_problem, ProblemInstance, ProcrustesObjective, TraceObjective};
pub use run::{
    emit_history_plotdata, render_table, run_experiment, run_grid, write_history_csv, ExperimentOutput, GridSpec,
    MetricSelector, ProblemKind, RetractionSelector, RunSpec, Summary, HISTORY_HEADER,
};

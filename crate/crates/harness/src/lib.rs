//! Experiment harness: seeded grid execution, aggregation over repeats, and
//! CSV emission for the saddle-escape benchmarks.

pub mod csvio;
pub mod experiment;
pub mod pool;

pub use csvio::{emit_csv, format_float, CsvError};
pub use experiment::{
    run_experiment, AggregateRow, ExperimentConfig, ExperimentError, ExperimentKind,
    ExperimentOutput, RawRun, ScheduleKind,
};

//! Batch driver: configuration, runs, reference tables and comparisons.

pub mod config;
pub mod emit;
pub mod output;
pub mod run;

pub use config::{
    preset, BcChoice, Case, ExperimentConfig, FilterSpec, FluxChoice, SolverKind, OUTPUT_ROOT_ENV,
    PRESETS,
};
pub use emit::{emit_reference, uniform_grid, ReferenceCase};
pub use output::{compare, content_hash, format_g17, norms_table, ColumnNorms, Table};
pub use run::{run, simulate, write_outputs, Profile, RunReport, SeriesRow, Simulation};

//! Scenario files, orchestration of the solvers, rise-time extraction and
//! CSV/SVG output.

mod config;
mod csvio;
mod plot;
pub mod presets;
mod record;
mod rise;
mod run;
mod simulate;
pub mod units;

pub use config::{load_config, Coefficients, ModelKind, OutputSpec, ScenarioConfig, SweepAxes, SweepPoint, G_HIGH, G_LOW};
pub use csvio::{
    read_columns, read_fields, read_sweep, read_transient, signed_field, write_fields, write_paired, write_runlog, write_sweep,
    write_transient, SweepRow, FIELDS_HEADER, RUNLOG_HEADER, TRANSIENT_HEADER,
};
pub use plot::{emit_plot, PlotStyle, Series};
pub use record::{paired_difference, PairedDifference, StepLog, TransientRecord};
pub use rise::{extract_rise_time, rise_time_of, RiseTimeReport, TAIL_FLATNESS};
pub use run::{compare, memory_from_record, run, simulate, sweep, transient_options, RunSummary};
pub use simulate::{dark_state, reduced_transient_solve, run_transient, steady_state, TransientModel, TransientOptions};

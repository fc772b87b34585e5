//! Experiment orchestration: configuration, step sweeps, depth tables and
//! plot data.

mod config;
mod plot;
mod run;

pub use config::{
    Backend, ExactConfig, ExperimentConfig, Limits, MpsConfig, ObservableKind, OutputConfig, PlanConfig, PRESETS,
    SCHEMA_VERSION,
};
pub use plot::{depth_csv, depth_report, emit_plot_data, plot_tables, DepthRow, PlotKind};
pub use run::{
    run_sweep, ExperimentPoint, KrylovDiagnostics, MpsDiagnostics, ObservableValue, PointDepth, PointTiming, ResultSet,
    SweepOutput, Timings,
};

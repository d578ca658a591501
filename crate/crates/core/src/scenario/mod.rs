//! Configuration loading, scenario and sweep execution, CSV/manifest output
//! and gnuplot script generation.

mod config;
mod output;
mod plot;
mod presets;
mod run;

pub use config::{
    default_workers, defaults_document, load_config, parse_config, Config, InitialCovariance,
    ScenarioConfig, SweepAxis, SweepConfig, DEFAULT_DECIMATE, DEFAULT_DT, DEFAULT_OUTPUT_DIR,
    DEFAULT_T_END, DEFAULT_WINDOW_FRACTION,
};
pub use output::{format_float, read_csv};
pub use plot::emit_plot_scripts;
pub use presets::{preset, PRESET_NAMES};
pub use run::{
    run_scenario, run_sweep, Diagnostics, PointOutcome, RunKind, RunManifest, MANIFEST_FILE,
    SWEEP_SUMMARY_FILE,
};

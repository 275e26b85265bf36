//! Scenario files, figure presets, seeded execution and CSV output.

mod output;
mod runner;
mod scenario;

pub use output::{emit_csv, format_g9, write_csv, CSV_HEADER};
pub use runner::{run_scenario, SopCurve, SopPoint};
pub use scenario::{
    load_scenario, FigureId, MeanPowers, Scenario, Scheme, XAxis, MIN_PRESET_TRIALS,
};

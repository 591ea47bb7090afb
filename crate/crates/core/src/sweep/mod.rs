//! Parameter sweeps over the physics modules, figure presets, and CSV/JSON
//! output.

mod config;
mod presets;
mod run;
mod table;

pub use config::{
    parameter, Axis, AxisValues, DriveSpec, MagnonMode, MechanicalMethod, OutputFormat, Parameter,
    SpectrumGrid, SweepConfig, Target, PARAMETERS,
};
pub use presets::{figure_preset, PRESET_NAMES};
pub use run::{describe_base_point, run_sweep, RowReport, SweepOptions};
pub use table::{emit, read_json, Cell, ResultTable};

/// Shortest text that parses back to the same `f64`, in plain notation for
/// moderate magnitudes and exponent notation otherwise.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

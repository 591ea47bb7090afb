//! Built-in figure presets.

use super::SweepConfig;
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 10] = [
    "fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "figS1",
];

// Cavity–magnon device: κ_a/2π = 5κ_m/2π = 5 MHz, g_ma = 4κ_a, T = 20 mK.
const TWO_MODE_BASE: &str = "
system.cavity_freq_over_2pi_hz = 10e9
system.magnon_freq_over_2pi_hz = 10e9
system.kappa_a_over_2pi_hz = 5e6
system.kappa_m_over_2pi_hz = 1e6
system.g_ma_over_2pi_hz = 20e6
system.temperature_k = 0.02
";

// Cavity–magnon–phonon device: ω_b/2π = 10 MHz, γ_b/2π = 100 Hz,
// κ_a/2π = 5κ_m/2π = 3 MHz, T = 10 mK, squeezed drive at Δ_s = ω_b.
const THREE_MODE_BASE: &str = "
system.cavity_freq_over_2pi_hz = 10e9
system.magnon_freq_over_2pi_hz = 10e9
system.mech_freq_over_2pi_hz = 10e6
system.kappa_a_over_2pi_hz = 3e6
system.kappa_m_over_2pi_hz = 0.6e6
system.gamma_b_over_2pi_hz = 100
system.g_mb_over_2pi_hz = 0.1
system.temperature_k = 0.01
system.sphere_diameter_m = 250e-6
squeeze.theta_rad = 0
squeeze.detuning_over_2pi_hz = 10e6
detuning.magnon_mode = effective
";

fn preset_text(name: &str) -> Option<String> {
    let body = match name {
        "fig2a" => "
sweep.target = magnon_variances
sweep.axis1 = detuning.magnon_over_2pi_hz -20e6 20e6 41
sweep.axis2 = detuning.cavity_over_2pi_hz -20e6 20e6 41
squeeze.r = 2
squeeze.theta_rad = 0
",
        "fig2b" => "
sweep.target = magnon_variances
sweep.axis1 = squeeze.r 0 2 41
sweep.axis2 = squeeze.theta_rad -3.141592653589793 3.141592653589793 41
detuning.cavity_over_2pi_hz = 0
detuning.magnon_over_2pi_hz = 0
",
        "fig3a" | "fig3b" => "
sweep.target = magnon_variances
sweep.axis1 = squeeze.r 0 2 41
sweep.axis2 = system.g_ma_over_2pi_hz 0 40e6 41
squeeze.theta_rad = 0
",
        "fig3c" | "fig3d" => "
sweep.target = magnon_variances
sweep.axis1 = squeeze.r 0 2 41
sweep.axis2 = system.temperature_k 0.01 0.5 50
squeeze.theta_rad = 0
",
        "fig4a" => "
sweep.target = mechanical_variance
sweep.axis1 = detuning.magnon_over_2pi_hz 5e6 15e6 101
sweep.axis2 = detuning.cavity_over_2pi_hz 5e6 15e6 101
system.g_ma_over_2pi_hz = 4.2e6
magnon_drive.coupling_over_2pi_hz = 1.5e6
squeeze.r = 1
",
        "fig4b" => "
sweep.target = mechanical_variance
sweep.axis1 = system.g_ma_over_2pi_hz 1e6 8e6 36
sweep.axis2 = magnon_drive.coupling_over_2pi_hz 0.1e6 3e6 30
detuning.magnon_over_2pi_hz = 10e6
detuning.cavity_over_2pi_hz = 11e6
squeeze.r = 1
",
        "fig4c" => "
sweep.target = mechanical_variance
sweep.axis1 = system.temperature_k [0.01, 0.1, 0.2]
sweep.axis2 = squeeze.r 0 1.5 31
system.g_ma_over_2pi_hz = 4.2e6
magnon_drive.coupling_over_2pi_hz = 1.5e6
detuning.magnon_over_2pi_hz = 10e6
detuning.cavity_over_2pi_hz = 11e6
",
        "figS1" => "
sweep.target = output_spectrum
sweep.axis1 = system.g_ma_over_2pi_hz [0, 10e6, 20e6]
squeeze.r = 1
squeeze.theta_rad = 0
detuning.cavity_over_2pi_hz = 0
detuning.magnon_over_2pi_hz = 0
spectrum.min_over_2pi_hz = -40e6
spectrum.max_over_2pi_hz = 40e6
spectrum.steps = 801
spectrum.phi_rad = 1.5707963267948966
",
        _ => return None,
    };
    let base = if name.starts_with("fig4") { THREE_MODE_BASE } else { TWO_MODE_BASE };
    // Keys set or swept in the body override the base.
    let body_keys: Vec<&str> = body
        .lines()
        .filter_map(|l| l.split_once('='))
        .flat_map(|(k, v)| {
            let k = k.trim();
            let swept = k.starts_with("sweep.axis").then(|| v.split_whitespace().next()).flatten();
            [Some(k), swept]
        })
        .flatten()
        .collect();
    let mut text = format!("sweep.name = {name}\n");
    for line in base.lines() {
        match line.split_once('=') {
            Some((k, _)) if body_keys.contains(&k.trim()) => {}
            _ => {
                text.push_str(line);
                text.push('\n');
            }
        }
    }
    text.push_str(body);
    Some(text)
}

/// The sweep configuration of a figure preset.
pub fn figure_preset(name: &str) -> Result<SweepConfig> {
    let text = preset_text(name).ok_or_else(|| {
        Error::Usage(format!(
            "unknown preset '{name}'; available presets: {}",
            PRESET_NAMES.join(", ")
        ))
    })?;
    SweepConfig::parse(&text)
}

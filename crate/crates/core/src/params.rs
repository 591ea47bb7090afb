//! Device parameters and the quantities derived from them: thermal
//! occupations, squeezed-bath moments, the driven magnon working point and
//! the validity bounds of the linearized model.
//!
//! Every rate and frequency is angular (rad/s). Configuration files use
//! ν = ω/2π in Hz; see [`crate::constants::angular`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{
    FE_SPIN, GYROMAGNETIC_RATIO, HBAR, KERR_AT_1MM, KERR_REFERENCE_DIAMETER, K_B,
    YIG_SPIN_DENSITY,
};
use crate::error::{Error, Result};

/// Physical rates, frequencies and environment of the cavity–magnon–phonon device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub cavity_freq: f64,
    pub magnon_freq: f64,
    pub mech_freq: f64,
    pub kappa_a: f64,
    pub kappa_m: f64,
    pub gamma_b: f64,
    pub g_ma: f64,
    pub g_mb: f64,
    /// Magnon drive Rabi frequency Ω.
    pub rabi: f64,
    /// Kelvin.
    pub temperature: f64,
    /// Meters.
    pub sphere_diameter: f64,
    pub drive_freq: f64,
    pub squeeze_freq: f64,
}

impl SystemParams {
    /// Checks the sign invariants. `steady_state` additionally requires
    /// nonzero cavity and magnon losses.
    pub fn validate(&self, steady_state: bool) -> Result<()> {
        let fields = [
            ("cavity_freq", self.cavity_freq),
            ("magnon_freq", self.magnon_freq),
            ("mech_freq", self.mech_freq),
            ("kappa_a", self.kappa_a),
            ("kappa_m", self.kappa_m),
            ("gamma_b", self.gamma_b),
            ("g_ma", self.g_ma),
            ("g_mb", self.g_mb),
            ("rabi", self.rabi),
            ("temperature", self.temperature),
            ("sphere_diameter", self.sphere_diameter),
            ("drive_freq", self.drive_freq),
            ("squeeze_freq", self.squeeze_freq),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {value}"
                )));
            }
        }
        if steady_state && (self.kappa_a <= 0.0 || self.kappa_m <= 0.0) {
            return Err(Error::InvalidParameter(
                "kappa_a and kappa_m must be > 0 for a steady state".into(),
            ));
        }
        Ok(())
    }

    /// Thermal magnon occupation N_m at the magnon frequency.
    pub fn magnon_occupation(&self) -> Result<f64> {
        thermal_occupation(self.magnon_freq, self.temperature)
    }

    /// Thermal phonon occupation N_b at the mechanical frequency.
    pub fn phonon_occupation(&self) -> Result<f64> {
        thermal_occupation(self.mech_freq, self.temperature)
    }
}

/// Broadband squeezed-vacuum input driving the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedDrive {
    pub squeeze_r: f64,
    pub squeeze_theta: f64,
    /// Δ_s = ω_s − ω_0 in the frame where the bath is described.
    pub detuning_s: f64,
}

impl SqueezedDrive {
    pub fn new(squeeze_r: f64, squeeze_theta: f64, detuning_s: f64) -> Self {
        Self {
            squeeze_r,
            squeeze_theta,
            detuning_s,
        }
    }

    /// Squeezing parameter of an ideal broadband source with the given
    /// degree of squeezing in dB: r = ln(10^{dB/20}).
    pub fn r_from_db(db: f64) -> f64 {
        db / 20.0 * std::f64::consts::LN_10
    }

    pub fn moments(&self) -> BathMoments {
        let (n, m) = squeezed_noise_moments(self);
        BathMoments { n, m }
    }
}

/// Second moments 𝒩 = ⟨a†a⟩ and ℳ = ⟨aa⟩ of the squeezed bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathMoments {
    pub n: f64,
    pub m: Complex64,
}

/// Mean Bose–Einstein occupation 1/(exp(ħω/k_BT) − 1).
pub fn thermal_occupation(freq: f64, temp: f64) -> Result<f64> {
    if !(freq > 0.0) || !freq.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "thermal occupation needs a positive frequency, got {freq}"
        )));
    }
    if !(temp >= 0.0) || !temp.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "temperature must be >= 0, got {temp}"
        )));
    }
    if temp == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * freq / (K_B * temp);
    Ok(1.0 / x.exp_m1())
}

/// 𝒩 = sinh²r and ℳ = e^{iθ} sinh r cosh r.
pub fn squeezed_noise_moments(drive: &SqueezedDrive) -> (f64, Complex64) {
    let r = drive.squeeze_r;
    let (s, c) = (r.sinh(), r.cosh());
    (s * s, Complex64::from_polar(s * c, drive.squeeze_theta))
}

/// Number of spins N = ρV in a YIG sphere of the given diameter.
pub fn spin_count(diameter: f64) -> f64 {
    YIG_SPIN_DENSITY * PI / 6.0 * diameter.powi(3)
}

/// Ω = (√5/4) γ √N B₀.
pub fn rabi_frequency(b0: f64, spins: f64) -> f64 {
    5f64.sqrt() / 4.0 * GYROMAGNETIC_RATIO * spins.sqrt() * b0
}

/// Kerr coefficient of the Kittel mode, scaled as 1/V from the 1 mm anchor.
pub fn kerr_coefficient(diameter: f64) -> f64 {
    KERR_AT_1MM * (KERR_REFERENCE_DIAMETER / diameter).powi(3)
}

/// How the magnon detuning is specified when the drive is on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum MagnonDetuning {
    /// Δ̃_m including the magnomechanical frequency shift is held fixed.
    Effective(f64),
    /// Bare Δ_m = ω_m − ω_0 is held fixed; Δ̃_m follows self-consistently.
    Bare(f64),
}

/// Steady-state amplitudes of the driven magnon and mechanical modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkingPoint {
    pub detuning_a: f64,
    pub detuning_m: f64,
    pub eff_detuning_m: f64,
    pub mean_magnon: Complex64,
    pub mean_position: f64,
    /// G_mb = i√2 g_mb ⟨m⟩, kept complex.
    pub eff_coupling: Complex64,
    pub rabi: f64,
    /// Large-detuning estimate iΩΔ_a/(g_ma² − Δ̃_mΔ_a), for cross-checking.
    pub approx_mean_magnon: Complex64,
    pub iterations: usize,
}

impl WorkingPoint {
    /// |G_mb|, the value entering the drift matrix.
    pub fn coupling(&self) -> f64 {
        self.eff_coupling.norm()
    }

    /// Phase of G_mb; zero when ⟨m⟩ is purely imaginary.
    pub fn coupling_phase(&self) -> f64 {
        if self.eff_coupling.norm() == 0.0 {
            0.0
        } else {
            self.eff_coupling.arg()
        }
    }

    /// Residual |lhs − rhs|/|⟨m⟩| of the steady-state amplitude equation.
    pub fn residual(&self, params: &SystemParams) -> f64 {
        let rhs = magnon_amplitude(params, self.detuning_a, self.eff_detuning_m, self.rabi);
        let scale = self.mean_magnon.norm();
        if scale == 0.0 {
            rhs.norm()
        } else {
            (self.mean_magnon - rhs).norm() / scale
        }
    }
}

fn magnon_amplitude(params: &SystemParams, delta_a: f64, eff_delta_m: f64, rabi: f64) -> Complex64 {
    let cav = Complex64::new(params.kappa_a, delta_a);
    let mag = Complex64::new(params.kappa_m, eff_delta_m);
    rabi * cav / (params.g_ma * params.g_ma + mag * cav)
}

fn approx_amplitude(params: &SystemParams, delta_a: f64, eff_delta_m: f64, rabi: f64) -> Complex64 {
    let denom = params.g_ma * params.g_ma - eff_delta_m * delta_a;
    Complex64::new(0.0, rabi * delta_a / denom)
}

const MAX_FIXED_POINT_ITERATIONS: usize = 10_000;

/// Solves for the steady-state magnon amplitude ⟨m⟩ under a drive of Rabi
/// frequency `rabi`, together with ⟨q⟩ = −(g_mb/ω_b)|⟨m⟩|², Δ̃_m and G_mb.
pub fn working_point(
    params: &SystemParams,
    detuning_a: f64,
    magnon: MagnonDetuning,
    rabi: f64,
) -> Result<WorkingPoint> {
    if !(params.mech_freq > 0.0) {
        return Err(Error::InvalidParameter(
            "working point needs mech_freq > 0".into(),
        ));
    }
    if !(rabi >= 0.0) || !rabi.is_finite() {
        return Err(Error::InvalidParameter(format!("rabi must be >= 0, got {rabi}")));
    }
    let shift_per_phonon = params.g_mb * params.g_mb / params.mech_freq;

    let (eff, mean, iterations) = match magnon {
        MagnonDetuning::Effective(eff) => (eff, magnon_amplitude(params, detuning_a, eff, rabi), 0),
        MagnonDetuning::Bare(bare) => {
            // Damped iteration on Δ̃_m = Δ_m − (g_mb²/ω_b)|⟨m⟩|².
            let mut eff = bare;
            let mut mean = magnon_amplitude(params, detuning_a, eff, rabi);
            let mut iterations = 0;
            let mut change = f64::INFINITY;
            while iterations < MAX_FIXED_POINT_ITERATIONS {
                iterations += 1;
                let target = bare - shift_per_phonon * mean.norm_sqr();
                let next_eff = 0.5 * eff + 0.5 * target;
                let next = magnon_amplitude(params, detuning_a, next_eff, rabi);
                change = if next.norm() == 0.0 {
                    0.0
                } else {
                    (next - mean).norm() / next.norm()
                };
                eff = next_eff;
                mean = next;
                let settled = (bare - shift_per_phonon * mean.norm_sqr() - eff).abs()
                    <= 1e-15 * eff.abs().max(params.kappa_m).max(1.0);
                if change < 1e-15 || settled {
                    break;
                }
            }
            if iterations >= MAX_FIXED_POINT_ITERATIONS {
                return Err(Error::Convergence {
                    iterations,
                    last_change: change,
                });
            }
            // One exact update so Δ̃_m is consistent with the returned amplitude.
            eff = bare - shift_per_phonon * mean.norm_sqr();
            mean = magnon_amplitude(params, detuning_a, eff, rabi);
            (eff, mean, iterations)
        }
    };

    let mean_position = -params.g_mb / params.mech_freq * mean.norm_sqr();
    let bare = eff - params.g_mb * mean_position;
    let wp = WorkingPoint {
        detuning_a,
        detuning_m: bare,
        eff_detuning_m: eff,
        mean_magnon: mean,
        mean_position,
        eff_coupling: Complex64::new(0.0, 2f64.sqrt() * params.g_mb) * mean,
        rabi,
        approx_mean_magnon: approx_amplitude(params, detuning_a, eff, rabi),
        iterations,
    };
    if let MagnonDetuning::Bare(_) = magnon {
        let residual = wp.residual(params);
        if residual > 1e-10 {
            return Err(Error::Convergence {
                iterations,
                last_change: residual,
            });
        }
    }
    Ok(wp)
}

/// Rabi frequency that produces |G_mb| = `target_coupling` at the given
/// detunings. Inverts the amplitude equation in closed form since
/// |⟨m⟩| = |G_mb|/(√2 g_mb) fixes Δ̃_m in either detuning mode.
pub fn rabi_for_coupling(
    params: &SystemParams,
    detuning_a: f64,
    magnon: MagnonDetuning,
    target_coupling: f64,
) -> Result<f64> {
    if !(target_coupling >= 0.0) || !target_coupling.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "target coupling must be >= 0, got {target_coupling}"
        )));
    }
    if target_coupling == 0.0 {
        return Ok(0.0);
    }
    if !(params.g_mb > 0.0) {
        return Err(Error::InvalidParameter(
            "a nonzero effective coupling needs g_mb > 0".into(),
        ));
    }
    if !(params.mech_freq > 0.0) {
        return Err(Error::InvalidParameter("mech_freq must be > 0".into()));
    }
    let amplitude = target_coupling / (2f64.sqrt() * params.g_mb);
    let eff = match magnon {
        MagnonDetuning::Effective(eff) => eff,
        MagnonDetuning::Bare(bare) => {
            bare - params.g_mb * params.g_mb / params.mech_freq * amplitude * amplitude
        }
    };
    let response = magnon_amplitude(params, detuning_a, eff, 1.0).norm();
    if response == 0.0 {
        return Err(Error::Numerical("magnon does not respond to the drive".into()));
    }
    Ok(amplitude / response)
}

/// Strict margin for "≪": two orders of magnitude.
pub const VALIDITY_MARGIN_STRICT: f64 = 0.01;
/// Looser margin matching the ratios accepted for the reference device.
pub const VALIDITY_MARGIN_RELAXED: f64 = 0.1;

/// Checks of the low-excitation and negligible-Kerr assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityReport {
    pub magnon_number: f64,
    /// 2Ns = 5N.
    pub spin_bound: f64,
    pub kerr_coeff: f64,
    pub kerr_drive: f64,
    pub rabi: f64,
    pub low_lying_ratio: f64,
    pub kerr_ratio: f64,
    pub low_lying_ok: bool,
    pub kerr_ok: bool,
    pub low_lying_ok_relaxed: bool,
    pub kerr_ok_relaxed: bool,
}

pub fn validity_report(params: &SystemParams, wp: &WorkingPoint) -> ValidityReport {
    let magnon_number = wp.mean_magnon.norm_sqr();
    let spin_bound = 2.0 * FE_SPIN * spin_count(params.sphere_diameter);
    let kerr_coeff = kerr_coefficient(params.sphere_diameter);
    let amplitude = wp.mean_magnon.norm();
    let kerr_drive = if amplitude == 0.0 {
        0.0
    } else {
        kerr_coeff * amplitude.powi(3)
    };
    let ratio = |num: f64, den: f64| {
        if num == 0.0 {
            0.0
        } else if den == 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    };
    let low_lying_ratio = ratio(magnon_number, spin_bound);
    let kerr_ratio = ratio(kerr_drive, wp.rabi);
    ValidityReport {
        magnon_number,
        spin_bound,
        kerr_coeff,
        kerr_drive,
        rabi: wp.rabi,
        low_lying_ratio,
        kerr_ratio,
        low_lying_ok: low_lying_ratio <= VALIDITY_MARGIN_STRICT,
        kerr_ok: kerr_ratio <= VALIDITY_MARGIN_STRICT,
        low_lying_ok_relaxed: low_lying_ratio <= VALIDITY_MARGIN_RELAXED,
        kerr_ok_relaxed: kerr_ratio <= VALIDITY_MARGIN_RELAXED,
    }
}

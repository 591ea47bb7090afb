//! Magnon squeezing by beamsplitter transfer from a squeezed cavity.
//!
//! All detunings here are measured from the squeezed-drive frequency ω_s.

use crate::constants::VACUUM_VARIANCE;
use crate::error::{Error, Result};
use crate::gauss::{build_two_mode, lyapunov_steady_state, CovarianceMatrix};
use crate::params::{SqueezedDrive, SystemParams};

/// Closed-form resonant (Δ_a = Δ_m = 0) variances of the cavity phase
/// quadrature δY and the magnon amplitude quadrature δx.
pub fn resonant_variances_analytic(
    kappa_a: f64,
    kappa_m: f64,
    g_ma: f64,
    r: f64,
    theta: f64,
    n_m: f64,
) -> (f64, f64) {
    let g2 = g_ma * g_ma;
    let squeeze = (2.0 * r).cosh() - theta.cos() * (2.0 * r).sinh();
    let thermal = (2.0 * n_m + 1.0) * kappa_m;
    let denom = 2.0 * (kappa_a + kappa_m) * (g2 + kappa_a * kappa_m);
    let var_y = (g2 * thermal + kappa_a * (g2 + kappa_a * kappa_m + kappa_m * kappa_m) * squeeze) / denom;
    let var_x = (thermal * (g2 + kappa_a * kappa_m + kappa_a * kappa_a) + g2 * kappa_a * squeeze) / denom;
    (var_y, var_x)
}

/// ½(e^{−2r} + κ_m/κ_a): the magnon variance for θ = 0, N_m = 0 and
/// g_ma ≫ κ_a ≫ κ_m.
pub fn optimal_magnon_variance(r: f64, kappa_a: f64, kappa_m: f64) -> f64 {
    0.5 * ((-2.0 * r).exp() + kappa_m / kappa_a)
}

/// Degree of squeezing −10 log₁₀(V/½); positive below vacuum.
pub fn squeezing_db(variance: f64) -> Result<f64> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "squeezing in dB needs a positive variance, got {variance}"
        )));
    }
    Ok(-10.0 * (variance / VACUUM_VARIANCE).log10())
}

/// Steady-state quadrature variances of the cavity and magnon modes.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeVariances {
    pub cavity_x: f64,
    pub cavity_y: f64,
    pub magnon_x: f64,
    pub magnon_y: f64,
    pub covariance: CovarianceMatrix,
}

/// Variances at arbitrary detunings from the Lyapunov steady state.
pub fn detuned_variances(
    params: &SystemParams,
    drive: &SqueezedDrive,
    detuning_a: f64,
    detuning_m: f64,
) -> Result<TwoModeVariances> {
    let (model, diffusion) = build_two_mode(params, drive, detuning_a, detuning_m)?;
    let v = lyapunov_steady_state(&model, &diffusion)?;
    Ok(TwoModeVariances {
        cavity_x: v.variance(0),
        cavity_y: v.variance(1),
        magnon_x: v.variance(2),
        magnon_y: v.variance(3),
        covariance: v,
    })
}

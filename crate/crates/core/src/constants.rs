//! Physical constants (CODATA 2018 exact values where defined) and YIG material data.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Electron gyromagnetic ratio of YIG, rad/(s·T): γ/2π = 28 GHz/T.
pub const GYROMAGNETIC_RATIO: f64 = 2.0 * PI * 28.0e9;

/// Spin density of YIG, m⁻³.
pub const YIG_SPIN_DENSITY: f64 = 4.22e27;

/// Spin of the Fe³⁺ ground state.
pub const FE_SPIN: f64 = 2.5;

/// Kerr coefficient of a 1 mm YIG sphere, rad/s (𝒦/2π ≈ 10⁻¹⁰ Hz).
pub const KERR_AT_1MM: f64 = 2.0 * PI * 1.0e-10;

/// Reference diameter for [`KERR_AT_1MM`], m.
pub const KERR_REFERENCE_DIAMETER: f64 = 1.0e-3;

/// Vacuum variance of a quadrature in the `[q, p] = i` convention.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Converts an ordinary frequency ν (Hz) to an angular frequency (rad/s).
#[inline]
pub fn angular(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// Converts an angular frequency (rad/s) to ν = ω/2π (Hz).
#[inline]
pub fn ordinary(rad_per_s: f64) -> f64 {
    rad_per_s / (2.0 * PI)
}

//! Squeezing spectrum of the cavity output field, δa^out = √(2κ_a)δa − a^in.
//!
//! Works in the two-mode frame rotating at ω_s, where the squeezed-bath
//! correlators are stationary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::gauss::{build_two_mode, transfer_row, LinearModel};
use crate::params::{squeezed_noise_moments, SqueezedDrive, SystemParams};

/// δZ^out(ω) = 𝒜 a^in(ω) + ℬ a^in†(−ω) + 𝒞 m^in(ω) + 𝒟 m^in†(−ω) for the
/// output quadrature δZ = (δa^out e^{−iφ} + δa^out† e^{iφ})/√2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl OutputCoefficients {
    fn max_norm(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest coefficient difference relative to the largest coefficient.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let diff = Self {
            a: self.a - other.a,
            b: self.b - other.b,
            c: self.c - other.c,
            d: self.d - other.d,
        };
        diff.max_norm() / self.max_norm().max(f64::MIN_POSITIVE)
    }
}

/// Closed-form coefficients. Detunings are measured from ω_s.
pub fn output_coefficients(
    params: &SystemParams,
    detuning_a: f64,
    detuning_m: f64,
    omega: f64,
    phi: f64,
) -> OutputCoefficients {
    let (ka, km, g) = (params.kappa_a, params.kappa_m, params.g_ma);
    let i = Complex64::i();
    let phase = Complex64::from_polar(1.0, -phi);
    let cav_minus = Complex64::new(detuning_a - omega, -ka);
    let mag_minus = Complex64::new(detuning_m - omega, -km);
    let cav_plus = Complex64::new(detuning_a + omega, ka);
    let mag_plus = Complex64::new(detuning_m + omega, km);
    let den_minus = g * g - cav_minus * mag_minus;
    let den_plus = g * g - cav_plus * mag_plus;
    let cross = g * (2.0 * ka * km).sqrt();
    OutputCoefficients {
        a: phase * FRAC_1_SQRT_2 * (-1.0 + 2.0 * i * ka * mag_minus / den_minus),
        b: phase.conj() * FRAC_1_SQRT_2 * (-1.0 - 2.0 * i * ka * mag_plus / den_plus),
        c: -phase * i * cross / den_minus,
        d: phase.conj() * i * cross / den_plus,
    }
}

/// The same coefficients assembled from the two-mode transfer matrix.
pub fn output_coefficients_from_model(model: &LinearModel, omega: f64, phi: f64) -> Result<OutputCoefficients> {
    if model.dim() != 4 {
        return Err(Error::InvalidParameter(format!(
            "output coefficients need the two-mode model, got dimension {}",
            model.dim()
        )));
    }
    let (s, c) = phi.sin_cos();
    let x = transfer_row(model, omega, 0)?;
    let y = transfer_row(model, omega, 1)?;
    let row: Vec<Complex64> = (0..4).map(|k| x[k] * c + y[k] * s).collect();
    let i = Complex64::i();
    let gain = (2.0 * model.kappa_a).sqrt();
    let (sa, sm) = (model.kappa_a.sqrt(), model.kappa_m.sqrt());
    let direct = Complex64::from_polar(FRAC_1_SQRT_2, -phi);
    Ok(OutputCoefficients {
        a: gain * sa * (row[0] - i * row[1]) - direct,
        b: gain * sa * (row[0] + i * row[1]) - direct.conj(),
        c: gain * sm * (row[2] - i * row[3]),
        d: gain * sm * (row[2] + i * row[3]),
    })
}

/// A sampled spectrum S(ω); vacuum is ½.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    pub quadrature: String,
    pub phi: f64,
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
}

impl SpectrumTrace {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

fn quadrature_label(phi: f64) -> String {
    let tau = std::f64::consts::TAU;
    let reduced = phi.rem_euclid(tau);
    let near = |target: f64| (reduced - target).abs() < 1e-12 || (reduced - target - tau).abs() < 1e-12;
    if near(0.0) {
        "X".into()
    } else if near(std::f64::consts::FRAC_PI_2) {
        "Y".into()
    } else {
        format!("Z(phi={phi})")
    }
}

/// Symmetrized output spectrum
/// S = (𝒩+½)(|𝒜|²+|ℬ|²) + 2Re(ℳ𝒜(ω)𝒜(−ω)) + (N_m+½)(|𝒞|²+|𝒟|²).
pub fn output_spectrum(
    params: &SystemParams,
    drive: &SqueezedDrive,
    detuning_a: f64,
    detuning_m: f64,
    grid: &[f64],
    phi: f64,
) -> Result<SpectrumTrace> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("spectrum grid must be strictly increasing".into()));
    }
    if drive.detuning_s != 0.0 {
        return Err(Error::InvalidParameter(
            "output spectra are computed in the frame of the squeezed drive (Δ_s = 0)".into(),
        ));
    }
    // Also validates the parameters and the stability of the model.
    let (model, _) = build_two_mode(params, drive, detuning_a, detuning_m)?;
    let s = crate::gauss::stability(&model);
    if !s.is_stable {
        return Err(Error::Unstable {
            max_real: s.max_real(),
        });
    }
    let (n, m) = squeezed_noise_moments(drive);
    let n_m = model.bath.n_m;
    let values = grid
        .iter()
        .map(|&w| {
            let k = output_coefficients(params, detuning_a, detuning_m, w, phi);
            let mirror = output_coefficients(params, detuning_a, detuning_m, -w, phi);
            (n + 0.5) * (k.a.norm_sqr() + k.b.norm_sqr())
                + 2.0 * (m * k.a * mirror.a).re
                + (n_m + 0.5) * (k.c.norm_sqr() + k.d.norm_sqr())
        })
        .collect();
    Ok(SpectrumTrace {
        quadrature: quadrature_label(phi),
        phi,
        omega: grid.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFeature {
    pub omega: f64,
    pub value: f64,
    pub kind: FeatureKind,
}

/// Interior local extrema, refined by a parabola through the three samples
/// around each. Precision is limited by the grid spacing. A trace whose
/// spread is below 10⁻¹² of its magnitude has no features.
pub fn find_spectrum_features(trace: &SpectrumTrace) -> Vec<SpectrumFeature> {
    let (w, s) = (&trace.omega, &trace.values);
    let n = w.len().min(s.len());
    if n < 3 {
        return Vec::new();
    }
    let max = s[..n].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = s[..n].iter().copied().fold(f64::INFINITY, f64::min);
    if max - min <= 1e-12 * max.abs().max(min.abs()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        // Walk across plateaus of equal samples so each extremum is reported once.
        let mut j = i;
        while j + 1 < n && s[j + 1] == s[i] {
            j += 1;
        }
        if j + 1 >= n {
            break;
        }
        let (left, right) = (s[i - 1], s[j + 1]);
        let kind = if s[i] < left && s[i] < right {
            Some(FeatureKind::Minimum)
        } else if s[i] > left && s[i] > right {
            Some(FeatureKind::Maximum)
        } else {
            None
        };
        if let Some(kind) = kind {
            let feature = if i == j {
                vertex(w[i - 1], w[i], w[i + 1], left, s[i], right)
            } else {
                (0.5 * (w[i] + w[j]), s[i])
            };
            out.push(SpectrumFeature {
                omega: feature.0,
                value: feature.1,
                kind,
            });
        }
        i = j + 1;
    }
    out
}

fn vertex(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature == 0.0 {
        return (x1, y1);
    }
    // Newton form p(x) = y0 + d01(x − x0) + c(x − x0)(x − x1).
    let x = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    let x = x.clamp(x0, x2);
    let y = y0 + d01 * (x - x0) + curvature * (x - x0) * (x - x1);
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::angular;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn figs1(g_over_kappa: f64, temperature: f64) -> SystemParams {
        SystemParams {
            cavity_freq: angular(10e9),
            magnon_freq: angular(10e9),
            mech_freq: angular(10e6),
            kappa_a: angular(5e6),
            kappa_m: angular(1e6),
            gamma_b: angular(100.0),
            g_ma: g_over_kappa * angular(5e6),
            g_mb: angular(0.1),
            rabi: 0.0,
            temperature,
            sphere_diameter: 250e-6,
            drive_freq: angular(10e9),
            squeeze_freq: angular(10e9),
        }
    }

    fn grid(half: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| -half + 2.0 * half * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn decoupled_cavity_reflects_perfectly() {
        let p = figs1(0.0, 0.02);
        for phi in [0.0, 0.4, FRAC_PI_2] {
            let k = output_coefficients(&p, 0.0, 0.0, 0.0, phi);
            assert!((k.a - Complex64::from_polar(FRAC_1_SQRT_2, -phi)).norm() < 1e-15);
            assert!((k.b - Complex64::from_polar(FRAC_1_SQRT_2, phi)).norm() < 1e-15);
            assert_eq!(k.c.norm() + k.d.norm(), 0.0);
        }
        for w in [-3e7, 1e6, 9e7] {
            let k = output_coefficients(&p, 1e6, -2e6, w, 1.0);
            assert_eq!(k.c.norm() + k.d.norm(), 0.0);
        }
    }

    #[test]
    fn closed_form_matches_transfer_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in [0.0, 2.0, 4.0] {
            let p = figs1(g, 0.02);
            let (da, dm) = (angular(1.3e6), angular(-0.7e6));
            let (model, _) = build_two_mode(&p, &SqueezedDrive::new(1.0, 0.0, 0.0), da, dm).unwrap();
            for _ in 0..10 {
                let w = rng.gen_range(-1.5e8..1.5e8);
                let phi = rng.gen_range(0.0..2.0 * PI);
                let closed = output_coefficients(&p, da, dm, w, phi);
                let generic = output_coefficients_from_model(&model, w, phi).unwrap();
                assert!(closed.relative_distance(&generic) < 1e-10, "g={g} ω={w}");
            }
        }
    }

    #[test]
    fn output_commutator_is_preserved() {
        let p = figs1(4.0, 0.02);
        for w in [0.0, 1e7, -3e7] {
            let k = output_coefficients(&p, 0.0, 0.0, w, 0.3);
            let mirror = output_coefficients(&p, 0.0, 0.0, -w, 0.3);
            assert!((k.a.norm_sqr() + k.c.norm_sqr() - 0.5).abs() < 1e-12);
            assert!((k.b.norm_sqr() + k.d.norm_sqr() - 0.5).abs() < 1e-12);
            assert!((k.a - mirror.b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn reflected_input_squeezing() {
        let p = figs1(0.0, 0.02);
        let t = output_spectrum(&p, &SqueezedDrive::new(1.0, 0.0, 0.0), 0.0, 0.0, &[0.0], FRAC_PI_2).unwrap();
        assert!((t.values[0] - 0.5 * (-2f64).exp()).abs() < 1e-6);
        assert_eq!(t.quadrature, "Y");
    }

    #[test]
    fn vacuum_in_vacuum_out() {
        let p = figs1(4.0, 0.0);
        let g = grid(angular(60e6), 41);
        for phi in [0.0, 1.0, FRAC_PI_2, 4.0] {
            let t = output_spectrum(&p, &SqueezedDrive::new(0.0, 0.0, 0.0), 0.0, 0.0, &g, phi).unwrap();
            assert!(t.values.iter().all(|s| (s - 0.5).abs() < 1e-12));
            assert!(find_spectrum_features(&t).is_empty());
        }
    }

    #[test]
    fn strong_coupling_features() {
        let ka = angular(5e6);
        for g in [2.0, 4.0] {
            let p = figs1(g, 0.02);
            let samples = grid(8.0 * ka, 641);
            let t = output_spectrum(&p, &SqueezedDrive::new(1.0, 0.0, 0.0), 0.0, 0.0, &samples, FRAC_PI_2).unwrap();
            assert!(t.values.iter().all(|s| *s >= 0.0));
            let f = find_spectrum_features(&t);
            for target in [-g * ka, g * ka] {
                assert!(
                    f.iter().any(|x| (x.omega - target).abs() <= ka),
                    "g={g}κ_a: no feature near {target:e} in {f:?}"
                );
            }
        }
        // Without coupling the cavity only rotates the input phase, so the
        // reflected spectrum is flat at the input level.
        let p = figs1(0.0, 0.02);
        let samples = grid(8.0 * ka, 641);
        let t = output_spectrum(&p, &SqueezedDrive::new(1.0, 0.0, 0.0), 0.0, 0.0, &samples, FRAC_PI_2).unwrap();
        assert!(t.values.iter().all(|s| (s - 0.5 * (-2f64).exp()).abs() < 1e-12));
        assert!(find_spectrum_features(&t).is_empty());
    }

    #[test]
    fn phase_quadrature_is_most_squeezed() {
        let p = figs1(4.0, 0.02);
        let ka = angular(5e6);
        let samples = grid(8.0 * ka, 161);
        let drive = SqueezedDrive::new(1.0, 0.0, 0.0);
        let min_over = |phi: f64| {
            output_spectrum(&p, &drive, 0.0, 0.0, &samples, phi)
                .unwrap()
                .values
                .into_iter()
                .fold(f64::INFINITY, f64::min)
        };
        let best = min_over(FRAC_PI_2);
        for k in 0..64 {
            let phi = 2.0 * PI * k as f64 / 64.0;
            assert!(min_over(phi) >= best - 1e-12, "φ={phi}");
        }
    }

    #[test]
    fn parabola_vertex() {
        let omega: Vec<f64> = (0..21).map(|k| k as f64 * 0.5 - 3.0).collect();
        let values = omega.iter().map(|x| 2.0 * (x - 1.3) * (x - 1.3) + 0.7).collect();
        let t = SpectrumTrace {
            quadrature: "Y".into(),
            phi: FRAC_PI_2,
            omega,
            values,
        };
        let f = find_spectrum_features(&t);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kind, FeatureKind::Minimum);
        assert!((f[0].omega - 1.3).abs() < 1e-12);
        assert!((f[0].value - 0.7).abs() < 1e-12);
    }

    #[test]
    fn unsorted_grid_is_rejected() {
        let p = figs1(4.0, 0.02);
        let r = output_spectrum(&p, &SqueezedDrive::new(1.0, 0.0, 0.0), 0.0, 0.0, &[1.0, 0.0], 0.0);
        assert!(r.is_err());
    }
}

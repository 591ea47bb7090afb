use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::params::{squeezed_noise_moments, SqueezedDrive, SystemParams, WorkingPoint};

/// Statistics of the three input noises a^in, m^in and ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBath {
    /// 𝒩 of the squeezed cavity input.
    pub n_sq: f64,
    /// ℳ of the squeezed cavity input at t = 0.
    pub m_sq: Complex64,
    /// Δ_s: the ℳ correlator carries e^{−2iΔ_s t} in the model frame.
    pub detuning_s: f64,
    pub n_m: f64,
    pub n_b: f64,
}

/// Linearized quadrature dynamics u̇ = A u + n.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub drift: DMatrix<f64>,
    pub kappa_a: f64,
    pub kappa_m: f64,
    pub gamma_b: f64,
    /// ω_b for the three-mode model.
    pub mech_freq: Option<f64>,
    pub bath: NoiseBath,
}

impl LinearModel {
    pub fn dim(&self) -> usize {
        self.drift.nrows()
    }

    /// Noise-vector amplitudes per input channel: (√(2κ_a), √(2κ_m), 1).
    pub fn noise_strengths(&self) -> (f64, f64, f64) {
        (
            (2.0 * self.kappa_a).sqrt(),
            (2.0 * self.kappa_m).sqrt(),
            1.0,
        )
    }

    /// Diffusion matrix of the noise vector in this model's frame.
    pub fn diffusion(&self) -> DiffusionMatrix {
        let dim = self.dim();
        let b = &self.bath;
        let mut constant = DMatrix::zeros(dim, dim);
        let ka = self.kappa_a;
        constant[(0, 0)] = ka * (2.0 * b.n_sq + 1.0);
        constant[(1, 1)] = ka * (2.0 * b.n_sq + 1.0);
        constant[(2, 2)] = self.kappa_m * (2.0 * b.n_m + 1.0);
        constant[(3, 3)] = self.kappa_m * (2.0 * b.n_m + 1.0);
        if dim == 6 {
            constant[(5, 5)] = self.gamma_b * (2.0 * b.n_b + 1.0);
        }

        // ℳ(t) = ℳ e^{−iφ}, φ = 2Δ_s t:
        //   Re ℳ(t) = Re ℳ cos φ + Im ℳ sin φ, Im ℳ(t) = Im ℳ cos φ − Re ℳ sin φ.
        let (re, im) = (b.m_sq.re, b.m_sq.im);
        let mut cos = DMatrix::zeros(dim, dim);
        cos[(0, 0)] = 2.0 * ka * re;
        cos[(1, 1)] = -2.0 * ka * re;
        cos[(0, 1)] = 2.0 * ka * im;
        cos[(1, 0)] = 2.0 * ka * im;
        let mut sin = DMatrix::zeros(dim, dim);
        sin[(0, 0)] = 2.0 * ka * im;
        sin[(1, 1)] = -2.0 * ka * im;
        sin[(0, 1)] = -2.0 * ka * re;
        sin[(1, 0)] = -2.0 * ka * re;

        if b.detuning_s == 0.0 || b.m_sq.norm() == 0.0 {
            DiffusionMatrix {
                constant: constant + cos,
                oscillating: None,
            }
        } else {
            DiffusionMatrix {
                constant,
                oscillating: Some(Oscillation {
                    cos,
                    sin,
                    angular_freq: 2.0 * b.detuning_s,
                }),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Oscillation {
    cos: DMatrix<f64>,
    sin: DMatrix<f64>,
    angular_freq: f64,
}

/// D(t) = D₀ + D_c cos(2Δ_s t) + D_s sin(2Δ_s t).
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix {
    constant: DMatrix<f64>,
    oscillating: Option<Oscillation>,
}

impl DiffusionMatrix {
    pub fn stationary(constant: DMatrix<f64>) -> Self {
        Self {
            constant,
            oscillating: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.constant.nrows()
    }

    pub fn is_stationary(&self) -> bool {
        self.oscillating.is_none()
    }

    /// Time average over one period; the full matrix when stationary.
    pub fn mean(&self) -> &DMatrix<f64> {
        &self.constant
    }

    /// Angular frequency 2Δ_s of the oscillating part, zero when stationary.
    pub fn oscillation_freq(&self) -> f64 {
        self.oscillating.as_ref().map_or(0.0, |o| o.angular_freq)
    }

    pub fn at(&self, t: f64) -> DMatrix<f64> {
        match &self.oscillating {
            None => self.constant.clone(),
            Some(o) => {
                let (s, c) = (o.angular_freq * t).sin_cos();
                &self.constant + &o.cos * c + &o.sin * s
            }
        }
    }

    pub(crate) fn add_at(&self, t: f64, target: &mut DMatrix<f64>) {
        *target += &self.constant;
        if let Some(o) = &self.oscillating {
            let (s, c) = (o.angular_freq * t).sin_cos();
            *target += &o.cos * c;
            *target += &o.sin * s;
        }
    }
}

fn two_mode_drift(ka: f64, km: f64, g: f64, da: f64, dm: f64, dim: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(dim, dim);
    a[(0, 0)] = -ka;
    a[(0, 1)] = da;
    a[(0, 3)] = g;
    a[(1, 0)] = -da;
    a[(1, 1)] = -ka;
    a[(1, 2)] = -g;
    a[(2, 1)] = g;
    a[(2, 2)] = -km;
    a[(2, 3)] = dm;
    a[(3, 0)] = -g;
    a[(3, 2)] = -dm;
    a[(3, 3)] = -km;
    a
}

/// Cavity–magnon model in the frame rotating at the squeezed-drive
/// frequency ω_s, so the bath correlators are stationary. `detuning_a` and
/// `detuning_m` are measured from ω_s.
pub fn build_two_mode(
    params: &SystemParams,
    drive: &SqueezedDrive,
    detuning_a: f64,
    detuning_m: f64,
) -> Result<(LinearModel, DiffusionMatrix)> {
    params.validate(true)?;
    let (n_sq, m_sq) = squeezed_noise_moments(drive);
    let model = LinearModel {
        drift: two_mode_drift(
            params.kappa_a,
            params.kappa_m,
            params.g_ma,
            detuning_a,
            detuning_m,
            4,
        ),
        kappa_a: params.kappa_a,
        kappa_m: params.kappa_m,
        gamma_b: 0.0,
        mech_freq: None,
        bath: NoiseBath {
            n_sq,
            m_sq,
            detuning_s: 0.0,
            n_m: params.magnon_occupation()?,
            n_b: 0.0,
        },
    };
    let diffusion = model.diffusion();
    Ok((model, diffusion))
}

/// Cavity–magnon–phonon model in the frame rotating at the magnon drive
/// ω_0. The drift uses |G_mb| from the working point; the squeezed-bath
/// terms of the diffusion oscillate at 2Δ_s.
pub fn build_three_mode(
    params: &SystemParams,
    drive: &SqueezedDrive,
    wp: &WorkingPoint,
) -> Result<(LinearModel, DiffusionMatrix)> {
    params.validate(false)?;
    let (n_sq, m_sq) = squeezed_noise_moments(drive);
    let g_mb = wp.coupling();
    let wb = params.mech_freq;
    let mut a = two_mode_drift(
        params.kappa_a,
        params.kappa_m,
        params.g_ma,
        wp.detuning_a,
        wp.eff_detuning_m,
        6,
    );
    a[(2, 4)] = -g_mb;
    a[(4, 5)] = wb;
    a[(5, 3)] = g_mb;
    a[(5, 4)] = -wb;
    a[(5, 5)] = -params.gamma_b;
    let n_b = if wb > 0.0 { params.phonon_occupation()? } else { 0.0 };
    let model = LinearModel {
        drift: a,
        kappa_a: params.kappa_a,
        kappa_m: params.kappa_m,
        gamma_b: params.gamma_b,
        mech_freq: Some(wb),
        bath: NoiseBath {
            n_sq,
            m_sq,
            detuning_s: drive.detuning_s,
            n_m: params.magnon_occupation()?,
            n_b,
        },
    };
    let diffusion = model.diffusion();
    Ok((model, diffusion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::angular;
    use crate::params::{working_point, MagnonDetuning};

    fn fig3_params(g_ma_hz: f64) -> SystemParams {
        SystemParams {
            cavity_freq: angular(10e9),
            magnon_freq: angular(10e9),
            mech_freq: angular(10e6),
            kappa_a: angular(5e6),
            kappa_m: angular(1e6),
            gamma_b: angular(100.0),
            g_ma: angular(g_ma_hz),
            g_mb: angular(0.1),
            rabi: 0.0,
            temperature: 0.02,
            sphere_diameter: 250e-6,
            drive_freq: angular(10e9),
            squeeze_freq: angular(10e9),
        }
    }

    #[test]
    fn decoupled_two_mode_is_block_diagonal() {
        let p = fig3_params(0.0);
        let (da, dm) = (angular(1e6), angular(-2e6));
        let (model, _) = build_two_mode(&p, &SqueezedDrive::new(0.0, 0.0, 0.0), da, dm).unwrap();
        let a = &model.drift;
        for i in 0..2 {
            for j in 2..4 {
                assert_eq!(a[(i, j)], 0.0);
                assert_eq!(a[(j, i)], 0.0);
            }
        }
        assert_eq!(a[(0, 0)], -p.kappa_a);
        assert_eq!(a[(0, 1)], da);
        assert_eq!(a[(1, 0)], -da);
        assert_eq!(a[(2, 3)], dm);
        assert_eq!(a[(3, 2)], -dm);
        assert_eq!(a[(3, 3)], -p.kappa_m);
    }

    #[test]
    fn vacuum_diffusion() {
        let mut p = fig3_params(20e6);
        p.temperature = 0.0;
        let (_, d) = build_two_mode(&p, &SqueezedDrive::new(0.0, 0.0, 0.0), 0.0, 0.0).unwrap();
        assert!(d.is_stationary());
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            p.kappa_a, p.kappa_a, p.kappa_m, p.kappa_m,
        ]));
        assert_eq!(d.mean(), &expected);
    }

    #[test]
    fn squeezed_diffusion_entries() {
        let p = fig3_params(20e6);
        let (_, d) = build_two_mode(&p, &SqueezedDrive::new(1.0, 0.0, 0.0), 0.0, 0.0).unwrap();
        let m = d.mean();
        assert!((m[(0, 0)] / p.kappa_a - 2f64.exp()).abs() < 1e-12);
        assert!((m[(1, 1)] / p.kappa_a - (-2f64).exp()).abs() < 1e-12);
        assert_eq!(m[(0, 1)], 0.0);
        assert_eq!(m, &m.transpose());
    }

    #[test]
    fn two_mode_ignores_squeeze_detuning() {
        let p = fig3_params(20e6);
        let (_, d) = build_two_mode(&p, &SqueezedDrive::new(1.0, 0.4, 1e7), 0.0, 0.0).unwrap();
        assert!(d.is_stationary());
    }

    #[test]
    fn three_mode_structure() {
        let mut p = fig3_params(4.2e6);
        p.kappa_a = angular(3e6);
        p.kappa_m = angular(0.6e6);
        let wb = p.mech_freq;
        let wp = working_point(&p, 1.1 * wb, MagnonDetuning::Effective(wb), 5.5e14).unwrap();
        let drive = SqueezedDrive::new(1.0, 0.0, wb);
        let (model, d) = build_three_mode(&p, &drive, &wp).unwrap();
        let a = &model.drift;
        let g = wp.coupling();
        assert!(g > 0.0);
        assert_eq!(a[(2, 4)], -g);
        assert_eq!(a[(5, 3)], g);
        assert_eq!(a[(4, 5)], wb);
        assert_eq!(a[(5, 4)], -wb);
        assert_eq!(a[(5, 5)], -p.gamma_b);
        assert_eq!(a[(2, 3)], wp.eff_detuning_m);
        assert!(!d.is_stationary());
        assert_eq!(d.oscillation_freq(), 2.0 * wb);
        // No noise on the position row.
        assert_eq!(d.mean()[(4, 4)], 0.0);
        // D(t) at half a period has ℳ → −ℳ.
        let half = std::f64::consts::PI / (2.0 * wb);
        let d0 = d.at(0.0);
        let dh = d.at(half);
        assert!((d0[(0, 0)] - dh[(1, 1)]).abs() < 1e-6 * d0[(0, 0)]);
    }

    #[test]
    fn three_mode_without_coupling_decouples_mechanics() {
        let p = fig3_params(4.2e6);
        let wb = p.mech_freq;
        let wp = working_point(&p, 1.1 * wb, MagnonDetuning::Effective(wb), 0.0).unwrap();
        let (model, _) = build_three_mode(&p, &SqueezedDrive::new(0.0, 0.0, wb), &wp).unwrap();
        let a = &model.drift;
        for j in 0..4 {
            assert_eq!(a[(4, j)], 0.0);
            assert_eq!(a[(5, j)], 0.0);
            assert_eq!(a[(j, 4)], 0.0);
            assert_eq!(a[(j, 5)], 0.0);
        }
        assert_eq!(a[(4, 4)], 0.0);
        assert_eq!(a[(4, 5)], wb);
        assert_eq!(a[(5, 4)], -wb);
        assert_eq!(a[(5, 5)], -p.gamma_b);
    }
}

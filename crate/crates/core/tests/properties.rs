use std::f64::consts::PI;

use cmsqueeze::constants::angular;
use cmsqueeze::gauss::{
    build_three_mode, build_two_mode, lyapunov_residual, lyapunov_steady_state, propagate_covariance, stability,
    CovarianceMatrix, DiffusionMatrix, LinearModel,
};
use cmsqueeze::params::{
    rabi_for_coupling, squeezed_noise_moments, thermal_occupation, working_point, MagnonDetuning, SqueezedDrive,
    SystemParams,
};
use cmsqueeze::twomode::{detuned_variances, resonant_variances_analytic};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn device(g_hz: f64, temperature: f64) -> SystemParams {
    SystemParams {
        cavity_freq: angular(10e9),
        magnon_freq: angular(10e9),
        mech_freq: angular(10e6),
        kappa_a: angular(5e6),
        kappa_m: angular(1e6),
        gamma_b: angular(100.0),
        g_ma: angular(g_hz),
        g_mb: angular(0.1),
        rabi: 0.0,
        temperature,
        sphere_diameter: 250e-6,
        drive_freq: angular(10e9),
        squeeze_freq: angular(10e9),
    }
}

proptest! {
    #[test]
    fn squeezed_bath_is_pure(r in 0.0f64..3.0, theta in -PI..PI) {
        let (n, m) = squeezed_noise_moments(&SqueezedDrive::new(r, theta, 0.0));
        prop_assert!((m.norm_sqr() - n * (n + 1.0)).abs() <= 1e-12 * (1.0 + n * (n + 1.0)));
        prop_assert!((m.arg() - theta).abs() < 1e-12 || r == 0.0);
    }

    #[test]
    fn occupation_grows_with_temperature(f_hz in 1e6f64..1e11, t1 in 1e-3f64..2.0, t2 in 1e-3f64..2.0) {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let a = thermal_occupation(angular(f_hz), lo).unwrap();
        let b = thermal_occupation(angular(f_hz), hi).unwrap();
        prop_assert!(a <= b);
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn resonant_steady_state_matches_closed_form(
        r in 0.0f64..2.5,
        theta in -PI..PI,
        g_hz in 0.0f64..50e6,
        temperature in 0.0f64..0.5,
    ) {
        let p = device(g_hz, temperature);
        let v = detuned_variances(&p, &SqueezedDrive::new(r, theta, 0.0), 0.0, 0.0).unwrap();
        let n_m = p.magnon_occupation().unwrap();
        let (cav, mag) = resonant_variances_analytic(p.kappa_a, p.kappa_m, p.g_ma, r, theta, n_m);
        prop_assert!((v.cavity_y / cav - 1.0).abs() < 1e-10);
        prop_assert!((v.magnon_x / mag - 1.0).abs() < 1e-10);
        prop_assert!(v.covariance.is_physical(1e-9));
    }

    #[test]
    fn detuned_steady_state_is_physical(
        r in 0.0f64..2.0,
        theta in -PI..PI,
        da in -30e6f64..30e6,
        dm in -30e6f64..30e6,
    ) {
        let p = device(20e6, 0.02);
        let (model, _) = build_two_mode(&p, &SqueezedDrive::new(r, theta, 0.0), angular(da), angular(dm)).unwrap();
        prop_assume!(stability(&model).is_stable);
        let v = detuned_variances(&p, &SqueezedDrive::new(r, theta, 0.0), angular(da), angular(dm)).unwrap();
        prop_assert!(v.covariance.is_symmetric(1e-12));
        prop_assert!(v.covariance.is_positive_definite());
        prop_assert!(v.covariance.satisfies_mode_uncertainty(1e-9));
    }
}

fn random_model(rng: &mut ChaCha8Rng) -> (LinearModel, DiffusionMatrix) {
    let p = device(rng.gen_range(1e6..30e6), rng.gen_range(0.0..0.3));
    let drive = SqueezedDrive::new(rng.gen_range(0.0..1.5), rng.gen_range(-PI..PI), 0.0);
    if rng.gen_bool(0.5) {
        let da = angular(rng.gen_range(-20e6..20e6));
        let dm = angular(rng.gen_range(-20e6..20e6));
        build_two_mode(&p, &drive, da, dm).unwrap()
    } else {
        let p = SystemParams {
            kappa_a: angular(3e6),
            kappa_m: angular(0.6e6),
            ..p
        };
        let wb = p.mech_freq;
        let da = rng.gen_range(0.8..1.3) * wb;
        let magnon = MagnonDetuning::Effective(rng.gen_range(0.8..1.2) * wb);
        let rabi = rabi_for_coupling(&p, da, magnon, angular(rng.gen_range(1.0e6..1.5e6))).unwrap();
        let wp = working_point(&p, da, magnon, rabi).unwrap();
        let (model, d) = build_three_mode(&SystemParams { rabi: wp.rabi, ..p }, &SqueezedDrive::new(drive.squeeze_r, drive.squeeze_theta, 0.0), &wp).unwrap();
        (model, d)
    }
}

#[test]
fn propagation_relaxes_to_lyapunov() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 10 {
        let (model, d) = random_model(&mut rng);
        let st = stability(&model);
        if !st.is_stable {
            continue;
        }
        let target = lyapunov_steady_state(&model, &d).unwrap();
        assert!(lyapunov_residual(&model.drift, target.matrix(), d.mean()) < 1e-9);
        let n = model.dim();
        let t_end = 15.0 / st.slowest_rate();
        let dt = (0.05 / st.fastest_scale()).min(t_end / 1000.0);
        let traj = propagate_covariance(&model, &d, &CovarianceMatrix::vacuum(n / 2), t_end, dt, 1000).unwrap();
        let end = traj.last().matrix();
        let err = (end - target.matrix()).amax() / target.matrix().amax();
        assert!(err < 1e-6, "instance {checked}: relative error {err:e}");
        for state in &traj.states {
            assert!(state.is_physical(1e-8));
        }
        checked += 1;
    }
}

#[test]
fn vacuum_input_without_coupling_stays_vacuum() {
    let p = device(0.0, 0.0);
    let v = detuned_variances(&p, &SqueezedDrive::new(0.0, 0.0, 0.0), angular(3e6), angular(-2e6)).unwrap();
    let vacuum = DMatrix::<f64>::identity(4, 4) * 0.5;
    assert!((v.covariance.matrix() - vacuum).amax() < 1e-12);
}

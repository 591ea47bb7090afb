use nalgebra::{DMatrix, DVector};

use super::{stability, CovarianceMatrix, DiffusionMatrix, LinearModel};
use crate::error::{Error, Result};

/// max |AV + VAᵀ + D| / max |D|.
pub fn lyapunov_residual(drift: &DMatrix<f64>, v: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let r = drift * v + v * drift.transpose() + d;
    let scale = d.amax();
    if scale == 0.0 {
        r.amax()
    } else {
        r.amax() / scale
    }
}

/// Steady-state covariance from AV + VAᵀ = −D, solved through the
/// vectorized system (I⊗A + A⊗I) vec V = −vec D.
pub fn lyapunov_steady_state(
    model: &LinearModel,
    diffusion: &DiffusionMatrix,
) -> Result<CovarianceMatrix> {
    if !diffusion.is_stationary() {
        return Err(Error::InvalidParameter(
            "Lyapunov steady state needs a time-independent diffusion matrix".into(),
        ));
    }
    let stab = stability(model);
    if !stab.is_stable {
        return Err(Error::Unstable {
            max_real: stab.max_real(),
        });
    }
    let a = &model.drift;
    let d = diffusion.mean();
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let op = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = DVector::from_iterator(n * n, d.iter().map(|x| -x));
    let lu = op.clone().lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Lyapunov operator".into()))?;
    // One step of iterative refinement.
    let correction = lu
        .solve(&(&rhs - &op * &x))
        .ok_or_else(|| Error::Numerical("singular Lyapunov operator".into()))?;
    x += correction;

    let v = DMatrix::from_column_slice(n, n, x.as_slice());
    let v = (&v + v.transpose()) * 0.5;
    let residual = lyapunov_residual(a, &v, d);
    if residual > 1e-10 {
        return Err(Error::Numerical(format!(
            "Lyapunov residual {residual:.3e} exceeds 1e-10"
        )));
    }
    Ok(CovarianceMatrix::new(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::NoiseBath;
    use num_complex::Complex64;

    fn model(drift: DMatrix<f64>) -> LinearModel {
        LinearModel {
            drift,
            kappa_a: 1.0,
            kappa_m: 1.0,
            gamma_b: 0.0,
            mech_freq: None,
            bath: NoiseBath {
                n_sq: 0.0,
                m_sq: Complex64::new(0.0, 0.0),
                detuning_s: 0.0,
                n_m: 0.0,
                n_b: 0.0,
            },
        }
    }

    #[test]
    fn zero_diffusion_gives_zero_covariance() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, -2.0, -1.0]);
        let v = lyapunov_steady_state(&model(a), &DiffusionMatrix::stationary(DMatrix::zeros(2, 2)))
            .unwrap();
        assert!(v.matrix().amax() == 0.0);
    }

    #[test]
    fn damped_mode_relaxes_to_bath() {
        // A = −κ I, D = κ(2n+1) I  ⇒  V = (n + ½) I
        let kappa = 3.0;
        let n = 2.5;
        let a = DMatrix::identity(2, 2) * -kappa;
        let d = DMatrix::identity(2, 2) * (kappa * (2.0 * n + 1.0));
        let v = lyapunov_steady_state(&model(a), &DiffusionMatrix::stationary(d)).unwrap();
        assert!((v.variance(0) - (n + 0.5)).abs() < 1e-14);
        assert!(v.matrix()[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn unstable_drift_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let res = lyapunov_steady_state(&model(a), &DiffusionMatrix::stationary(DMatrix::identity(2, 2)));
        assert!(matches!(res, Err(Error::Unstable { .. })));
    }
}

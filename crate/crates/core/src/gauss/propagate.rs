use nalgebra::DMatrix;

use super::{stability, CovarianceMatrix, DiffusionMatrix, LinearModel};
use crate::error::{Error, Result};

/// Largest accepted step-halving discrepancy per step, relative to |V|.
pub const DEFAULT_STEP_TOLERANCE: f64 = 1e-7;

const CHECK_INTERVAL: usize = 1024;

/// Step that resolves the fastest scale: 0.05 / max(|λ|, 2|Δ_s|).
pub fn recommended_step(model: &LinearModel, diffusion: &DiffusionMatrix) -> f64 {
    let fastest = stability(model)
        .fastest_scale()
        .max(diffusion.oscillation_freq().abs());
    if fastest == 0.0 {
        f64::INFINITY
    } else {
        0.05 / fastest
    }
}

/// Fixed-step RK4 integrator for V̇ = AV + VAᵀ + D(t).
#[derive(Debug, Clone)]
pub struct CovariancePropagator<'a> {
    drift: &'a DMatrix<f64>,
    drift_t: DMatrix<f64>,
    diffusion: &'a DiffusionMatrix,
    state: DMatrix<f64>,
    time: f64,
    dt: f64,
}

impl<'a> CovariancePropagator<'a> {
    pub fn new(
        model: &'a LinearModel,
        diffusion: &'a DiffusionMatrix,
        initial: &CovarianceMatrix,
        t0: f64,
        dt: f64,
    ) -> Result<Self> {
        let n = model.dim();
        if diffusion.dim() != n || initial.dim() != n {
            return Err(Error::InvalidParameter(format!(
                "dimension mismatch: drift {n}, diffusion {}, covariance {}",
                diffusion.dim(),
                initial.dim()
            )));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be > 0, got {dt}")));
        }
        Ok(Self {
            drift: &model.drift,
            drift_t: model.drift.transpose(),
            diffusion,
            state: initial.matrix().clone(),
            time: t0,
            dt,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn state(&self) -> &DMatrix<f64> {
        &self.state
    }

    pub fn covariance(&self) -> CovarianceMatrix {
        CovarianceMatrix::new((&self.state + self.state.transpose()) * 0.5)
    }

    fn rhs(&self, t: f64, v: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = self.drift * v;
        out.gemm(1.0, v, &self.drift_t, 1.0);
        self.diffusion.add_at(t, &mut out);
        out
    }

    fn rk4(&self, t: f64, v: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
        let k1 = self.rhs(t, v);
        let k2 = self.rhs(t + 0.5 * h, &(v + &k1 * (0.5 * h)));
        let k3 = self.rhs(t + 0.5 * h, &(v + &k2 * (0.5 * h)));
        let k4 = self.rhs(t + h, &(v + &k3 * h));
        v + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }

    pub fn step(&mut self) {
        self.state = self.rk4(self.time, &self.state, self.dt);
        self.time += self.dt;
    }

    pub fn advance(&mut self, steps: usize) {
        for _ in 0..steps {
            self.step();
        }
    }

    /// Compares one step of dt against two of dt/2 from the current state
    /// and returns the relative discrepancy.
    pub fn step_halving_discrepancy(&self) -> f64 {
        let full = self.rk4(self.time, &self.state, self.dt);
        let half = self.rk4(self.time, &self.state, 0.5 * self.dt);
        let two_halves = self.rk4(self.time + 0.5 * self.dt, &half, 0.5 * self.dt);
        let scale = two_halves.amax().max(f64::MIN_POSITIVE);
        (full - two_halves).amax() / scale
    }

    pub fn check_step(&self, tolerance: f64) -> Result<()> {
        let discrepancy = self.step_halving_discrepancy();
        if discrepancy > tolerance || !discrepancy.is_finite() {
            return Err(Error::Accuracy {
                discrepancy,
                tolerance,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CovarianceMatrix>,
}

impl Trajectory {
    pub fn last(&self) -> &CovarianceMatrix {
        self.states.last().expect("trajectory always holds the initial state")
    }
}

/// Integrates V̇ = AV + VAᵀ + D(t) from V(0) = `initial` to `t_end` with RK4.
/// `dt` is shrunk so an integer number of steps lands on `t_end`; every
/// `record_every`-th state is kept (plus the first and last). Step-halving
/// checks run periodically and fail with [`Error::Accuracy`].
pub fn propagate_covariance(
    model: &LinearModel,
    diffusion: &DiffusionMatrix,
    initial: &CovarianceMatrix,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("t_end must be >= 0, got {t_end}")));
    }
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let h = if t_end == 0.0 { dt } else { t_end / steps as f64 };
    let mut prop = CovariancePropagator::new(model, diffusion, initial, 0.0, h)?;
    let record_every = record_every.max(1);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![prop.covariance()],
    };
    if t_end == 0.0 {
        return Ok(traj);
    }
    for i in 1..=steps {
        if (i - 1) % CHECK_INTERVAL == 0 {
            prop.check_step(DEFAULT_STEP_TOLERANCE)?;
        }
        prop.step();
        if i % record_every == 0 || i == steps {
            traj.times.push(prop.time());
            traj.states.push(prop.covariance());
        }
    }
    Ok(traj)
}

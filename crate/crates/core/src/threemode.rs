//! Mechanical squeezing in the driven cavity–magnon–phonon system.
//!
//! The squeezed cavity input is detuned by Δ_s from the magnon drive, so
//! the bath correlator ℳ carries e^{−2iΔ_s t} and the mechanical variance
//! oscillates at 2Δ_s. With Δ_s = ω_b that oscillation is exactly the free
//! mechanical rotation, and the variance of the interaction-picture
//! quadratures q̃ = q cos ω_b t − p sin ω_b t, p̃ = q sin ω_b t + p cos ω_b t
//! is time-independent.
//!
//! Two independent routes are provided: a frequency-domain integral built
//! from transfer-matrix rows, and an RK4 propagation of the covariance to
//! its limit cycle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gauss::{
    recommended_step, stability, transfer_row, CovarianceMatrix,
    CovariancePropagator, DiffusionMatrix, LinearModel, Quadrature, Stability,
    DEFAULT_STEP_TOLERANCE,
};
use crate::quad::{integrate_real_line, QuadOptions, QuadResult};

/// Coefficients of one quadrature on the five input operators:
/// δQ(ω) = Q_A a^in(ω) + Q_B a^in†(−ω) + Q_C m^in(ω) + Q_D m^in†(−ω) + Q_E ξ(ω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRow {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
}

pub fn quadrature_noise_rows(model: &LinearModel, omega: f64, quadrature: Quadrature) -> Result<NoiseRow> {
    let idx = quadrature.index();
    if idx >= model.dim() {
        return Err(Error::InvalidParameter(format!(
            "quadrature {} is not part of a {}-dimensional model",
            quadrature.label(),
            model.dim()
        )));
    }
    let t = transfer_row(model, omega, idx)?;
    let i = Complex64::i();
    let (sa, sm) = (model.kappa_a.sqrt(), model.kappa_m.sqrt());
    Ok(NoiseRow {
        a: (t[0] - i * t[1]) * sa,
        b: (t[0] + i * t[1]) * sa,
        c: (t[2] - i * t[3]) * sm,
        d: (t[2] + i * t[3]) * sm,
        e: if model.dim() == 6 { t[5] } else { Complex64::new(0.0, 0.0) },
    })
}

/// Stationary part F(ω) of the symmetrized spectrum of one quadrature.
fn stationary_density(model: &LinearModel, row: &NoiseRow) -> f64 {
    let b = &model.bath;
    (b.n_sq + 0.5) * (row.a.norm_sqr() + row.b.norm_sqr())
        + (b.n_m + 0.5) * (row.c.norm_sqr() + row.d.norm_sqr())
        + model.gamma_b * (2.0 * b.n_b + 1.0) * row.e.norm_sqr()
}

/// ⟨δq(t)²⟩ = ∫dω/2π ω_b² {A(ω) + B(ω)e^{−2iΔ_s t} + c.c.} sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumDecomposition {
    pub omega: Vec<f64>,
    pub stationary: Vec<f64>,
    pub oscillating: Vec<Complex64>,
}

fn mech_freq(model: &LinearModel) -> Result<f64> {
    match model.mech_freq {
        Some(wb) if model.dim() == 6 && wb > 0.0 => Ok(wb),
        _ => Err(Error::InvalidParameter(
            "a three-mode model with mech_freq > 0 is required".into(),
        )),
    }
}

fn require_stable(model: &LinearModel) -> Result<Stability> {
    let s = stability(model);
    if !s.is_stable {
        return Err(Error::Unstable {
            max_real: s.max_real(),
        });
    }
    Ok(s)
}

/// A(ω) and B(ω) of the mechanical position on `grid`.
pub fn mechanical_spectrum(model: &LinearModel, grid: &[f64]) -> Result<SpectrumDecomposition> {
    let wb = mech_freq(model)?;
    require_stable(model)?;
    let scale = 1.0 / (wb * wb);
    let shift = 2.0 * model.bath.detuning_s;
    let mut out = SpectrumDecomposition {
        omega: grid.to_vec(),
        stationary: Vec::with_capacity(grid.len()),
        oscillating: Vec::with_capacity(grid.len()),
    };
    for &w in grid {
        let row = quadrature_noise_rows(model, w, Quadrature::Position)?;
        out.stationary.push(stationary_density(model, &row) * scale);
        let osc = if model.bath.m_sq.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let mirror = quadrature_noise_rows(model, shift - w, Quadrature::Position)?;
            model.bath.m_sq * row.a * mirror.a * scale
        };
        out.oscillating.push(osc);
    }
    Ok(out)
}

/// Frequencies where the integrands have structure: the poles −Im λ, their
/// mirror images 2Δ_s + Im λ, and a few linewidths to either side.
fn breakpoints(s: &Stability, shift: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    for e in &s.eigenvalues {
        let width = e.re.abs();
        for center in [-e.im, shift + e.im] {
            pts.push(center);
            for k in [1.0, 10.0] {
                pts.push(center - k * width);
                pts.push(center + k * width);
            }
        }
    }
    pts
}

/// Integration settings for the interaction-picture variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub quad: QuadOptions,
    /// Core half-width in units of max(ω_b, g_ma, κ_a).
    pub core_factor: f64,
    /// Largest accepted relative change when the core is doubled.
    pub doubling_tolerance: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            quad: QuadOptions::default(),
            core_factor: 200.0,
            doubling_tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalVariances {
    /// Var(q̃).
    pub q: f64,
    /// Var(p̃).
    pub p: f64,
    /// Time-averaged lab-frame ⟨δq²⟩ (the stationary part alone).
    pub q_lab: f64,
    /// Relative change of q and p when the core half-width is doubled.
    pub doubling_change: f64,
    pub core_half_width: f64,
    pub evaluations: usize,
}

struct Pieces {
    weighted: QuadResult,
    mixed: QuadResult,
    lab: QuadResult,
}

fn spectral_pieces(
    model: &LinearModel,
    wb: f64,
    points: &[f64],
    half_width: f64,
    opts: &QuadOptions,
) -> Result<Pieces> {
    let two_pi = 2.0 * PI;
    let shift = 2.0 * model.bath.detuning_s;
    let position = |w: f64| quadrature_noise_rows(model, w, Quadrature::Position);
    let stationary = |w: f64| position(w).map(|row| stationary_density(model, &row));

    // The closures cannot return errors, so the first failure is parked here.
    let failure = std::cell::RefCell::new(None);
    let guard = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };

    let lab = integrate_real_line(|w| guard(stationary(w)) / two_pi, half_width, points, opts);
    let weighted = integrate_real_line(
        |w| {
            let x = w / wb;
            0.5 * (1.0 + x * x) * guard(stationary(w)) / two_pi
        },
        half_width,
        points,
        opts,
    );
    let fail_with = |r: Result<QuadResult>| -> Result<QuadResult> {
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        r
    };
    let lab = fail_with(lab)?;
    let weighted = fail_with(weighted)?;

    let mixed = if model.bath.m_sq.norm() == 0.0 {
        QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            intervals: 0,
        }
    } else {
        // The oscillating part may nearly cancel, so its tolerance is set
        // by the size of the stationary part.
        let mixed_opts = QuadOptions {
            abs_tol: opts.rel_tol * weighted.value.abs(),
            ..*opts
        };
        let r = integrate_real_line(
            |w| {
                let x = w / wb;
                let pair = position(w).and_then(|a| position(shift - w).map(|b| a.a * b.a));
                match pair {
                    Ok(prod) => 2.0 * (model.bath.m_sq * prod).re * 0.25 * (1.0 + x) * (3.0 - x) / two_pi,
                    Err(e) => guard(Err(e)),
                }
            },
            half_width,
            points,
            &mixed_opts,
        );
        fail_with(r)?
    };
    Ok(Pieces { weighted, mixed, lab })
}

/// Var(q̃) and Var(p̃) from the frequency-domain integral
/// (1/2π)∫ [½(1 + x²)F(ω) ± 2Re(¼(1 + x)(3 − x) ℳ Q_A(ω) Q_A(2ω_b − ω))] dω,
/// x = ω/ω_b. Requires Δ_s = ω_b unless the input is unsqueezed.
pub fn interaction_picture_variance(model: &LinearModel, opts: &SpectralOptions) -> Result<MechanicalVariances> {
    let wb = mech_freq(model)?;
    let s = require_stable(model)?;
    let ds = model.bath.detuning_s;
    if model.bath.m_sq.norm() != 0.0 && (ds - wb).abs() > 1e-9 * wb {
        return Err(Error::InvalidParameter(format!(
            "the interaction-picture variance needs Δ_s = ω_b (Δ_s = {ds:e}, ω_b = {wb:e})"
        )));
    }
    let g_ma = model.drift[(0, 3)].abs();
    let core = opts.core_factor * wb.max(g_ma).max(model.kappa_a);
    let points = breakpoints(&s, 2.0 * ds);

    let first = spectral_pieces(model, wb, &points, core, &opts.quad)?;
    let second = spectral_pieces(model, wb, &points, 2.0 * core, &opts.quad)?;
    let q1 = first.weighted.value + first.mixed.value;
    let p1 = first.weighted.value - first.mixed.value;
    let q2 = second.weighted.value + second.mixed.value;
    let p2 = second.weighted.value - second.mixed.value;
    let change = ((q2 - q1) / q2).abs().max(((p2 - p1) / p2).abs());
    if !(change <= opts.doubling_tolerance) {
        return Err(Error::Integration(format!(
            "result moved by {change:.3e} (relative) when the core half-width was doubled to {:.3e} rad/s",
            2.0 * core
        )));
    }
    let evaluations = [&first, &second]
        .iter()
        .map(|p| p.weighted.evaluations + p.mixed.evaluations + p.lab.evaluations)
        .sum();
    Ok(MechanicalVariances {
        q: q2,
        p: p2,
        q_lab: second.lab.value,
        doubling_change: change,
        core_half_width: 2.0 * core,
        evaluations,
    })
}

/// Integral (1/2π)∫F(ω)dω of the stationary spectrum of any quadrature;
/// with an unsqueezed input this is the Lyapunov variance.
pub fn stationary_variance(model: &LinearModel, quadrature: Quadrature, opts: &QuadOptions) -> Result<f64> {
    let s = require_stable(model)?;
    let g_ma = model.drift[(0, 3)].abs();
    let scale = model.mech_freq.unwrap_or(0.0).max(g_ma).max(model.kappa_a);
    let points = breakpoints(&s, 2.0 * model.bath.detuning_s);
    let failure = std::cell::RefCell::new(None);
    let r = integrate_real_line(
        |w| match quadrature_noise_rows(model, w, quadrature) {
            Ok(row) => stationary_density(model, &row) / (2.0 * PI),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        200.0 * scale,
        &points,
        opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r?.value)
}

/// Settings for the time-domain limit-cycle oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCycleOptions {
    /// Minimum RK4 steps per period π/ω_b.
    pub min_steps_per_period: usize,
    /// Stop once the estimated distance to the limit cycle is below this,
    /// relative to the largest covariance entry.
    pub tolerance: f64,
    /// Give up after this many slowest relaxation times.
    pub max_relaxation_times: f64,
}

impl Default for LimitCycleOptions {
    fn default() -> Self {
        Self {
            min_steps_per_period: 128,
            tolerance: 1e-9,
            max_relaxation_times: 1e4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitCycle {
    /// Period average of Var(q̃).
    pub q: f64,
    /// Period average of Var(p̃).
    pub p: f64,
    /// (max − min)/mean of Var(q̃) over the last period.
    pub ripple_q: f64,
    pub ripple_p: f64,
    pub periods: usize,
    pub steps_per_period: usize,
    /// Covariance at the start of the last period (t a multiple of π/ω_b).
    pub covariance: CovarianceMatrix,
}

fn rotated(v: &DMatrix<f64>, wb: f64, t: f64) -> (f64, f64) {
    let (s, c) = (wb * t).sin_cos();
    let (qq, pp, qp) = (v[(4, 4)], v[(5, 5)], v[(4, 5)]);
    (
        c * c * qq + s * s * pp - 2.0 * c * s * qp,
        s * s * qq + c * c * pp + 2.0 * c * s * qp,
    )
}

fn ripple(samples: &[f64]) -> f64 {
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    (max - min) / mean
}

/// Fixed point of the discrete one-period map V ↦ L(V) + W, where L is the
/// RK4 propagation of V̇ = AV + VAᵀ and W the response to D(t) from V = 0.
/// Plain relaxation is slow when the mechanics is weakly damped: the
/// per-period contraction then sits near 1 and roundoff stalls it.
fn periodic_start(
    model: &LinearModel,
    diffusion: &DiffusionMatrix,
    dt: f64,
    steps: usize,
) -> Result<CovarianceMatrix> {
    let n = model.dim();
    let zero = DiffusionMatrix::stationary(DMatrix::zeros(n, n));
    let one_period = |d: &DiffusionMatrix, v: DMatrix<f64>| -> Result<DMatrix<f64>> {
        let mut prop = CovariancePropagator::new(model, d, &CovarianceMatrix::new(v), 0.0, dt)?;
        prop.advance(steps);
        Ok(prop.state().clone())
    };
    let mut system = DMatrix::<f64>::identity(n * n, n * n);
    for k in 0..n * n {
        let mut unit = DMatrix::zeros(n, n);
        unit[k] = 1.0;
        let image = one_period(&zero, unit)?;
        for (i, x) in image.iter().enumerate() {
            system[(i, k)] -= x;
        }
    }
    let forced = one_period(diffusion, DMatrix::zeros(n, n))?;
    let rhs = nalgebra::DVector::from_column_slice(forced.as_slice());
    let v = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("one-period covariance map has no fixed point".into()))?;
    let v = DMatrix::from_column_slice(n, n, v.as_slice());
    Ok(CovarianceMatrix::new((&v + v.transpose()) * 0.5))
}

/// Var(q̃) and Var(p̃) from RK4 propagation of V̇ = AV + VAᵀ + D(t) to its
/// limit cycle, averaged over one period π/ω_b. Starts from the fixed point
/// of the one-period map and keeps propagating until the state repeats.
pub fn limit_cycle_variance_oracle(
    model: &LinearModel,
    diffusion: &DiffusionMatrix,
    opts: &LimitCycleOptions,
) -> Result<LimitCycle> {
    let wb = mech_freq(model)?;
    let s = require_stable(model)?;
    let f = diffusion.oscillation_freq();
    if !diffusion.is_stationary() && (f - 2.0 * wb).abs() > 1e-9 * wb {
        return Err(Error::InvalidParameter(format!(
            "the limit-cycle oracle needs Δ_s = ω_b (diffusion oscillates at {f:e}, 2ω_b = {:e})",
            2.0 * wb
        )));
    }
    let period = PI / wb;
    let steps = ((period / recommended_step(model, diffusion)).ceil() as usize).max(opts.min_steps_per_period);
    let dt = period / steps as f64;

    let initial = periodic_start(model, diffusion, dt, steps)?;
    let mut prop = CovariancePropagator::new(model, diffusion, &initial, 0.0, dt)?;
    prop.check_step(DEFAULT_STEP_TOLERANCE)?;

    // Contraction per period of the slowest mode of V: e^{−2 rate T}.
    let rate = s.slowest_rate();
    let contraction = (-2.0 * rate * period).exp();
    let max_periods = (opts.max_relaxation_times / (rate * period)).ceil() as usize;

    let mut periods = 0;
    let mut last_change = f64::INFINITY;
    while periods < max_periods {
        let start = prop.state().clone();
        let mut q = Vec::with_capacity(steps);
        let mut p = Vec::with_capacity(steps);
        for k in 0..steps {
            let (vq, vp) = rotated(prop.state(), wb, k as f64 * dt);
            q.push(vq);
            p.push(vp);
            prop.step();
        }
        periods += 1;
        let end = prop.state();
        let change = (end - &start).amax() / end.amax();
        last_change = change;
        let distance = change / (1.0 - contraction);
        if distance < opts.tolerance {
            // Rectangle rule is exact for the trigonometric polynomial
            // sampled here once the state is periodic.
            let n = steps as f64;
            return Ok(LimitCycle {
                q: q.iter().sum::<f64>() / n,
                p: p.iter().sum::<f64>() / n,
                ripple_q: ripple(&q),
                ripple_p: ripple(&p),
                periods,
                steps_per_period: steps,
                covariance: CovarianceMatrix::new((&start + start.transpose()) * 0.5),
            });
        }
        if periods % 64 == 0 {
            prop.check_step(DEFAULT_STEP_TOLERANCE)?;
        }
    }
    Err(Error::Convergence {
        iterations: periods,
        last_change,
    })
}

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::LinearModel;
use crate::error::{Error, Result};

/// Relative margin on the largest eigenvalue real part.
pub const STABILITY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Stability {
    pub is_stable: bool,
    pub eigenvalues: Vec<Complex64>,
}

impl Stability {
    pub fn max_real(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| e.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Slowest decay rate min |Re λ|.
    pub fn slowest_rate(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|e| e.re.abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn fastest_scale(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }
}

/// Eigenvalues of the drift matrix and strict stability:
/// max Re λ < −10⁻⁹ max |λ|.
pub fn stability(model: &LinearModel) -> Stability {
    let eigenvalues: Vec<Complex64> = model
        .drift
        .clone()
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect();
    let scale = eigenvalues.iter().map(|e| e.norm()).fold(0.0, f64::max);
    let max_real = eigenvalues
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Stability {
        is_stable: max_real < -STABILITY_MARGIN * scale,
        eigenvalues,
    }
}

fn resolvent_operator(drift: &DMatrix<f64>, omega: f64) -> DMatrix<Complex64> {
    let n = drift.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j {
            Complex64::new(0.0, -omega)
        } else {
            Complex64::new(0.0, 0.0)
        };
        diag - drift[(i, j)]
    })
}

/// T(ω) = (−iωI − A)⁻¹, mapping noise spectra to quadrature spectra under
/// f(t) = ∫dω/2π e^{−iωt} f(ω).
pub fn transfer_matrix(model: &LinearModel, omega: f64) -> Result<DMatrix<Complex64>> {
    resolvent_operator(&model.drift, omega)
        .try_inverse()
        .ok_or_else(|| Error::Numerical(format!("−iωI − A is singular at ω = {omega:e}")))
}

/// Row `row` of T(ω), from the transposed system (−iωI − A)ᵀ y = e_row.
pub fn transfer_row(model: &LinearModel, omega: f64, row: usize) -> Result<DVector<Complex64>> {
    let n = model.dim();
    let op = resolvent_operator(&model.drift, omega).transpose();
    let mut rhs = DVector::zeros(n);
    rhs[row] = Complex64::new(1.0, 0.0);
    op.lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical(format!("−iωI − A is singular at ω = {omega:e}")))
}

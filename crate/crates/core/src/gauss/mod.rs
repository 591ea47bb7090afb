//! Small dense linear-Gaussian machinery shared by the two- and three-mode
//! analyses.
//!
//! Quadratures are always ordered (X, Y, x, y, q, p): cavity amplitude and
//! phase, magnon amplitude and phase, mechanical position and momentum. The
//! two-mode models use the first four entries.

mod covariance;
mod lyapunov;
mod model;
mod propagate;
mod transfer;

pub use covariance::CovarianceMatrix;
pub use lyapunov::{lyapunov_residual, lyapunov_steady_state};
pub use model::{build_three_mode, build_two_mode, DiffusionMatrix, LinearModel, NoiseBath};
pub use propagate::{
    propagate_covariance, recommended_step, CovariancePropagator, Trajectory,
    DEFAULT_STEP_TOLERANCE,
};
pub use transfer::{stability, transfer_matrix, transfer_row, Stability, STABILITY_MARGIN};

/// Index of a quadrature in the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    /// Cavity amplitude δX.
    CavityX,
    /// Cavity phase δY.
    CavityY,
    /// Magnon amplitude δx.
    MagnonX,
    /// Magnon phase δy.
    MagnonY,
    /// Mechanical position δq.
    Position,
    /// Mechanical momentum δp.
    Momentum,
}

impl Quadrature {
    pub const ALL: [Quadrature; 6] = [
        Quadrature::CavityX,
        Quadrature::CavityY,
        Quadrature::MagnonX,
        Quadrature::MagnonY,
        Quadrature::Position,
        Quadrature::Momentum,
    ];

    pub fn index(self) -> usize {
        match self {
            Quadrature::CavityX => 0,
            Quadrature::CavityY => 1,
            Quadrature::MagnonX => 2,
            Quadrature::MagnonY => 3,
            Quadrature::Position => 4,
            Quadrature::Momentum => 5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Quadrature::CavityX => "X",
            Quadrature::CavityY => "Y",
            Quadrature::MagnonX => "x",
            Quadrature::MagnonY => "y",
            Quadrature::Position => "q",
            Quadrature::Momentum => "p",
        }
    }
}

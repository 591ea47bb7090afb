//! Linearized quantum-fluctuation models of a driven cavity magnomechanical
//! system: a microwave cavity fed with squeezed vacuum, a magnon (Kittel)
//! mode coupled to it by a beamsplitter interaction, and a phonon mode
//! coupled to the magnon by magnetostriction.
//!
//! * [`params`]: device parameters, thermal and squeezed-bath moments, the
//!   driven working point and validity bounds.
//! * [`gauss`]: drift and diffusion matrices, Lyapunov steady states,
//!   covariance propagation and transfer matrices.
//! * [`twomode`]: cavity and magnon squeezing.
//! * [`threemode`]: mechanical squeezing under a red-detuned magnon drive.
//! * [`output`]: squeezing spectrum of the cavity output field.
//! * [`sweep`]: configuration, figure presets, parameter sweeps, CSV/JSON.

pub mod constants;
pub mod error;
pub mod gauss;
pub mod output;
pub mod params;
pub mod quad;
pub mod sweep;
pub mod threemode;
pub mod twomode;

pub use error::{Error, Result};

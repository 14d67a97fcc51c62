//! Solvers for one-, two-, and three-dimensional space-fractional
//! advection-diffusion and Riesz fractional diffusion equations.
//!
//! The spatial fractional derivatives (Riemann-Liouville, order `1 < mu < 2`)
//! are discretized with a second-order shifted difference operator whose
//! coefficients are the `g_l` weights of [`frac::coefficients`]; time stepping
//! is Crank-Nicolson. Multi-dimensional problems are advanced with the
//! alternating-direction-implicit family:
//!
//! * `PR-ADI` - Peaceman-Rachford, 2D only;
//! * `D-ADI` - Douglas splitting, 2D and 3D;
//! * `FS` - fractional step (first order in time);
//! * `D-ADI-II` / `FS-II` - corrected two-step variants for Riesz problems
//!   that lower the splitting error from O(tau^2) (resp. O(tau)) to O(tau^3).
//!
//! [`cn`] holds the unsplit Crank-Nicolson reference solvers (the production
//! 1D scheme plus small dense Kronecker assemblies used as splitting-error
//! oracles), [`diagnostics`] the numerical verification of the stability
//! theory (negative definiteness, Gerschgorin bounds, iteration spectra), and
//! [`catalog`]/[`study`] the four manufactured benchmark problems with their
//! convergence-table harness.

pub mod adi;
pub mod catalog;
pub mod cn;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod frac;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod study;
mod sweep;
pub mod table;
pub mod threads;

pub use adi::SchemeKind;
pub use error::{Error, Result};
pub use frac::{DirectionOperator, FracCoeffs};
pub use model::{AxisSpec, Field, FracOrder, Problem, TimeSpec};
pub use study::ConvergenceRecord;

//! Simulation and optimization toolkit for a squeezed resonant receiver.
//!
//! The library models a microwave cavity read out through a squeezed
//! measurement port while it is driven by a weak, nearly-coherent classical
//! force. It provides four layers that cross-validate each other:
//!
//! - [`phasespace`]: Gaussian states as mean vectors and covariance matrices,
//!   with symplectic transformations (displacement, squeezing), loss channels
//!   and homodyne/heterodyne measurement statistics.
//! - [`estimation`]: closed-form variances of the force estimators built from
//!   those states, and the dissipation-limited scalings.
//! - [`cavity`]: the frequency-domain input-output model of the three-port
//!   cavity (measurement, internal loss, signal port), its susceptibility
//!   matrix, output noise spectra and the fractional sensitivity `sigma(omega)`.
//! - [`scan`]: the scan-rate figure of merit `R = B / t_av`, its closed form,
//!   numerical quadrature of the bandwidth integral, and optimization over the
//!   measurement coupling and squeezer gain.
//! - [`langevin`]: a time-domain stochastic oracle that integrates the
//!   quadrature Langevin equations exactly (exponential-integrator
//!   discretization) and estimates output spectra with Welch averaging.
//!
//! # Conventions
//!
//! These are fixed across the whole crate; some of the literature differs, so
//! they are worth stating up front.
//!
//! - **Vacuum variance is 1/2 per quadrature**: `Var(X) = Var(Y) = 1/2` in the
//!   oscillator ground state, from `[X, Y] = i`. Spectral densities are in the
//!   same photon units, so a vacuum-limited white spectrum sits at `1/2`.
//! - **Quadrature ordering** is `(X1, Y1, X2, Y2, ...)` in every vector and
//!   matrix.
//! - **Squeezing gain** `G = exp(2r)`: a squeeze parameter `r > 0` reduces
//!   `Var(X)` to `exp(-2r)/2 = 1/(2G)`.
//! - **Rates** (`kappa_m`, `kappa_loss`, `kappa_ax`, detunings, linewidths) are
//!   angular rates in a consistent but arbitrary unit; every physical result
//!   here is a ratio. The CLI layer normalizes everything to `kappa_loss = 1`.

// `!(x > 0.0)` in validations deliberately rejects NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod cli;
pub mod config;
pub mod error;
pub mod estimation;
pub mod langevin;
pub mod numeric;
pub mod phasespace;
pub mod scan;
pub mod welch;

pub use cavity::{AxionPsd, CavityParams, GainProfile, ReceiverConfig, SpectrumGrid};
pub use error::Error;
pub use estimation::ForceSignal;
pub use langevin::{SimulationConfig, Trajectory};
pub use phasespace::GaussianState;
pub use scan::{ScanConfig, ScanOptimum};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

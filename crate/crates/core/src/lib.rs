//! Exact quantum microcanonical density of states for finite spectra.
//!
//! A spectrum with `n + 1` eigenstates induces, through the uniform measure on
//! the projective state space, a density of states `Ω(E)` for the energy
//! expectation `⟨Ĥ⟩`. `Ω` is a piecewise polynomial of degree `n − 1` with
//! breakpoints at the eigenvalues, so every thermodynamic quantity derived from
//! it (entropy, temperature, specific heat, energy uncertainty) can be computed
//! in closed form, and the points where it fails to be analytic are the
//! finite-system phase transitions.
//!
//! The crate is organised as:
//!
//! * [`spectrum`] builds and normalises spectra (ladders, the 3-spin Ising
//!   ring, raw eigenvalue lists, small Hermitian matrices).
//! * [`dos`] constructs `Ω` exactly through confluent divided differences.
//! * [`thermo`] derives thermodynamic functions, critical points and
//!   two-system equilibria.
//! * [`oracle`] is an independent Monte Carlo estimator used for validation.

pub mod divdiff;
pub mod dos;
pub mod error;
pub mod oracle;
pub mod poly;
pub mod scalar;
pub mod spectrum;
pub mod thermo;

pub use dos::{density_of_states, DensityOfStates, SmoothnessEntry};
pub use error::{Error, Result};
pub use poly::{PiecewisePolynomial, Polynomial};
pub use scalar::{Backing, Rational, Scalar};
pub use spectrum::{HermitianMatrix, Level, Spectrum};
pub use thermo::{
    AccessibleRange, CriticalPoint, EnergyGrid, Equilibrium, EquilibriumKind, PointOptions, Side,
    ThermoCurve, ThermoRow,
};

/// Version tag written into every JSON document produced by this crate.
pub const SCHEMA_VERSION: u32 = 1;

//! Simulation and numerical-analysis toolkit for the Schelling opinion model
//! and its continuum scaling limit.
//!
//! The discrete model lives on a torus (or finite window) of `Z^N`: each node
//! holds one of `M` opinions and carries a unit-rate Poisson clock. When a
//! node's clock rings it adopts the most common opinion within a window of
//! radius `w`, keeping its own opinion on ties that include it. The centered,
//! `w^{N/2}`-normalized opinion counts form a bias field `Y^w` which, under
//! diffusive rescaling, approaches the solution of an integro-differential
//! equation
//!
//! ```text
//! dY_m/dt (x) = ∫_{N(x)} [ (1 - 1/M)·1{p(Y(x')) = m} - (1/M)·1{p(Y(x')) ≠ m} ] dx'
//! ```
//!
//! started from a moving-average Gaussian field `B`. This crate implements
//! both sides of that correspondence at desk scale:
//!
//! - [`lattice`]: event-driven simulation of the discrete dynamics,
//!   stabilization detection, and cluster extraction;
//! - [`gaussian`]: sampling of the initial field `B` from cell-aggregated
//!   white noise, with exact covariance formulas for validation;
//! - [`continuum`]: forward-Euler and Picard solvers for the limit equation,
//!   including the two-opinion sign form and the conserved pair-swap variant,
//!   plus long-horizon classification of frozen intervals;
//! - [`scaling`]: the normalized bias field, coupled discrete-vs-continuum
//!   error curves, and statistics of final configurations;
//! - [`shapes`]: stable finite shapes in `Z^N`, erosion from a large block,
//!   and minimal stable diameter search;
//! - [`occupation`]: occupation measures of the Gaussian field at levels
//!   perturbed by dyadic Lipschitz functions.
//!
//! All randomness flows through seedable ChaCha streams (see [`rng`]); every
//! run is reproducible from its configuration and seed.

pub mod continuum;
pub mod gaussian;
pub mod grid;
pub mod lattice;
pub mod occupation;
pub mod rng;
pub mod scaling;
pub mod shapes;

mod error;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

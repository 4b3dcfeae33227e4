//! Growth statistics for products of random singular 2x2 matrices.
//!
//! The model: draw i.i.d. nonzero reals `x_1, x_2, ...` and form
//! `S_n = Y(x_n) ... Y(x_2) Y(x_1)` with `Y(x) = [[1, x], [1/x, 1]]`.
//! Each factor is rank one, so the product collapses to an explicit scalar
//! cocycle: `log ||S_n||` equals a sum of `log |1 + x_{j+1}/x_j|` terms plus a
//! bounded residual. This crate computes the almost-sure growth rate (the
//! Lyapunov exponent, `lambda`) and the variance (`sigma^2`) of the Gaussian
//! fluctuations of `log ||S_n||` around `n * lambda`, three independent ways:
//!
//! * closed forms for binary, finite-atom, uniform, exponential, and Laplace
//!   entry distributions ([`estimators`]),
//! * Monte Carlo path estimates with honest standard errors that account for
//!   the 1-dependence of consecutive terms ([`estimators`]),
//! * adaptive quadrature of the defining integrals ([`quad`]).
//!
//! [`clt`] stress-tests the normal limit and demonstrates the even/odd
//! cancellation that kills the variance for the three degenerate atom
//! configurations. [`hill`] connects the model to discrete Hill-equation
//! transfer matrices, whose unstable regime the singular products approximate.
//!
//! The `lyaprod` binary exposes all of it behind a JSON-reporting CLI; see the
//! crate README for the subcommand tour.

pub mod clt;
pub mod dist;
pub mod estimators;
pub mod hill;
pub mod matrix;
pub mod product;
pub mod quad;
pub mod rng;
pub mod stats;

pub mod cli;

pub use dist::{DistError, EntryDistribution, PathSampler};
pub use estimators::{BlockMomentEstimate, DegeneracyVerdict, EstimateError};
pub use matrix::{y_matrix, Matrix2};
pub use product::{log_norm_closed, log_norm_direct, LogNorm, ProductAccumulator};
pub use quad::{QuadError, QuadratureSpec};

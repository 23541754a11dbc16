//! Numerical laboratory for local mild solutions of the time-weighted
//! semilinear heat equation `u_t - Δu = h(t) g(u)` with singular radial
//! initial data `K^{1/r} |x|^{-ρ/r} χ_{B_a}`.
//!
//! The crate is `no_std` (with `alloc`) and purely computational:
//!
//! * [`radial_field`]: graded radial grids, radial profiles, Lebesgue norms and
//!   the upper/lower power-singular data classes.
//! * [`semigroup`]: the heat semigroup on radial data (exact free-space
//!   Gaussian convolution and a Crank–Nicolson Dirichlet-ball engine) plus
//!   numerical checks of the classical kernel estimates.
//! * [`nonlinearity`]: nonlinearity and time-weight families, the envelopes
//!   `G`, `F`, `L`, growth exponents and the Osgood tail `H(z) = ∫_z^∞ dσ/f(σ)`.
//! * [`criteria`]: convergence classification of the integral criteria and the
//!   existence / non-existence / uniqueness decision tree.
//! * [`mild_solver`]: super/subsolution construction, monotone Picard
//!   iteration of the Duhamel map, direct time stepping, the blow-up probe
//!   and the Gronwall uniqueness bound.
//!
//! IO, file formats and the command-line runner live in the `heatlab` crate.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is deliberate: it rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod criteria;
pub mod error;
pub mod math;
pub mod mild_solver;
pub mod nonlinearity;
pub mod quad;
pub mod radial_field;
pub mod semigroup;

pub use error::{Error, Result};

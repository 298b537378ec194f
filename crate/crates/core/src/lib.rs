//! Numerics for the q-deformed Fock space over one and two modes.
//!
//! The crate evaluates the q-Gaussian law `nu_q`, builds the orientation
//! reversing, law preserving involution `gamma` of its support, expands the
//! composition operator `f -> f o gamma` in the continuous q-Hermite basis and
//! lifts it to the two-mode Fock space. The [`moments`] module then compares
//! the fourth vacuum moments of `X0 + X1` and `gamma(X0) + X1`.
//!
//! Module map:
//!
//! - [`qspecial`]: q-arithmetic, q-Pochhammer products, density, CDF,
//!   q-Hermite polynomials and Gauss rules for `nu_q`.
//! - [`involution`]: the map `gamma` and its checks.
//! - [`fock`]: truncated word bases, Gram matrices, creation and annihilation
//!   operators, kernel of `a0`, the isomorphism `V`.
//! - [`transform`]: coefficients `w_kn` and the two-mode extension `W`.
//! - [`moments`]: fourth moments by several independent routes and the sweep.
//! - [`cli`]: the `qconv` command line front end.

pub mod cli;
pub mod error;
pub mod fock;
pub mod integrate;
pub mod involution;
pub mod moments;
pub mod qspecial;
pub mod transform;

pub use error::{Error, Result};
pub use qspecial::QContext;

//! q-arithmetic and the q-Gaussian law.

mod arith;
mod cdf;
mod context;
mod density;
mod hermite;
mod quadrature;

pub use arith::{
    ln_q_factorial, q_bracket, q_factorial, q_pochhammer, PochhammerOrder, PochhammerValue,
};
pub(crate) use arith::{bracket, factorial};
pub use cdf::CdfModel;
pub use context::QContext;
pub use density::DensityModel;
pub(crate) use hermite::fill_orthonormal;
pub use hermite::{hermite_all, hermite_eval, orthonormal_hermite_all};
pub use quadrature::{quadrature, GaussRule};

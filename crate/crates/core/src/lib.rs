//! Sharp constants and numerical verification of Hardy–Hilbert type
//! inequalities with homogeneous kernels, on the half line and on
//! homogeneous groups.
//!
//! The building blocks are an improper-integral engine ([`quad`]), a small
//! kernel expression language ([`kernels`]), the dilation and measure
//! structure of a homogeneous group ([`group`]), the sharp constants
//! ([`constants`]) and the inequality checks ([`verify`]).

pub mod constants;
mod error;
pub mod group;
pub mod kernels;
pub mod num_serde;
pub mod quad;
pub mod radial;
pub mod verify;

pub use error::{Error, Result};

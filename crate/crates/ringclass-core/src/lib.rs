//! Ring class group averages of Rankin-Selberg L-functions over imaginary
//! quadratic fields.
//!
//! The crate is `no_std` with `alloc`. The `std` feature switches the float
//! backend from `libm` to the platform library, and `parallel` enables rayon
//! over the outer sums of the moment computations.
//!
//! Layout follows the computation:
//!
//! * [`arith`]: factorization, Kronecker symbols, Möbius function.
//! * [`quad`]: binary quadratic forms, ring class groups and their characters,
//!   representation counts, real quadratic fundamental domains.
//! * [`hecke`]: Hecke eigenvalue systems (Ramanujan Δ, elliptic curves,
//!   user tables) and tensor product coefficients.
//! * [`special`]: complex gamma, archimedean factors, the cutoff functions of
//!   the approximate functional equation and Whittaker functions.
//! * [`lseries`]: Dirichlet L-values, symmetric square values, root numbers and
//!   central values.
//! * [`moments`]: averages over ring class characters by two independent
//!   routes, main terms and primitive subaverages.
//! * [`shifted`]: shifted convolution sums and decay exponent fits.
#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

pub mod arith;
mod error;
mod exec;
pub mod hecke;
pub mod lseries;
pub mod moments;
mod ntt;
pub mod quad;
pub mod shifted;
pub mod special;

pub use error::{Error, Result};

/// Float and complex helpers shared by the numeric modules.
pub(crate) mod num {
    pub(crate) use num_complex::Complex64 as C64;
    pub(crate) use num_traits::Float;

    pub(crate) const PI: f64 = core::f64::consts::PI;
    #[cfg(test)]
    pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
}

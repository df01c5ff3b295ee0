//! Entire functions of order 1 and genus 0 or 1, represented by their zeros.
//!
//! The crate evaluates truncated Weierstrass-Hadamard products, converts zero
//! data into Taylor coefficients, restricts symmetric-class functions to the
//! line `Re s = xi`, and measures growth order, convergence exponent and zero
//! multiplicities from finite data.

pub mod analysis;
pub mod cli;
pub mod critical_line;
pub mod error;
pub mod io;
pub mod primary;
pub mod product;
pub mod series;
pub mod summation;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64;

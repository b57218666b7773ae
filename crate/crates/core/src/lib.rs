//! Rational approximation in BMO of symbols with logarithmic singularities.
//!
//! The pipeline is: a [`symbol::SymbolSpec`] describes the function on the
//! unit circle, [`fourier`] turns it into Hankel coefficient sequences,
//! [`hankel`] extracts singular values of finite sections, and [`aak`] reads
//! them as distances to rational functions and compares with the closed-form
//! limits from [`asymptotics`].

pub mod aak;
pub mod asymptotics;
pub mod error;
pub mod fourier;
pub mod hankel;
pub mod io;
pub mod quad;
pub mod special;
pub mod symbol;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used across the crate.
pub type C64 = Complex64;

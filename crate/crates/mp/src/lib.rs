//! Minimal arbitrary-precision binary floating point, built on `num-bigint`.
//!
//! Values are `sign * mag * 2^exp` with `mag` kept to a fixed number of
//! significant bits per value. The operation set is exactly what
//! high-precision complex contour integration needs: field arithmetic,
//! square roots, `exp`, `sin`/`cos`, and the constants pi and ln 2.
//! Rounding is round-half-up at the working precision; callers are expected
//! to carry guard digits.

mod complex;
mod real;

pub use complex::MpComplex;
pub use real::{ln2, pi, BigFloat};

/// Bits of mantissa needed to represent `digits` decimal digits, with guard.
pub fn digits_to_bits(digits: u32) -> u32 {
    // log2(10) = 3.3219...
    (digits as f64 * 3.321_928_094_887_362).ceil() as u32 + 32
}

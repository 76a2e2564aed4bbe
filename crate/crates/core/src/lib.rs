//! Discrete Gabor transforms on a finite Heisenberg group quotient, with
//! left-invariant reassignment and diffusion of the coefficients.

pub mod calculus;
pub mod chirp;
pub mod deform;
pub mod diffusion;
pub mod error;
pub mod field;
pub mod heisenberg;
pub mod io;
pub mod reassign;
pub mod transform;
pub mod window;
pub mod zak;

pub use error::{Error, Result};
pub use field::{GroupField, PhaseField, PhaseField2d};
pub use heisenberg::{GaborParams, GroupElement, HeisenbergPoint};
pub use num_complex::Complex64;
pub use transform::GaborTransform;
pub use window::{Window, WindowKind};

use std::f64::consts::TAU;

/// `exp(2πi·e/n)` with the exponent reduced first, so large integer phases stay exact.
pub(crate) fn unit_root(n: i64, e: i64) -> Complex64 {
    let r = e.rem_euclid(n);
    Complex64::cis(TAU * r as f64 / n as f64)
}

/// Euclidean norm of a complex vector.
pub fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

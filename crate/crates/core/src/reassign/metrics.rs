use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::l2_norm;

/// Relative errors of a processed signal: complex (`eps1`) and modulus-only (`eps2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionErrors {
    pub eps1: f64,
    pub eps2: f64,
}

pub fn reconstruction_errors(reference: &[Complex64], processed: &[Complex64]) -> Result<ReconstructionErrors> {
    if reference.len() != processed.len() {
        return Err(Error::LengthMismatch { expected: reference.len(), got: processed.len() });
    }
    let norm = l2_norm(reference);
    if norm == 0.0 {
        return Err(Error::ZeroNorm("reference signal"));
    }
    let (mut d1, mut d2) = (0.0, 0.0);
    for (x, y) in reference.iter().zip(processed) {
        d1 += (x - y).norm_sqr();
        d2 += (x.norm() - y.norm()).powi(2);
    }
    Ok(ReconstructionErrors { eps1: d1.sqrt() / norm, eps2: d2.sqrt() / norm })
}

/// Scales `processed` to carry the energy of `reference`.
pub fn energy_rescale(processed: &[Complex64], reference: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm = l2_norm(processed);
    if norm == 0.0 {
        return Err(Error::ZeroNorm("processed signal"));
    }
    let factor = l2_norm(reference) / norm;
    Ok(processed.iter().map(|z| z * factor).collect())
}

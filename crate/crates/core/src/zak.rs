//! Discrete Zak transform and the frame-operator spectrum it exposes.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::heisenberg::GaborParams;
use crate::window::Window;

/// `Z[n, k] = (1/(N√K)) Σ_j f[n + jL] e^{-2πi kj/K}`, shape `[L, K]`.
pub fn zak_transform(f: &[Complex64], p: &GaborParams) -> Result<Array2<Complex64>> {
    let (n, k, l) = (p.n(), p.k(), p.l());
    if f.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: f.len() });
    }
    let fft = FftPlanner::new().plan_fft_forward(k);
    let scale = 1.0 / (n as f64 * (k as f64).sqrt());
    let mut out = Array2::zeros((l, k));
    let mut buf = vec![Complex64::default(); k];
    for r in 0..l {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = f[r + j * l];
        }
        fft.process(&mut buf);
        for (j, b) in buf.iter().enumerate() {
            out[(r, j)] = b * scale;
        }
    }
    Ok(out)
}

/// Inverse of [`zak_transform`].
pub fn inverse_zak(z: &Array2<Complex64>, p: &GaborParams) -> Result<Vec<Complex64>> {
    let (n, k, l) = (p.n(), p.k(), p.l());
    if z.dim() != (l, k) {
        return Err(Error::ShapeMismatch(format!("zak array is {:?}, expected ({l}, {k})", z.dim())));
    }
    let ifft = FftPlanner::new().plan_fft_inverse(k);
    let scale = n as f64 * (k as f64).sqrt() / k as f64;
    let mut f = vec![Complex64::default(); n];
    let mut buf = vec![Complex64::default(); k];
    for r in 0..l {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = z[(r, j)];
        }
        ifft.process(&mut buf);
        for (j, b) in buf.iter().enumerate() {
            f[r + j * l] = b * scale;
        }
    }
    Ok(f)
}

/// Zak coefficients of a window together with the frame-operator eigenvalues.
#[derive(Debug, Clone)]
pub struct ZakCoefficients {
    pub values: Array2<Complex64>,
    /// `λ[n, k] = L Σ_{p<P} |Zψ[n, k - pN/M]|²`.
    pub eigenvalues: Array2<f64>,
}

impl ZakCoefficients {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(0.0, f64::max)
    }
}

/// Frame eigenvalues without the admissibility check.
pub fn frame_spectrum(w: &Window, p: &GaborParams) -> Result<ZakCoefficients> {
    let values = zak_transform(&w.centred(), p)?;
    let (l, k, pp) = (p.l(), p.k(), p.p());
    let step = k / pp;
    let eigenvalues = Array2::from_shape_fn((l, k), |(r, j)| {
        l as f64 * (0..pp).map(|i| values[(r, (j + k - (i * step) % k) % k)].norm_sqr()).sum::<f64>()
    });
    Ok(ZakCoefficients { values, eigenvalues })
}

/// Frame eigenvalues; fails if the window does not generate a frame.
pub fn frame_eigenvalues(w: &Window, p: &GaborParams) -> Result<ZakCoefficients> {
    let z = frame_spectrum(w, p)?;
    let (min, max) = (z.min_eigenvalue(), z.max_eigenvalue());
    if !(min > 1e-14 * max) {
        return Err(Error::WindowNotFrame { min, max });
    }
    Ok(z)
}

//! Discrete Gabor analysis and synthesis, and the map between phase space and
//! the group quotient.

use std::sync::Arc;

use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{GroupField, PhaseField};
use crate::heisenberg::{GaborParams, GroupElement};
use crate::unit_root;
use crate::window::Window;
use crate::zak::{frame_eigenvalues, inverse_zak, zak_transform, ZakCoefficients};

/// A window on a grid, with the FFT plans and inverse frame multiplier cached.
#[derive(Clone)]
pub struct GaborTransform {
    params: GaborParams,
    window: Window,
    psi: Vec<Complex64>,
    spectrum: ZakCoefficients,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GaborTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaborTransform").field("params", &self.params).field("window", &self.window.kind()).finish()
    }
}

impl GaborTransform {
    pub fn new(params: GaborParams, window: Window) -> Result<Self> {
        if window.len() != params.n() {
            return Err(Error::LengthMismatch { expected: params.n(), got: window.len() });
        }
        let spectrum = frame_eigenvalues(&window, &params)?;
        let mut planner = FftPlanner::new();
        Ok(GaborTransform {
            psi: window.centred(),
            forward: planner.plan_fft_forward(params.m()),
            inverse: planner.plan_fft_inverse(params.m()),
            params,
            window,
            spectrum,
        })
    }

    pub fn params(&self) -> &GaborParams {
        &self.params
    }
    pub fn window(&self) -> &Window {
        &self.window
    }
    pub fn spectrum(&self) -> &ZakCoefficients {
        &self.spectrum
    }

    fn check_len(&self, f: &[Complex64]) -> Result<()> {
        if f.len() != self.params.n() {
            return Err(Error::LengthMismatch { expected: self.params.n(), got: f.len() });
        }
        Ok(())
    }

    /// `G[l, m] = e^{2πi lm/P} (1/N) Σ_n conj(ψ[n - lL]) f[n] e^{-2πi nm/M}`.
    pub fn analyze(&self, f: &[Complex64]) -> Result<PhaseField> {
        self.check_len(f)?;
        let p = &self.params;
        let (n, k, m, l) = (p.n(), p.k(), p.m(), p.l());
        let inv_n = 1.0 / n as f64;
        let rows: Vec<Vec<Complex64>> = (0..k)
            .into_par_iter()
            .map(|row| {
                let mut buf = vec![Complex64::default(); m];
                for (i, x) in f.iter().enumerate() {
                    let w = self.psi[(i + n - (row * l) % n) % n];
                    buf[i % m] += w.conj() * x * inv_n;
                }
                self.forward.process(&mut buf);
                for (col, b) in buf.iter_mut().enumerate() {
                    *b *= unit_root(p.p() as i64, (row * col) as i64);
                }
                buf
            })
            .collect();
        let data = Array2::from_shape_fn((k, m), |(r, c)| rows[r][c]);
        PhaseField::new(*p, data)
    }

    /// `Σ_{l,m} G[l, m] ψ_{lm}` without the inverse frame operator.
    pub fn superpose(&self, g: &PhaseField) -> Result<Vec<Complex64>> {
        if g.params() != &self.params {
            return Err(Error::ShapeMismatch("phase field was built on a different grid".into()));
        }
        let p = &self.params;
        let (n, k, m, l) = (p.n(), p.k(), p.m(), p.l());
        let parts: Vec<Vec<Complex64>> = (0..k)
            .into_par_iter()
            .map(|row| {
                let mut buf: Vec<Complex64> = (0..m)
                    .map(|col| g.data()[(row, col)] * unit_root(p.p() as i64, -((row * col) as i64)))
                    .collect();
                self.inverse.process(&mut buf);
                (0..n).map(|i| self.psi[(i + n - (row * l) % n) % n] * buf[i % m]).collect()
            })
            .collect();
        // Summation order over rows is fixed, so the result is deterministic.
        let mut s = vec![Complex64::default(); n];
        for part in &parts {
            for (acc, v) in s.iter_mut().zip(part) {
                *acc += v;
            }
        }
        Ok(s)
    }

    /// Applies the frame operator or its inverse through the Zak domain.
    fn zak_multiply(&self, f: &[Complex64], invert: bool) -> Result<Vec<Complex64>> {
        let p = &self.params;
        let mut z = zak_transform(f, p)?;
        // With the 1/N inner product the Zak multiplier of the frame operator is N·K·λ.
        let nk = (p.n() * p.k()) as f64;
        for (zv, lam) in z.iter_mut().zip(self.spectrum.eigenvalues.iter()) {
            let mu = nk * lam;
            *zv = if invert { *zv / mu } else { *zv * mu };
        }
        inverse_zak(&z, p)
    }

    /// `Σ_{l,m} (ψ_{lm}, f) ψ_{lm}` evaluated in the Zak domain.
    pub fn frame_operator(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(f)?;
        self.zak_multiply(f, false)
    }

    /// Canonical dual synthesis; inverts [`analyze`](Self::analyze).
    pub fn synthesize(&self, g: &PhaseField) -> Result<Vec<Complex64>> {
        let s = self.superpose(g)?;
        self.zak_multiply(&s, true)
    }
}

pub fn gabor_analysis(f: &[Complex64], w: &Window, p: &GaborParams) -> Result<PhaseField> {
    GaborTransform::new(*p, w.clone())?.analyze(f)
}

pub fn gabor_synthesis(g: &PhaseField, w: &Window, p: &GaborParams) -> Result<Vec<Complex64>> {
    GaborTransform::new(*p, w.clone())?.synthesize(g)
}

/// `W[l, m, k] = e^{-2πi(k/Q + lm/(2P))} G[l, m]`.
pub fn apply_s_inverse(g: &PhaseField) -> GroupField {
    let p = *g.params();
    let (two_p, q) = (2 * p.p() as i64, p.q() as i64);
    let data = Array3::from_shape_fn((p.k(), p.m(), p.q()), |(l, m, k)| {
        let e = two_p * k as i64 + q * ((l * m) as i64 % two_p);
        unit_root(two_p * q, -e) * g.data()[(l, m)]
    });
    GroupField::new(p, data).expect("shape follows params")
}

/// Restriction to the section `k ≡ -Q lm/(2P)`, undoing the phase of [`apply_s_inverse`].
pub fn apply_s(w: &GroupField) -> PhaseField {
    let p = *w.params();
    let (two_p, q) = (2 * p.p() as i64, p.q() as i64);
    let data = Array2::from_shape_fn((p.k(), p.m()), |(l, m)| {
        let e = q * ((l * m) as i64 % two_p);
        unit_root(two_p * q, e) * w.data()[(l, m, 0)]
    });
    PhaseField::new(p, data).expect("shape follows params")
}

/// `(U_g f)[n] = e^{2πi(k/Q - ml/(2P))} e^{2πi nm/M} f[n - lL]`.
pub fn shift_signal(f: &[Complex64], g: GroupElement, p: &GaborParams) -> Result<Vec<Complex64>> {
    let n = p.n();
    if f.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: f.len() });
    }
    let (two_p, q) = (2 * p.p() as i64, p.q() as i64);
    let phase = unit_root(two_p * q, two_p * g.k as i64 - q * (g.m * g.l) as i64);
    let shift = (g.l * p.l()) % n;
    Ok((0..n)
        .map(|i| phase * unit_root(p.m() as i64, (i * g.m) as i64) * f[(i + n - shift) % n])
        .collect())
}

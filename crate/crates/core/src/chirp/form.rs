use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian envelope width `b` and chirp rate `r` of
/// `f(ξ) = exp(-ξ²/(2b²)) exp(iπ r ξ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpParams {
    b: f64,
    r: f64,
}

impl ChirpParams {
    pub fn new(b: f64, r: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParams(format!("chirp needs b > 0 and finite r, got b = {b}, r = {r}")));
        }
        Ok(ChirpParams { b, r })
    }

    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Parameters of `ξ ↦ f(aξ)`.
    pub fn dilated(&self, a: f64) -> ChirpParams {
        ChirpParams { b: self.b / a, r: self.r * a * a }
    }
}

/// A chirp placed at `centre` and modulated by an integer-frequency carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpSignal {
    pub params: ChirpParams,
    pub centre: f64,
    pub carrier: f64,
}

impl ChirpSignal {
    pub fn centred(params: ChirpParams) -> Self {
        ChirpSignal { params, centre: 0.0, carrier: 0.0 }
    }

    pub fn value(&self, xi: f64) -> Complex64 {
        let (b, r) = (self.params.b, self.params.r);
        let x = xi - self.centre;
        Complex64::new(-x * x / (2.0 * b * b), PI * r * x * x + TAU * self.carrier * xi).exp()
    }

    /// Samples `f(n/N)` for `n = 0..N`.
    pub fn sample(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|i| self.value(i as f64 / n as f64)).collect()
    }

    /// Phase-space Gabor transform `e^{2πi pq} ∫ e^{-π(ξ-p)²/a²} f(ξ) e^{-2πi ξq} dξ`
    /// in closed form (a complex Gaussian integral).
    pub fn gabor(&self, a: f64, p: f64, q: f64) -> Complex64 {
        let (b, r, c) = (self.params.b, self.params.r, self.centre);
        let i = Complex64::i();
        let w = Complex64::new(-PI / (a * a) - 1.0 / (2.0 * b * b), PI * r);
        let u = Complex64::new(TAU * p / (a * a) + c / (b * b), 0.0) + i * TAU * (self.carrier - q - r * c);
        let t = Complex64::new(-PI * p * p / (a * a) - c * c / (2.0 * b * b), PI * r * c * c);
        let integral = (Complex64::new(PI, 0.0) / -w).sqrt() * (t - u * u / (4.0 * w)).exp();
        Complex64::cis(TAU * p * q) * integral
    }

    /// Transform of the 1-periodised signal, which is what a discrete transform
    /// of `sample(N)` approximates. Exact when `q` is an integer.
    pub fn gabor_periodic(&self, a: f64, p: f64, q: f64, images: i32) -> Complex64 {
        (-images..=images)
            .map(|j| {
                let shifted = ChirpSignal { centre: self.centre + j as f64, ..*self };
                // Moving the carrier with the envelope leaves a constant phase.
                shifted.gabor(a, p, q) * Complex64::cis(-TAU * self.carrier * j as f64)
            })
            .sum()
    }
}

/// `W(p, q, s) = prefactor · e^{-2πi(s + pq/2)} · e^{(p,q) B (p,q)ᵀ}` for the
/// centred chirp and window `e^{-πξ²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpGaborForm {
    pub b_re: Matrix2<f64>,
    pub b_im: Matrix2<f64>,
    pub prefactor: Complex64,
}

impl ChirpGaborForm {
    pub fn new(c: ChirpParams) -> Self {
        let w = Complex64::new(-PI - 1.0 / (2.0 * c.b * c.b), PI * c.r);
        let pi2_w = PI * PI / w;
        let i = Complex64::i();
        let pp = -PI - pi2_w;
        let pq = i * pi2_w + i * PI;
        let qq = pi2_w;
        ChirpGaborForm {
            b_re: Matrix2::new(pp.re, pq.re, pq.re, qq.re),
            b_im: Matrix2::new(pp.im, pq.im, pq.im, qq.im),
            // sqrt(π / -w), the Gaussian integral's normalisation.
            prefactor: (Complex64::new(PI, 0.0) / -w).sqrt(),
        }
    }

    pub fn quadratic(&self, p: f64, q: f64) -> Complex64 {
        let x = Vector2::new(p, q);
        Complex64::new(x.dot(&(self.b_re * x)), x.dot(&(self.b_im * x)))
    }

    pub fn evaluate(&self, p: f64, q: f64, s: f64) -> Complex64 {
        self.prefactor * Complex64::cis(-TAU * (s + 0.5 * p * q)) * self.quadratic(p, q).exp()
    }

    /// Value on the phase-space section `s = -pq/2`.
    pub fn phase_space(&self, p: f64, q: f64) -> Complex64 {
        self.prefactor * self.quadratic(p, q).exp()
    }
}

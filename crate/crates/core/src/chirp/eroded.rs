use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::chirp::form::{ChirpGaborForm, ChirpParams};
use crate::chirp::lagrange::{lagrange_multiplier, EigenFrame, LagrangeRoot};
use crate::error::{Error, Result};

/// Closed-form transform of a centred chirp with window `e^{-πξ²}` together
/// with its exact flat-kernel erosion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpOracle {
    pub params: ChirpParams,
    pub form: ChirpGaborForm,
    pub frame: EigenFrame,
}

impl ChirpOracle {
    pub fn new(params: ChirpParams) -> Result<Self> {
        let form = ChirpGaborForm::new(params);
        let frame = EigenFrame::new(&form.b_re)?;
        Ok(ChirpOracle { params, form, frame })
    }

    pub fn gabor(&self, p: f64, q: f64, s: f64) -> Complex64 {
        self.form.evaluate(p, q, s)
    }

    /// Transform eroded for time `t` by the disc kernel of radius `t`. The
    /// modulus is eroded, the phase of the unevolved transform is kept.
    pub fn eroded(&self, t: f64, p: f64, q: f64, s: f64) -> Result<Complex64> {
        if t == 0.0 {
            return Ok(self.gabor(p, q, s));
        }
        if !(t > 0.0) {
            return Err(Error::InvalidParams(format!("t must be non-negative, got {t}")));
        }
        let LagrangeRoot { value, .. } = lagrange_multiplier(&self.frame, p, q, t)?;
        let pref = self.form.prefactor;
        let im = self.form.quadratic(p, q).im;
        let phase = pref / pref.norm() * Complex64::cis(-TAU * (s + 0.5 * p * q) + im);
        Ok(pref.norm() * value.exp() * phase)
    }

    /// Window scale `a`: `Ξᵃ(p, q, s) = a · Ξ¹[f(a·)](p/a, aq, s)`, which erodes
    /// over discs in the coordinates `(p/a, aq)`.
    pub fn eroded_scaled(params: ChirpParams, a: f64, t: f64, p: f64, q: f64, s: f64) -> Result<Complex64> {
        let inner = ChirpOracle::new(params.dilated(a))?;
        Ok(inner.eroded(t, p / a, a * q, s)? * a)
    }

    /// Time at which the level set `|Ξ| = |prefactor|·e^{-|c|}` collapses onto the `k₁` axis.
    pub fn collapse_time(&self, c: f64) -> f64 {
        t_final(&self.frame, c)
    }
}

pub fn t_final(frame: &EigenFrame, c: f64) -> f64 {
    (c.abs() / frame.l2.abs()).sqrt()
}

/// Aspect ratio of the level curve at exponent `-|c|` after erosion for time `t`.
pub fn collapse_anisotropy(frame: &EigenFrame, t: f64, c: f64) -> Result<f64> {
    let t_fin = t_final(frame, c);
    if !(t >= 0.0 && t < t_fin) {
        return Err(Error::PastFinalTime { t, t_fin });
    }
    Ok(((c.abs() / frame.l1.abs()).sqrt() - t) / (t_fin - t))
}

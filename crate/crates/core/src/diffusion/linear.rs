use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PhaseField;

/// Horizontal diffusivities, the local-approximation constant, time and the
/// relative cutoff below which the Gaussian factor is dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub d11: f64,
    pub d22: f64,
    pub c_loc: f64,
    pub t: f64,
    pub truncation: f64,
}

impl SmoothingParams {
    pub fn new(d11: f64, d22: f64, c_loc: f64, t: f64, truncation: f64) -> Result<Self> {
        let sp = SmoothingParams { d11, d22, c_loc, t, truncation };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.d11) && ok(self.d22) && ok(self.c_loc) && ok(self.t) && ok(self.truncation)) {
            return Err(Error::InvalidParams(format!("smoothing parameters must be positive: {self:?}")));
        }
        Ok(())
    }

    fn gaussian_exponent(&self, dp: f64, dq: f64) -> f64 {
        (dp * dp / self.d11 + dq * dq / self.d22) * self.c_loc / (4.0 * self.t)
    }

    fn normalisation(&self) -> f64 {
        let (c, t) = (self.c_loc, self.t);
        let root = (self.d11 * self.d22).sqrt();
        (c / (4.0 * PI * t * root)) / (1.0 + 64.0 * self.d11 * self.d22 * t * t / (c * c))
    }
}

/// `k(p, q, p', q')` for the local heat-kernel approximation.
pub fn linear_kernel(sp: &SmoothingParams, p: f64, q: f64, p2: f64, q2: f64) -> Complex64 {
    let g = (-sp.gaussian_exponent(p - p2, q - q2)).exp();
    Complex64::cis(-PI * (p2 - p) * (q2 + q)) * (g * sp.normalisation())
}

/// Direct summation `Σ k(p, q, p', q') G(p', q') Δp Δq` over minimal-image
/// offsets whose Gaussian factor is at least `truncation`.
pub fn linear_smooth(g: &PhaseField, sp: &SmoothingParams) -> Result<PhaseField> {
    sp.validate()?;
    let p = *g.params();
    let (kk, mm) = (p.k() as i64, p.m() as i64);
    let (hp, hq) = (p.dp(), p.dq());
    let cutoff = -sp.truncation.ln();
    let offsets: Vec<(i64, i64, f64)> = (-(kk - 1) / 2..=kk / 2)
        .flat_map(|dl| (-(mm - 1) / 2..=mm / 2).map(move |dm| (dl, dm)))
        .filter_map(|(dl, dm)| {
            let e = sp.gaussian_exponent(dl as f64 * hp, dm as f64 * hq);
            (e <= cutoff).then(|| (dl, dm, (-e).exp() * sp.normalisation() * hp * hq))
        })
        .collect();
    let src = g.data();
    let rows: Vec<Vec<Complex64>> = (0..kk)
        .into_par_iter()
        .map(|l| {
            (0..mm)
                .map(|m| {
                    let q = m as f64 * hq;
                    offsets
                        .iter()
                        .map(|&(dl, dm, w)| {
                            let (dpp, dqq) = (dl as f64 * hp, dm as f64 * hq);
                            let v = src[((l + dl).rem_euclid(kk) as usize, (m + dm).rem_euclid(mm) as usize)];
                            Complex64::cis(-PI * dpp * (2.0 * q + dqq)) * v * w
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    let data = Array2::from_shape_fn((kk as usize, mm as usize), |(l, m)| rows[l][m]);
    Ok(g.with_data(data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{GaborParams, GroupElement};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_satisfies_left_invariance_relation() {
        let sp = SmoothingParams::new(0.7, 1.3, 1.0, 0.05, 1e-12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let v: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let (p, q, p2, q2, pb, qb) = (v[0], v[1], v[2], v[3], v[4], v[5]);
            let lhs = linear_kernel(&sp, p, q, p2, q2);
            let rhs = Complex64::cis(2.0 * PI * qb * (p2 - p)) * linear_kernel(&sp, p + pb, q + qb, p2 + pb, q2 + qb);
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn small_time_is_a_scalar_multiple() {
        let p = GaborParams::square(32, 64, 0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let data = Array2::from_shape_fn((32, 32), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let g = PhaseField::new(p, data).unwrap();
        let sp = SmoothingParams::new(1e-3, 1.0, 1.0, 1e-6, 1e-12).unwrap();
        let out = linear_smooth(&g, &sp).unwrap();
        let scale = sp.normalisation() * p.dp() * p.dq();
        for (x, y) in out.data().iter().zip(g.data().iter()) {
            assert!((x - y * scale).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn commutes_with_translation() {
        let p = GaborParams::new(64, 32, 32, 32, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = Array2::from_shape_fn((32, 32), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let g = PhaseField::new(p, data).unwrap();
        let sp = SmoothingParams::new(1e-3, 1.0, 1.0, 0.5, 1e-6).unwrap();
        for _ in 0..5 {
            let h = GroupElement::new(rng.gen_range(0..32), rng.gen_range(0..32), rng.gen_range(0..32), &p);
            let lhs = linear_smooth(&g.translate(h), &sp).unwrap();
            let rhs = linear_smooth(&g, &sp).unwrap().translate(h);
            assert!(lhs.max_abs_diff(&rhs) < 1e-10 * rhs.data().iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
}

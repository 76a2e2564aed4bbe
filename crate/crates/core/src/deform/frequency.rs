use nalgebra::Vector2;
use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PhaseField2d;

/// Frequencies closer to the origin than this many bins are ignored.
pub const DEFAULT_DC_MASK: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Refinement {
    Argmax,
    /// Modulus-weighted mean over the bins within two of the argmax.
    #[default]
    CentreOfMass,
    /// Per-axis parabola through the logarithm of the modulus at the argmax
    /// and its neighbours; exact for Gaussian peaks.
    LogParabolic,
}

impl std::str::FromStr for Refinement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "argmax" => Ok(Refinement::Argmax),
            "center-of-mass" | "centre-of-mass" | "com" => Ok(Refinement::CentreOfMass),
            "log-parabolic" | "parabolic" => Ok(Refinement::LogParabolic),
            other => Err(Error::InvalidParams(format!("unknown refinement {other:?}"))),
        }
    }
}

/// Dominant local frequency per analysis position, in cycles per image length.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyField {
    pub q: Array2<Vector2<f64>>,
    pub valid: Array2<bool>,
    /// Pixels between neighbouring analysis positions along each axis.
    pub spacing: [f64; 2],
    /// Physical size of one frequency bin along each axis.
    pub bin: [f64; 2],
}

impl FrequencyField {
    pub fn dim(&self) -> (usize, usize) {
        self.q.dim()
    }
}

/// Representative of `±q` in the upper half-plane `q₂ > 0`, or `q₂ = 0, q₁ ≥ 0`.
pub fn canonical(q: Vector2<f64>) -> Vector2<f64> {
    if q.y > 0.0 || (q.y == 0.0 && q.x >= 0.0) {
        q
    } else {
        -q
    }
}

fn wrap(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

pub fn frequency_field(g: &PhaseField2d, dc_mask_radius: f64, refine: Refinement) -> Result<FrequencyField> {
    if !(dc_mask_radius.is_finite() && dc_mask_radius >= 0.0) {
        return Err(Error::InvalidParams(format!("mask radius must be non-negative, got {dc_mask_radius}")));
    }
    let [p0, p1] = *g.params();
    let modulus = g.modulus();
    let (k0, k1) = (p0.k(), p1.k());
    let bin = [p0.dq(), p1.dq()];
    let cells: Vec<Result<(Vector2<f64>, bool)>> = (0..k0 * k1)
        .into_par_iter()
        .map(|i| {
            let (l1, l2) = (i / k1, i % k1);
            let slice = modulus.slice(ndarray::s![l1, l2, .., ..]);
            let (peak, value) = half_plane_argmax(&slice, dc_mask_radius).ok_or(Error::EmptyAfterMask(l1, l2))?;
            if value == 0.0 {
                return Ok((Vector2::zeros(), false));
            }
            let offset = match refine {
                Refinement::Argmax => Vector2::zeros(),
                Refinement::CentreOfMass => centre_of_mass(&slice, peak, 2),
                Refinement::LogParabolic => log_parabolic(&slice, peak),
            };
            let bins = Vector2::new(peak.0 as f64 + offset.x, peak.1 as f64 + offset.y);
            Ok((canonical(Vector2::new(bins.x * bin[0], bins.y * bin[1])), true))
        })
        .collect();
    let mut q = Array2::from_elem((k0, k1), Vector2::zeros());
    let mut valid = Array2::from_elem((k0, k1), false);
    for (i, cell) in cells.into_iter().enumerate() {
        let (v, ok) = cell?;
        q[(i / k1, i % k1)] = v;
        valid[(i / k1, i % k1)] = ok;
    }
    Ok(FrequencyField { q, valid, spacing: [p0.l() as f64, p1.l() as f64], bin })
}

/// Argmax over unmasked bins of the canonical half-plane, as signed bin indices.
fn half_plane_argmax(slice: &ArrayView2<f64>, radius: f64) -> Option<((i64, i64), f64)> {
    let (m0, m1) = slice.dim();
    let mut best: Option<((i64, i64), f64)> = None;
    for ((a, b), &v) in slice.indexed_iter() {
        let (x, y) = (wrap(a, m0), wrap(b, m1));
        if ((x * x + y * y) as f64).sqrt() < radius || !(y > 0 || (y == 0 && x >= 0)) {
            continue;
        }
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some(((x, y), v));
        }
    }
    best
}

fn at(slice: &ArrayView2<f64>, x: i64, y: i64) -> f64 {
    let (m0, m1) = slice.dim();
    slice[(x.rem_euclid(m0 as i64) as usize, y.rem_euclid(m1 as i64) as usize)]
}

fn centre_of_mass(slice: &ArrayView2<f64>, peak: (i64, i64), radius: i64) -> Vector2<f64> {
    let (mut w, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for dx in -radius..=radius {
        for dy in -radius..=radius {
            let v = at(slice, peak.0 + dx, peak.1 + dy);
            w += v;
            sx += v * dx as f64;
            sy += v * dy as f64;
        }
    }
    if w > 0.0 {
        Vector2::new(sx / w, sy / w)
    } else {
        Vector2::zeros()
    }
}

fn log_parabolic(slice: &ArrayView2<f64>, peak: (i64, i64)) -> Vector2<f64> {
    let vertex = |lo: f64, mid: f64, hi: f64| {
        if lo <= 0.0 || mid <= 0.0 || hi <= 0.0 {
            return 0.0;
        }
        let (a, b, c) = (lo.ln(), mid.ln(), hi.ln());
        let curv = a - 2.0 * b + c;
        if curv >= 0.0 {
            0.0
        } else {
            (0.5 * (a - c) / curv).clamp(-0.5, 0.5)
        }
    };
    let (x, y) = peak;
    let mid = at(slice, x, y);
    Vector2::new(
        vertex(at(slice, x - 1, y), mid, at(slice, x + 1, y)),
        vertex(at(slice, x, y - 1), mid, at(slice, x, y + 1)),
    )
}

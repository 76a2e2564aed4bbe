use std::f64::consts::TAU;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::net::PolarGrid;
use crate::error::{Error, Result};

/// Tagged images `images[t][i]` for frame `t` and tag direction `directions[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TagStack {
    pub images: Vec<Vec<Array2<f64>>>,
    pub directions: Vec<f64>,
}

impl TagStack {
    pub fn new(images: Vec<Vec<Array2<f64>>>, directions: Vec<f64>) -> Result<Self> {
        if directions.len() < 2 {
            return Err(Error::InvalidParams("need at least two tag directions".into()));
        }
        let independent = directions
            .iter()
            .enumerate()
            .any(|(i, a)| directions[i + 1..].iter().any(|b| (a - b).sin().abs() > 1e-9));
        if !independent {
            return Err(Error::InvalidParams("tag directions must span the plane".into()));
        }
        let dim = images.first().and_then(|f| f.first()).map(|i| i.dim());
        if images.iter().any(|f| f.len() != directions.len() || f.iter().any(|i| Some(i.dim()) != dim)) {
            return Err(Error::ShapeMismatch("every frame needs one image per direction, all of one size".into()));
        }
        Ok(TagStack { images, directions })
    }

    pub fn frames(&self) -> usize {
        self.images.len()
    }
}

/// A radial deformation about `centre` that reaches its full extent at the
/// last frame. With `ρ = r/R`, `τ = t/(frames-1)` and a cosine cutoff `w`
/// that falls from 1 at `support[0]` to 0 at `support[1]`, a point at radius
/// `r` and angle `φ` moves to radius `r + τ·w(r)·r·(scale + scale_slope·ρ)`
/// and angle `φ + τ·w(r)·(rotation + rotation_slope·ρ)`. Outside the support
/// the image is static, so periodic analysis windows see no seam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub size: usize,
    pub centre: [f64; 2],
    pub frames: usize,
    /// Tag wave vectors in cycles per image; integer entries keep the tags
    /// periodic.
    pub wave_vectors: Vec<[f64; 2]>,
    /// Tag contrast is multiplied by this factor every frame.
    pub fading: f64,
    pub reference_radius: f64,
    pub support: [f64; 2],
    pub scale: f64,
    pub scale_slope: f64,
    pub rotation: f64,
    pub rotation_slope: f64,
}

impl PhantomSpec {
    /// 64×64, four tag directions 45° apart, ten frames, contraction with a
    /// radially varying twist and strong fading.
    pub fn standard() -> Self {
        PhantomSpec {
            size: 64,
            centre: [32.0, 32.0],
            frames: 10,
            wave_vectors: vec![[8.0, 0.0], [6.0, 6.0], [0.0, 8.0], [-6.0, 6.0]],
            fading: 0.85,
            reference_radius: 24.0,
            support: [22.0, 32.0],
            scale: -0.06,
            scale_slope: 0.04,
            rotation: 0.125,
            rotation_slope: -0.075,
        }
    }

    pub fn static_with_fading(fading: f64) -> Self {
        PhantomSpec { scale: 0.0, scale_slope: 0.0, rotation: 0.0, rotation_slope: 0.0, fading, ..Self::standard() }
    }

    pub fn directions(&self) -> Vec<f64> {
        self.wave_vectors.iter().map(|k| k[1].atan2(k[0])).collect()
    }

    fn tau(&self, t: usize) -> f64 {
        if self.frames > 1 {
            t as f64 / (self.frames - 1) as f64
        } else {
            0.0
        }
    }

    fn cutoff(&self, r: f64) -> f64 {
        let [inner, outer] = self.support;
        if r <= inner {
            1.0
        } else if r >= outer {
            0.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * (r - inner) / (outer - inner)).cos())
        }
    }

    fn radial(&self, r0: f64, tau: f64) -> f64 {
        let rho = r0 / self.reference_radius;
        r0 + tau * self.cutoff(r0) * r0 * (self.scale + self.scale_slope * rho)
    }

    fn twist(&self, r0: f64, tau: f64) -> f64 {
        tau * self.cutoff(r0) * (self.rotation + self.rotation_slope * r0 / self.reference_radius)
    }

    /// Material point at frame 0 to its position at frame `t`.
    pub fn forward(&self, x0: [f64; 2], t: usize) -> [f64; 2] {
        let tau = self.tau(t);
        let (dx, dy) = (x0[0] - self.centre[0], x0[1] - self.centre[1]);
        let (r0, phi0) = (dx.hypot(dy), dy.atan2(dx));
        let r = self.radial(r0, tau);
        let phi = phi0 + self.twist(r0, tau);
        [self.centre[0] + r * phi.cos(), self.centre[1] + r * phi.sin()]
    }

    /// Position at frame `t` back to the material point at frame 0.
    pub fn inverse(&self, x: [f64; 2], t: usize) -> [f64; 2] {
        let tau = self.tau(t);
        let (dx, dy) = (x[0] - self.centre[0], x[1] - self.centre[1]);
        let (r, phi) = (dx.hypot(dy), dy.atan2(dx));
        // The radial map is increasing and fixes every radius past the support.
        let (mut lo, mut hi) = (0.0, r.max(self.support[1]));
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.radial(mid, tau) < r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r0 = 0.5 * (lo + hi);
        let phi0 = phi - self.twist(r0, tau);
        [self.centre[0] + r0 * phi0.cos(), self.centre[1] + r0 * phi0.sin()]
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.size == 0 || self.frames == 0 || !(self.reference_radius > 0.0) {
            return bad("phantom needs positive size, frames and reference radius");
        }
        if !(self.fading > 0.0) {
            return bad("fading factor must be positive");
        }
        if !(self.support[0] >= 0.0 && self.support[1] > self.support[0]) {
            return bad("support must be an increasing pair of radii");
        }
        if self.wave_vectors.iter().any(|k| k[0] == 0.0 && k[1] == 0.0) {
            return bad("tag wave vectors must be non-zero");
        }
        // The radial map must stay increasing at full extent.
        let steps = 4096;
        let h = self.support[1] / steps as f64;
        if (0..steps).any(|i| self.radial((i + 1) as f64 * h, 1.0) <= self.radial(i as f64 * h, 1.0)) {
            return bad("radial map folds over inside the support");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    pub stack: TagStack,
    /// Exact material grid `[t][r][j]`.
    pub truth: Vec<Vec<Vec<[f64; 2]>>>,
}

impl Phantom {
    pub fn seed(&self) -> Vec<[f64; 2]> {
        self.truth.iter().map(|f| f[0][0]).collect()
    }
}

/// Renders `fadeᵗ·(1 + cos(2π k·Φ_t⁻¹(x)/size))/2` per wave vector `k` and
/// tracks the grid exactly.
pub fn make_phantom(spec: &PhantomSpec, grid: &PolarGrid) -> Result<Phantom> {
    spec.validate()?;
    let n = spec.size;
    let images = (0..spec.frames)
        .map(|t| {
            let material = Array2::from_shape_fn((n, n), |(i, j)| spec.inverse([i as f64, j as f64], t));
            let contrast = spec.fading.powi(t as i32);
            spec.wave_vectors
                .iter()
                .map(|k| {
                    let scale = TAU / n as f64;
                    material.mapv(|x| contrast * 0.5 * (1.0 + (scale * (k[0] * x[0] + k[1] * x[1])).cos()))
                })
                .collect()
        })
        .collect();
    let stack = TagStack::new(images, spec.directions())?;
    let grid0 = grid.points();
    let truth = (0..spec.frames)
        .map(|t| grid0.iter().map(|ring| ring.iter().map(|&x| spec.forward(x, t)).collect()).collect())
        .collect();
    Ok(Phantom { stack, truth })
}

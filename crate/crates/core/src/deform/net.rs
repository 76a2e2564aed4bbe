use std::f64::consts::TAU;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::gradient::DeformationGradientField;
use crate::error::{Error, Result};

/// Polar grid of `R` closed contours (outermost first) with `J` points each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub centre: [f64; 2],
    pub radii: Vec<f64>,
    pub points_per_ring: usize,
}

impl PolarGrid {
    /// `rings` contours from `outer` inward with spacing `step`.
    pub fn inward(centre: [f64; 2], outer: f64, step: f64, rings: usize, points_per_ring: usize) -> Self {
        PolarGrid { centre, radii: (0..rings).map(|r| outer - step * r as f64).collect(), points_per_ring }
    }

    /// `x[r][j]`, starting at angle 0 and running counter-clockwise.
    pub fn points(&self) -> Vec<Vec<[f64; 2]>> {
        self.radii
            .iter()
            .map(|&rad| {
                (0..self.points_per_ring)
                    .map(|j| {
                        let th = TAU * j as f64 / self.points_per_ring as f64;
                        [self.centre[0] + rad * th.cos(), self.centre[1] + rad * th.sin()]
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetPoint {
    pub x: [f64; 2],
    /// True when no valid gradient was available at this point and the last
    /// valid one was reused.
    pub masked: bool,
}

/// Net points indexed `[t][r][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationNet {
    pub frames: Vec<Vec<Vec<NetPoint>>>,
}

impl DeformationNet {
    pub fn positions(&self, t: usize) -> Vec<Vec<[f64; 2]>> {
        self.frames[t].iter().map(|ring| ring.iter().map(|p| p.x).collect()).collect()
    }

    /// Mean Euclidean distance to reference points at frame `t`.
    pub fn mean_error(&self, t: usize, truth: &[Vec<[f64; 2]>]) -> f64 {
        let mut sum = 0.0;
        let mut count = 0;
        for (ring, gt) in self.frames[t].iter().zip(truth) {
            for (p, q) in ring.iter().zip(gt) {
                sum += (p.x[0] - q[0]).hypot(p.x[1] - q[1]);
                count += 1;
            }
        }
        sum / count.max(1) as f64
    }
}

fn step(x: [f64; 2], d: &Matrix2<f64>, from: [f64; 2], to: [f64; 2]) -> [f64; 2] {
    let v = d * Vector2::new(to[0] - from[0], to[1] - from[1]);
    [x[0] + v.x, x[1] + v.y]
}

/// Propagates the frame-0 grid: for every frame the outer contour is built
/// point by point from the seed, then each contour inward from the one
/// outside it. `gradients[t - 1]` maps frame `t - 1` to frame `t`.
pub fn deformation_net(
    gradients: &[DeformationGradientField],
    seed: &[[f64; 2]],
    grid0: &[Vec<[f64; 2]>],
) -> Result<DeformationNet> {
    let frames = seed.len();
    if frames == 0 || gradients.len() + 1 != frames {
        return Err(Error::InvalidParams(format!(
            "need one seed point per frame and one gradient field per step, got {frames} seeds and {} fields",
            gradients.len()
        )));
    }
    let rings = grid0.len();
    let per_ring = grid0.first().map_or(0, Vec::len);
    if rings == 0 || per_ring == 0 || grid0.iter().any(|r| r.len() != per_ring) {
        return Err(Error::InvalidParams("initial grid must be a non-empty R × J array".into()));
    }
    let mut out = vec![grid0.iter().map(|r| r.iter().map(|&x| NetPoint { x, masked: false }).collect()).collect::<Vec<Vec<_>>>()];
    for t in 1..frames {
        let field = &gradients[t - 1];
        let prev = &out[t - 1];
        let mut last = Matrix2::identity();
        let mut lookup = |x: [f64; 2]| match field.sample(x) {
            Some(d) => {
                last = d;
                (d, false)
            }
            None => (last, true),
        };
        let mut cur = vec![vec![NetPoint { x: [0.0; 2], masked: false }; per_ring]; rings];
        cur[0][0] = NetPoint { x: seed[t], masked: false };
        for j in 0..per_ring - 1 {
            let here = cur[0][j].x;
            let (d, masked) = lookup(here);
            cur[0][j + 1] = NetPoint { x: step(here, &d, prev[0][j].x, prev[0][j + 1].x), masked };
        }
        for r in 0..rings - 1 {
            for j in 0..per_ring {
                let here = cur[r][j].x;
                let (d, masked) = lookup(here);
                cur[r + 1][j] = NetPoint { x: step(here, &d, prev[r][j].x, prev[r + 1][j].x), masked };
            }
        }
        out.push(cur);
    }
    Ok(DeformationNet { frames: out })
}

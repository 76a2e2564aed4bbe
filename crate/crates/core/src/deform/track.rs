use serde::{Deserialize, Serialize};

use super::frequency::{frequency_field, FrequencyField, Refinement, DEFAULT_DC_MASK};
use super::gabor2d::{reassign2d, Gabor2d};
use super::gradient::{deformation_gradient, DeformationGradientField, DEFAULT_MAX_CONDITION};
use super::net::{deformation_net, DeformationNet};
use super::phantom::TagStack;
use crate::error::{Error, Result};
use crate::heisenberg::GaborParams;
use crate::reassign::ReassignParams;
use crate::window::WindowKind;

/// Settings for turning a tag stack into per-frame gradient fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingParams {
    pub gabor: [GaborParams; 2],
    pub window: WindowKind,
    /// Optional erosion applied before the frequency search.
    pub reassign: Option<ReassignParams>,
    /// Subtract each image's mean before analysis so the zero-frequency
    /// lobe cannot leak past the mask.
    pub remove_mean: bool,
    pub dc_mask: f64,
    pub refine: Refinement,
    pub max_condition: f64,
}

impl TrackingParams {
    pub fn new(gabor: [GaborParams; 2]) -> Self {
        TrackingParams {
            gabor,
            window: WindowKind::SampledGaussian,
            reassign: None,
            remove_mean: true,
            dc_mask: DEFAULT_DC_MASK,
            refine: Refinement::default(),
            max_condition: DEFAULT_MAX_CONDITION,
        }
    }

    /// Per-axis parameters for a 64×64 stack: `K = 32`, `M = Q = 64`, a
    /// Gaussian of four pixels standard deviation and log-parabolic peaks.
    pub fn standard64() -> Result<Self> {
        let a = 4.0 * std::f64::consts::TAU.sqrt() / 64.0;
        let p = GaborParams::new(64, 32, 64, 64, a)?;
        Ok(TrackingParams { refine: Refinement::LogParabolic, ..Self::new([p, p]) })
    }
}

#[derive(Debug, Clone)]
pub struct Tracking {
    /// `frequencies[t][i]` for frame `t` and direction `i`.
    pub frequencies: Vec<Vec<FrequencyField>>,
    /// `gradients[t - 1]` maps frame `t - 1` to frame `t`.
    pub gradients: Vec<DeformationGradientField>,
}

impl Tracking {
    pub fn net(&self, seed: &[[f64; 2]], grid0: &[Vec<[f64; 2]>]) -> Result<DeformationNet> {
        deformation_net(&self.gradients, seed, grid0)
    }
}

pub fn frequency_stack(stack: &TagStack, tp: &TrackingParams) -> Result<Vec<Vec<FrequencyField>>> {
    let gabor = Gabor2d::new(tp.gabor, tp.window)?;
    stack
        .images
        .iter()
        .map(|frame| {
            frame
                .iter()
                .map(|img| {
                    let mut g = if tp.remove_mean {
                        let mean = img.mean().unwrap_or(0.0);
                        gabor.analyze(&img.mapv(|v| v - mean))?
                    } else {
                        gabor.analyze(img)?
                    };
                    if let Some(rp) = &tp.reassign {
                        g = reassign2d(&g, rp)?;
                    }
                    frequency_field(&g, tp.dc_mask, tp.refine)
                })
                .collect()
        })
        .collect()
}

pub fn track_stack(stack: &TagStack, tp: &TrackingParams) -> Result<Tracking> {
    if stack.frames() == 0 {
        return Err(Error::InvalidParams("tag stack has no frames".into()));
    }
    let frequencies = frequency_stack(stack, tp)?;
    let gradients = frequencies
        .windows(2)
        .map(|w| deformation_gradient(&w[1], &w[0], tp.max_condition))
        .collect::<Result<_>>()?;
    Ok(Tracking { frequencies, gradients })
}

//! Left-invariant diffusion on phase space: adaptive coherence-enhancing
//! diffusion and linear smoothing with the twisted heat-kernel approximation.

mod ced;
mod linear;
mod tensor;

pub use ced::{ced_evolve, ced_evolve_group, cfl_bound};
pub use linear::{linear_kernel, linear_smooth, SmoothingParams};
pub use tensor::{auxiliary_matrix, conductivity, conductivity_field, gaussian_smooth, TensorField};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::GaborParams;

/// How the auxiliary matrix is built from the initial modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adaptivity {
    #[default]
    Hessian,
    StructureTensor,
}

impl std::str::FromStr for Adaptivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hessian" => Ok(Adaptivity::Hessian),
            "structure-tensor" | "structure" => Ok(Adaptivity::StructureTensor),
            other => Err(Error::InvalidParams(format!("unknown adaptivity {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    pub beta: f64,
    pub eps: f64,
    pub c: f64,
    /// Pre-smoothing scale in grid cells.
    pub sigma: f64,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub adaptivity: Adaptivity,
    /// Rebuild the conductivity from the current modulus every step.
    #[serde(default)]
    pub readapt: bool,
}

impl DiffusionParams {
    pub fn new(beta: f64, eps: f64, c: f64, sigma: f64, dt: f64, t_final: f64) -> Result<Self> {
        let dp = DiffusionParams { beta, eps, c, sigma, dt, t_final, adaptivity: Adaptivity::Hessian, readapt: false };
        dp.validate()?;
        Ok(dp)
    }

    /// `β` making one spatial and one frequency step equally long in the metric.
    pub fn default_beta(p: &GaborParams) -> f64 {
        (p.dq() / p.dp()).sqrt()
    }

    pub fn with_adaptivity(self, adaptivity: Adaptivity) -> Self {
        DiffusionParams { adaptivity, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.beta) {
            return Err(Error::InvalidParams(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParams(format!("eps must lie in (0, 1], got {}", self.eps)));
        }
        if !(self.c.is_finite() && self.c >= 0.0) || !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParams(format!("c and sigma must be non-negative, got {} and {}", self.c, self.sigma)));
        }
        if !positive(self.dt) || !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidParams(format!("need dt > 0 and t_final >= 0, got {} and {}", self.dt, self.t_final)));
        }
        Ok(())
    }

    /// Grid steps in the balanced coordinates `(β²p, q)`.
    pub fn steps(&self, p: &GaborParams) -> (f64, f64) {
        (self.beta * self.beta * p.dp(), p.dq())
    }
}

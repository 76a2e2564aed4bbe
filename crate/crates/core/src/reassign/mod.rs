//! Differential reassignment of Gabor coefficients: explicit upwind
//! convection and phase-preserving morphological erosion.

mod erosion;
mod metrics;
mod upwind;

pub use erosion::{erode_grid, erode_modulus, erode_quadratic_axis, erosion_reassign, ErosionGrid};
pub use metrics::{energy_rescale, reconstruction_errors, ReconstructionErrors};
pub use upwind::{upwind_reassign, UpwindOutcome, UpwindScheme};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PhaseField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Upwind,
    Erosion,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upwind" => Ok(Method::Upwind),
            "erosion" => Ok(Method::Erosion),
            other => Err(Error::InvalidParams(format!("unknown reassignment method {other:?}"))),
        }
    }
}

/// Multiplier applied to the transport speed: `1` or the current modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mobility {
    #[default]
    Unit,
    Modulus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReassignParams {
    pub t_final: f64,
    pub dt: f64,
    pub a: f64,
    pub eta: f64,
    pub method: Method,
    #[serde(default)]
    pub mobility: Mobility,
    #[serde(default)]
    pub scheme: UpwindScheme,
}

impl ReassignParams {
    pub fn erosion(t_final: f64, a: f64, eta: f64) -> Result<Self> {
        let rp = ReassignParams {
            t_final,
            dt: t_final,
            a,
            eta,
            method: Method::Erosion,
            mobility: Mobility::Unit,
            scheme: UpwindScheme::default(),
        };
        rp.validate()?;
        Ok(rp)
    }

    pub fn upwind(t_final: f64, dt: f64, a: f64) -> Result<Self> {
        let rp = ReassignParams {
            t_final,
            dt,
            a,
            eta: 1.0,
            method: Method::Upwind,
            mobility: Mobility::Unit,
            scheme: UpwindScheme::default(),
        };
        rp.validate()?;
        Ok(rp)
    }

    pub fn with_scheme(self, scheme: UpwindScheme) -> Self {
        ReassignParams { scheme, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return bad(format!("t_final must be finite and non-negative, got {}", self.t_final));
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return bad(format!("window scale must be positive, got {}", self.a));
        }
        if !(self.eta.is_finite() && self.eta >= 0.5) {
            return Err(Error::EtaOutOfRange(self.eta));
        }
        if self.method == Method::Upwind {
            if !(self.dt.is_finite() && self.dt > 0.0) {
                return bad(format!("dt must be positive, got {}", self.dt));
            }
            if self.t_final > 0.0 && self.dt > self.t_final {
                return bad(format!("dt = {} exceeds t_final = {}", self.dt, self.t_final));
            }
            if self.mobility != Mobility::Unit {
                return bad("the upwind scheme is defined for unit mobility only".into());
            }
        }
        Ok(())
    }
}

/// Result of either reassignment method.
#[derive(Debug, Clone)]
pub struct Reassigned {
    pub field: PhaseField,
    /// Cells whose transport speed was zeroed because the modulus vanished.
    pub frozen_cells: usize,
    pub steps: usize,
}

/// Runs the method selected in `rp`.
pub fn reassign(g: &PhaseField, rp: &ReassignParams) -> Result<Reassigned> {
    rp.validate()?;
    match rp.method {
        Method::Upwind => {
            let out = upwind_reassign(g, rp)?;
            Ok(Reassigned { field: out.field, frozen_cells: out.frozen_cells, steps: out.steps })
        }
        Method::Erosion => Ok(Reassigned { field: erosion_reassign(g, rp)?, frozen_cells: 0, steps: 1 }),
    }
}

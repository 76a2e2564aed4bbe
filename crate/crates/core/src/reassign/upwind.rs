//! Explicit upwind convection with left-invariant differences.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Mobility, ReassignParams};
use crate::calculus::{diff_phase, Axis, Direction};
use crate::error::{Error, Result};
use crate::field::PhaseField;

/// Below this modulus the logarithm is not taken and transport stops.
const FROZEN_MODULUS: f64 = 1e-300;

/// Growth of the sup norm in one step that counts as a blow-up.
const UNSTABLE_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpwindScheme {
    /// `W_t = v₁A₁W + v₂A₂W` with `v = -(a², a⁻²)∇log|W(0)|` in physical units
    /// and differences taken on the upwind side of each velocity.
    #[default]
    Consistent,
    /// The literal tabulated update: velocities `-(aK/2)`, `-(aM/2)` times the
    /// raw centred increments, the positive part paired with the backward
    /// difference, and extra step factors `K·Δt`, `M·Δt`.
    Published,
}

#[derive(Debug, Clone)]
pub struct UpwindOutcome {
    pub field: PhaseField,
    pub frozen_cells: usize,
    pub steps: usize,
}

struct Velocities {
    v1: Array2<f64>,
    v2: Array2<f64>,
    frozen: usize,
}

fn velocities(g: &PhaseField, rp: &ReassignParams) -> Velocities {
    let p = *g.params();
    let (kk, mm) = (p.k(), p.m());
    let modulus = g.modulus();
    let log = modulus.mapv(|r| if r < FROZEN_MODULUS { f64::NAN } else { r.ln() });
    let a = rp.a;
    let (s1, s2) = match rp.scheme {
        UpwindScheme::Consistent => (-a * a * kk as f64 / 2.0, -(mm as f64) / (2.0 * p.n() as f64 * a * a)),
        UpwindScheme::Published => (-a * kk as f64 / 2.0, -a * mm as f64 / 2.0),
    };
    let mut frozen = 0;
    let mut v1 = Array2::zeros((kk, mm));
    let mut v2 = Array2::zeros((kk, mm));
    for l in 0..kk {
        for m in 0..mm {
            let d1 = log[((l + 1) % kk, m)] - log[((l + kk - 1) % kk, m)];
            let d2 = log[(l, (m + 1) % mm)] - log[(l, (m + mm - 1) % mm)];
            if !(d1.is_finite() && d2.is_finite()) || modulus[(l, m)] < FROZEN_MODULUS {
                frozen += 1;
                continue;
            }
            v1[(l, m)] = s1 * d1;
            v2[(l, m)] = s2 * d2;
        }
    }
    Velocities { v1, v2, frozen }
}

fn sup(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Runs `round(t_final/dt)` explicit steps. Velocities come from the initial
/// modulus; every difference is read at the previous time level.
pub fn upwind_reassign(g: &PhaseField, rp: &ReassignParams) -> Result<UpwindOutcome> {
    if rp.mobility != Mobility::Unit {
        return Err(Error::InvalidParams("the upwind scheme is defined for unit mobility only".into()));
    }
    if !(rp.dt.is_finite() && rp.dt > 0.0) || !(rp.t_final.is_finite() && rp.t_final >= 0.0) {
        return Err(Error::InvalidParams(format!("need dt > 0 and t_final >= 0, got {} and {}", rp.dt, rp.t_final)));
    }
    let steps = (rp.t_final / rp.dt).round() as usize;
    let vel = velocities(g, rp);
    let p = *g.params();
    let (f1, f2) = match rp.scheme {
        UpwindScheme::Consistent => (rp.dt, rp.dt),
        UpwindScheme::Published => (p.k() as f64 * rp.dt, p.m() as f64 * rp.dt),
    };
    let mut w = g.clone();
    for step in 0..steps {
        let a1f = diff_phase(&w, Axis::Spatial, Direction::Forward);
        let a1b = diff_phase(&w, Axis::Spatial, Direction::Backward);
        let a2f = diff_phase(&w, Axis::Frequency, Direction::Forward);
        let a2b = diff_phase(&w, Axis::Frequency, Direction::Backward);
        let (up1, down1, up2, down2) = match rp.scheme {
            UpwindScheme::Consistent => (&a1f, &a1b, &a2f, &a2b),
            UpwindScheme::Published => (&a1b, &a1f, &a2b, &a2f),
        };
        let before = sup(w.data());
        let (u1, d1, u2, d2) = (up1.data(), down1.data(), up2.data(), down2.data());
        let next = Array2::from_shape_fn(w.data().dim(), |i| {
            let (v1, v2) = (vel.v1[i], vel.v2[i]);
            w.data()[i] + f1 * (v1.max(0.0) * u1[i] + v1.min(0.0) * d1[i]) + f2 * (v2.max(0.0) * u2[i] + v2.min(0.0) * d2[i])
        });
        let after = sup(&next);
        if !after.is_finite() || after > UNSTABLE_GROWTH * before {
            return Err(Error::UnstableStep { step: step + 1, before, after });
        }
        w = w.with_data(next);
    }
    Ok(UpwindOutcome { field: w, frozen_cells: vel.frozen, steps })
}

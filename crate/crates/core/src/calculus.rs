//! Left-invariant finite differences on phase space and on the group quotient.

use ndarray::{Array2, Array3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GroupField, PhaseField};
use crate::heisenberg::GroupElement;
use crate::unit_root;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Spatial,
    Frequency,
    Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// Balance between position and frequency in the left-invariant metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    beta: f64,
}

impl MetricParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParams(format!("beta must be positive, got {beta}")));
        }
        Ok(MetricParams { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Scalar by which the phase-axis difference multiplies every coefficient.
pub fn phase_multiplier(q: usize, dir: Direction) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let q_f = q as f64;
    match dir {
        Direction::Forward => q_f * (unit_root(q as i64, -1) - one),
        Direction::Backward => q_f * (one - unit_root(q as i64, 1)),
    }
}

/// Forward: `K(e^{-2πi m/P} G[l+1, m] - G)`, `(M/N)(G[l, m+1] - G)`, `Q(e^{-2πi/Q} - 1) G`.
/// Backward versions mirror these; all indices wrap periodically.
pub fn diff_phase(g: &PhaseField, axis: Axis, dir: Direction) -> PhaseField {
    let p = *g.params();
    let (kk, mm) = (p.k(), p.m());
    let d = g.data();
    let pp = p.p() as i64;
    let data = match axis {
        Axis::Spatial => {
            let scale = kk as f64;
            Array2::from_shape_fn((kk, mm), |(l, m)| match dir {
                Direction::Forward => scale * (unit_root(pp, -(m as i64)) * d[((l + 1) % kk, m)] - d[(l, m)]),
                Direction::Backward => scale * (d[(l, m)] - unit_root(pp, m as i64) * d[((l + kk - 1) % kk, m)]),
            })
        }
        Axis::Frequency => {
            let scale = mm as f64 / p.n() as f64;
            Array2::from_shape_fn((kk, mm), |(l, m)| match dir {
                Direction::Forward => scale * (d[(l, (m + 1) % mm)] - d[(l, m)]),
                Direction::Backward => scale * (d[(l, m)] - d[(l, (m + mm - 1) % mm)]),
            })
        }
        Axis::Phase => {
            let c = phase_multiplier(p.q(), dir);
            d.mapv(|z| c * z)
        }
    };
    g.with_data(data)
}

/// Average of the forward and backward differences.
pub fn diff_centred(g: &PhaseField, axis: Axis) -> PhaseField {
    let f = diff_phase(g, axis, Direction::Forward);
    let b = diff_phase(g, axis, Direction::Backward);
    g.with_data((f.data() + b.data()) * 0.5)
}

/// Differences along the left-invariant group directions, `W(g·e^{±1}) ∓ W(g)`
/// scaled by the physical steps `1/K`, `N/M`, `1/Q`.
pub fn diff_group(w: &GroupField, axis: Axis, dir: Direction) -> GroupField {
    let p = *w.params();
    let (unit, scale) = match axis {
        Axis::Spatial => ((1, 0, 0), p.k() as f64),
        Axis::Frequency => ((0, 1, 0), p.m() as f64 / p.n() as f64),
        Axis::Phase => ((0, 0, 1), p.q() as f64),
    };
    let step = GroupElement::new(unit.0, unit.1, unit.2, &p);
    let back = step.inv(&p);
    let data = Array3::from_shape_fn((p.k(), p.m(), p.q()), |(l, m, k)| {
        let g = GroupElement { l, m, k };
        match dir {
            Direction::Forward => scale * (w.at(g.mul(step, &p)) - w.at(g)),
            Direction::Backward => scale * (w.at(g) - w.at(g.mul(back, &p))),
        }
    });
    w.with_data(data)
}

/// Relative norm of `(1/a)(A₂⁺ + A₂⁻)G + ia(A₁⁺ + A₁⁻)G`; zero for a zero field.
pub fn cr_residual(g: &PhaseField, a: f64) -> f64 {
    let norm = g.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let c2 = diff_centred(g, Axis::Frequency);
    let c1 = diff_centred(g, Axis::Spatial);
    let i_a = Complex64::new(0.0, 2.0 * a);
    let r = c2.data() * Complex64::new(2.0 / a, 0.0) + c1.data() * i_a;
    r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / norm
}

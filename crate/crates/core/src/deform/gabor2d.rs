use ndarray::{Array2, Array3, Array4, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::PhaseField2d;
use crate::heisenberg::GaborParams;
use crate::reassign::{erode_quadratic_axis, ReassignParams};
use crate::transform::GaborTransform;
use crate::window::{Window, WindowKind};

/// Tensor product of two one-dimensional transforms; axis 0 of an image is
/// analysed by `axes[0]`.
#[derive(Debug, Clone)]
pub struct Gabor2d {
    axes: [GaborTransform; 2],
}

impl Gabor2d {
    pub fn new(params: [GaborParams; 2], kind: WindowKind) -> Result<Self> {
        let make = |p: GaborParams| GaborTransform::new(p, Window::new(kind, &p)?);
        Ok(Gabor2d { axes: [make(params[0])?, make(params[1])?] })
    }

    pub fn from_transforms(axes: [GaborTransform; 2]) -> Self {
        Gabor2d { axes }
    }

    pub fn params(&self) -> [GaborParams; 2] {
        [*self.axes[0].params(), *self.axes[1].params()]
    }

    /// `G[l1, l2, m1, m2]`.
    pub fn analyze(&self, img: &Array2<f64>) -> Result<PhaseField2d> {
        let [p0, p1] = self.params();
        if img.dim() != (p0.n(), p1.n()) {
            return Err(Error::ShapeMismatch(format!("image is {:?}, transform needs ({}, {})", img.dim(), p0.n(), p1.n())));
        }
        let rows: Vec<Array2<Complex64>> = img
            .axis_iter(Axis(0))
            .into_par_iter()
            .map(|row| {
                let f: Vec<Complex64> = row.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                self.axes[1].analyze(&f).map(|g| g.into_data())
            })
            .collect::<Result<_>>()?;
        let mut stage = Array3::zeros((p0.n(), p1.k(), p1.m()));
        for (i, r) in rows.into_iter().enumerate() {
            stage.index_axis_mut(Axis(0), i).assign(&r);
        }
        let cols: Vec<((usize, usize), Array2<Complex64>)> = (0..p1.k())
            .flat_map(|l2| (0..p1.m()).map(move |m2| (l2, m2)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(l2, m2)| {
                let f: Vec<Complex64> = stage.slice(ndarray::s![.., l2, m2]).to_vec();
                self.axes[0].analyze(&f).map(|g| ((l2, m2), g.into_data()))
            })
            .collect::<Result<_>>()?;
        let mut out = Array4::zeros((p0.k(), p1.k(), p0.m(), p1.m()));
        for ((l2, m2), g) in cols {
            out.slice_mut(ndarray::s![.., l2, .., m2]).assign(&g);
        }
        PhaseField2d::new([p0, p1], out)
    }
}

pub fn gabor2d_analysis(img: &Array2<f64>, windows: [&Window; 2], params: [GaborParams; 2]) -> Result<PhaseField2d> {
    let t0 = GaborTransform::new(params[0], windows[0].clone())?;
    let t1 = GaborTransform::new(params[1], windows[1].clone())?;
    Gabor2d::from_transforms([t0, t1]).analyze(img)
}

/// Quadratic-kernel erosion of the modulus over all four axes, phase restored.
pub fn reassign2d(g: &PhaseField2d, rp: &ReassignParams) -> Result<PhaseField2d> {
    rp.validate()?;
    if rp.eta != 1.0 {
        return Err(Error::InvalidParams(format!("2d reassignment uses the quadratic kernel (eta = 1), got {}", rp.eta)));
    }
    if rp.t_final == 0.0 {
        return Ok(g.clone());
    }
    let [p0, p1] = *g.params();
    let a = rp.a;
    let t = rp.t_final;
    let mut m = g.modulus();
    let coeffs = [
        (p0.dp() / a).powi(2) / (4.0 * t),
        (p1.dp() / a).powi(2) / (4.0 * t),
        (a * p0.dq()).powi(2) / (4.0 * t),
        (a * p1.dq()).powi(2) / (4.0 * t),
    ];
    for (axis, c) in coeffs.into_iter().enumerate() {
        erode_quadratic_axis(&mut m, Axis(axis), c, true);
    }
    let data = ndarray::Zip::from(g.data()).and(&m).map_collect(|&z, &e| {
        let r = z.norm();
        if r > 0.0 {
            z * (e / r)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(g.with_data(data))
}

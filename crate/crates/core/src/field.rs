//! Complex arrays over phase space and over the group quotient.

use ndarray::{Array2, Array3, Array4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::{GaborParams, GroupElement};
use crate::unit_root;

/// Coefficients `G[l, m]` on the `K × M` phase-space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    params: GaborParams,
    data: Array2<Complex64>,
}

impl PhaseField {
    pub fn new(params: GaborParams, data: Array2<Complex64>) -> Result<Self> {
        if data.dim() != (params.k(), params.m()) {
            return Err(Error::ShapeMismatch(format!(
                "phase field is {:?}, grid needs ({}, {})",
                data.dim(),
                params.k(),
                params.m()
            )));
        }
        Ok(PhaseField { params, data })
    }

    pub fn zeros(params: GaborParams) -> Self {
        PhaseField { params, data: Array2::zeros((params.k(), params.m())) }
    }

    pub fn params(&self) -> &GaborParams {
        &self.params
    }
    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.data
    }
    pub fn into_data(self) -> Array2<Complex64> {
        self.data
    }

    /// Same grid, new values.
    pub(crate) fn with_data(&self, data: Array2<Complex64>) -> Self {
        debug_assert_eq!(data.dim(), self.data.dim());
        PhaseField { params: self.params, data }
    }

    pub fn modulus(&self) -> Array2<f64> {
        self.data.mapv(|z| z.norm())
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &PhaseField) -> f64 {
        self.data.iter().zip(other.data.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Left translation by a grid element, the phase-space image of a
    /// time-frequency shift of the analysed signal.
    pub fn translate(&self, g: GroupElement) -> PhaseField {
        let p = &self.params;
        let (kk, mm) = (p.k(), p.m());
        let two_p = 2 * p.p() as i64;
        let base = unit_root(p.q() as i64, g.k as i64);
        let data = Array2::from_shape_fn((kk, mm), |(l, m)| {
            // e^{2πi m0 (2l - l0) / (2P)}
            let e = g.m as i64 * (2 * l as i64 - g.l as i64);
            let src = self.data[((l + kk - g.l) % kk, (m + mm - g.m) % mm)];
            base * unit_root(two_p, e) * src
        });
        self.with_data(data)
    }
}

/// Coefficients `W[l, m, k]` on the full `K × M × Q` quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupField {
    params: GaborParams,
    data: Array3<Complex64>,
}

impl GroupField {
    pub fn new(params: GaborParams, data: Array3<Complex64>) -> Result<Self> {
        if data.dim() != (params.k(), params.m(), params.q()) {
            return Err(Error::ShapeMismatch(format!(
                "group field is {:?}, grid needs ({}, {}, {})",
                data.dim(),
                params.k(),
                params.m(),
                params.q()
            )));
        }
        Ok(GroupField { params, data })
    }

    pub fn params(&self) -> &GaborParams {
        &self.params
    }
    pub fn data(&self) -> &Array3<Complex64> {
        &self.data
    }
    pub fn into_data(self) -> Array3<Complex64> {
        self.data
    }

    pub(crate) fn with_data(&self, data: Array3<Complex64>) -> Self {
        GroupField { params: self.params, data }
    }

    pub fn at(&self, g: GroupElement) -> Complex64 {
        self.data[(g.l, g.m, g.k)]
    }
}

/// Separable two-dimensional coefficients `G[l1, l2, m1, m2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField2d {
    params: [GaborParams; 2],
    data: Array4<Complex64>,
}

impl PhaseField2d {
    pub fn new(params: [GaborParams; 2], data: Array4<Complex64>) -> Result<Self> {
        let want = (params[0].k(), params[1].k(), params[0].m(), params[1].m());
        if data.dim() != want {
            return Err(Error::ShapeMismatch(format!("2d field is {:?}, grid needs {want:?}", data.dim())));
        }
        Ok(PhaseField2d { params, data })
    }

    pub fn params(&self) -> &[GaborParams; 2] {
        &self.params
    }
    pub fn data(&self) -> &Array4<Complex64> {
        &self.data
    }
    pub fn into_data(self) -> Array4<Complex64> {
        self.data
    }
    pub fn modulus(&self) -> Array4<f64> {
        self.data.mapv(|z| z.norm())
    }

    pub(crate) fn with_data(&self, data: Array4<Complex64>) -> Self {
        PhaseField2d { params: self.params, data }
    }
}

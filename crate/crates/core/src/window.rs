//! Analysis windows: the sampled Gaussian and the discrete Cauchy-Riemann window.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heisenberg::GaborParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    SampledGaussian,
    DiscreteCr,
}

impl std::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "continuous" | "sampled-gaussian" => Ok(WindowKind::SampledGaussian),
            "cr" | "discrete" | "discrete-cr" => Ok(WindowKind::DiscreteCr),
            other => Err(Error::InvalidParams(format!("unknown window kind {other:?}"))),
        }
    }
}

/// An `N`-periodic window.
///
/// `samples` holds the values exactly as the defining formula produces them;
/// `at(n)` reads them relative to `origin`, which is where the transforms
/// place the window's centre.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    kind: WindowKind,
    scale: f64,
    samples: Vec<Complex64>,
    origin: usize,
}

impl Window {
    pub fn new(kind: WindowKind, p: &GaborParams) -> Result<Self> {
        match kind {
            WindowKind::SampledGaussian => Ok(Self::gaussian(p)),
            WindowKind::DiscreteCr => Self::discrete_cr(p),
        }
    }

    /// `exp(-π(|n| - ⌊(N-1)/2⌋)² / (N²a²))` for `n` in `(-N/2, N/2]`.
    pub fn gaussian(p: &GaborParams) -> Self {
        let n = p.n();
        let h = ((n - 1) / 2) as f64;
        let denom = (n * n) as f64 * p.a() * p.a();
        let samples = (0..n)
            .map(|j| {
                let rep = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                Complex64::new((-PI * (rep.abs() - h).powi(2) / denom).exp(), 0.0)
            })
            .collect();
        Window { kind: WindowKind::SampledGaussian, scale: p.a(), samples, origin: n / 2 }
    }

    /// Window whose transform satisfies the discrete Cauchy-Riemann relation
    /// exactly. Only defined at extreme oversampling.
    pub fn discrete_cr(p: &GaborParams) -> Result<Self> {
        let n = p.n();
        if p.l() != 1 || p.k() != n || p.m() != n {
            return Err(Error::CrRequiresExtremeOversampling { n, k: p.k(), m: p.m(), l: p.l() });
        }
        let a2k = p.a() * p.a() * p.k() as f64;
        let mut c = DMatrix::<f64>::zeros(n, n);
        for d in 0..n {
            c[(d, (d + 1) % n)] += 1.0;
            c[(d, (d + n - 1) % n)] -= 1.0;
            c[(d, d)] += 2.0 * (TAU * d as f64 / n as f64).sin() / a2k;
        }
        let basis = nullspace(c, 1e-10);
        let v = match basis.ncols() {
            1 => basis.column(0).clone_owned(),
            2 => smoothest_combination(&basis),
            dim => return Err(Error::CrNullspaceDegenerate { dim }),
        };
        let norm = v.norm();
        let sign = if v[0] < 0.0 { -1.0 } else { 1.0 };
        let samples = v.iter().map(|x| Complex64::new(sign * x / norm, 0.0)).collect();
        Ok(Window { kind: WindowKind::DiscreteCr, scale: p.a(), samples, origin: 0 })
    }

    /// Arbitrary window; `at(n)` reads `samples[(n + origin) mod N]`.
    pub fn from_samples(kind: WindowKind, scale: f64, samples: Vec<Complex64>, origin: usize) -> Self {
        Window { kind, scale, samples, origin }
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
    pub fn origin(&self) -> usize {
        self.origin
    }

    /// Periodic read centred on the window's origin.
    pub fn at(&self, n: i64) -> Complex64 {
        let len = self.samples.len() as i64;
        self.samples[(n + self.origin as i64).rem_euclid(len) as usize]
    }

    /// The window as seen by the transforms: `at(0), at(1), …, at(N-1)`.
    pub fn centred(&self) -> Vec<Complex64> {
        (0..self.samples.len() as i64).map(|n| self.at(n)).collect()
    }

    pub fn scaled(&self, factor: f64) -> Window {
        Window { samples: self.samples.iter().map(|z| z * factor).collect(), ..self.clone() }
    }

    pub fn norm(&self) -> f64 {
        crate::l2_norm(&self.samples)
    }
}

/// Right singular vectors whose singular value is below `rel_tol · σ_max`.
fn nullspace(c: DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = c.ncols();
    let svd = c.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.max();
    let cols: Vec<_> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= rel_tol * smax)
        .map(|i| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    DMatrix::from_columns(&cols)
}

/// Unit vector in a two-dimensional subspace minimising the periodic first
/// difference energy, which selects the smooth Gaussian-like mode over the
/// alternating one.
fn smoothest_combination(basis: &DMatrix<f64>) -> nalgebra::DVector<f64> {
    let n = basis.nrows();
    let diff = DMatrix::from_fn(n, 2, |i, j| basis[((i + 1) % n, j)] - basis[(i, j)]);
    let gram = diff.transpose() * &diff;
    let eig = SymmetricEigen::new(Matrix2::new(gram[(0, 0)], gram[(0, 1)], gram[(1, 0)], gram[(1, 1)]));
    let i = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
    let w = eig.eigenvectors.column(i);
    basis.column(0) * w[0] + basis.column(1) * w[1]
}

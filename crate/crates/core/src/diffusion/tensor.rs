use nalgebra::{Matrix2, SymmetricEigen};
use ndarray::{Array2, Axis};

use super::{Adaptivity, DiffusionParams};
use crate::heisenberg::GaborParams;

/// A symmetric 2×2 matrix per phase-space cell.
pub type TensorField = Array2<Matrix2<f64>>;

/// Periodic convolution with a sampled, unit-sum Gaussian of `sigma` cells per
/// axis. `sigma = 0` is the identity.
pub fn gaussian_smooth(u: &Array2<f64>, sigma: f64) -> Array2<f64> {
    if sigma == 0.0 {
        return u.clone();
    }
    let mut out = u.clone();
    for axis in [Axis(0), Axis(1)] {
        let n = out.len_of(axis);
        let radius = ((4.0 * sigma).ceil() as usize).min(n / 2);
        let taps: Vec<f64> = (0..=radius).map(|d| (-0.5 * (d as f64 / sigma).powi(2)).exp()).collect();
        let total = taps[0] + 2.0 * taps[1..].iter().sum::<f64>();
        for mut lane in out.lanes_mut(axis) {
            let src = lane.to_vec();
            for (i, x) in lane.iter_mut().enumerate() {
                let mut acc = taps[0] * src[i];
                for (d, w) in taps.iter().enumerate().skip(1) {
                    acc += w * (src[(i + d) % n] + src[(i + n - d % n) % n]);
                }
                *x = acc / total;
            }
        }
    }
    out
}

/// Gaussian-derivative Hessian or structure tensor of the modulus in the
/// balanced coordinates `(β²p, q)`.
pub fn auxiliary_matrix(modulus: &Array2<f64>, dp: &DiffusionParams, p: &GaborParams) -> TensorField {
    let (h1, h2) = dp.steps(p);
    let u = gaussian_smooth(modulus, dp.sigma);
    let (kk, mm) = u.dim();
    let at = |l: usize, m: usize, dl: isize, dm: isize| {
        u[((l as isize + dl).rem_euclid(kk as isize) as usize, (m as isize + dm).rem_euclid(mm as isize) as usize)]
    };
    match dp.adaptivity {
        Adaptivity::Hessian => Array2::from_shape_fn((kk, mm), |(l, m)| {
            let c = u[(l, m)];
            let u11 = (at(l, m, 1, 0) - 2.0 * c + at(l, m, -1, 0)) / (h1 * h1);
            let u22 = (at(l, m, 0, 1) - 2.0 * c + at(l, m, 0, -1)) / (h2 * h2);
            let u12 = (at(l, m, 1, 1) - at(l, m, 1, -1) - at(l, m, -1, 1) + at(l, m, -1, -1)) / (4.0 * h1 * h2);
            Matrix2::new(u11, u12, u12, u22)
        }),
        Adaptivity::StructureTensor => {
            let g1 = Array2::from_shape_fn((kk, mm), |(l, m)| (at(l, m, 1, 0) - at(l, m, -1, 0)) / (2.0 * h1));
            let g2 = Array2::from_shape_fn((kk, mm), |(l, m)| (at(l, m, 0, 1) - at(l, m, 0, -1)) / (2.0 * h2));
            let j11 = gaussian_smooth(&(&g1 * &g1), dp.sigma);
            let j12 = gaussian_smooth(&(&g1 * &g2), dp.sigma);
            let j22 = gaussian_smooth(&(&g2 * &g2), dp.sigma);
            Array2::from_shape_fn((kk, mm), |i| Matrix2::new(j11[i], j12[i], j12[i], j22[i]))
        }
    }
}

/// `S·diag(ε, (1-ε)exp(-c/(λ₁-λ₂)²) + ε)·Sᵀ` with `|λ₁| ≤ |λ₂|`; `εI` when the
/// eigenvalues coincide.
pub fn conductivity(a: &Matrix2<f64>, eps: f64, c: f64) -> Matrix2<f64> {
    let eig = SymmetricEigen::new(*a);
    let (i1, i2) = if eig.eigenvalues[0].abs() <= eig.eigenvalues[1].abs() { (0, 1) } else { (1, 0) };
    let (l1, l2) = (eig.eigenvalues[i1], eig.eigenvalues[i2]);
    if l1 == l2 {
        return Matrix2::identity() * eps;
    }
    let strong = (1.0 - eps) * (-c / (l1 - l2).powi(2)).exp() + eps;
    let e1 = eig.eigenvectors.column(i1);
    let e2 = eig.eigenvectors.column(i2);
    e1 * e1.transpose() * eps + e2 * e2.transpose() * strong
}

pub fn conductivity_field(modulus: &Array2<f64>, dp: &DiffusionParams, p: &GaborParams) -> TensorField {
    auxiliary_matrix(modulus, dp, p).mapv(|a| conductivity(&a, dp.eps, dp.c))
}

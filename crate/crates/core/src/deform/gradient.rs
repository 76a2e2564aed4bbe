use nalgebra::{Matrix2, Vector2};
use ndarray::Array2;

use super::frequency::FrequencyField;
use crate::error::{Error, Result};

/// Positions whose normal matrix is worse conditioned than this are masked.
pub const DEFAULT_MAX_CONDITION: f64 = 1e6;

/// Jacobian of the map from frame `t-1` to frame `t`, per analysis position.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationGradientField {
    pub d: Array2<Matrix2<f64>>,
    /// Condition number of `QᵀQ`; infinite where fewer than two rows exist.
    pub condition: Array2<f64>,
    pub valid: Array2<bool>,
    pub spacing: [f64; 2],
}

impl DeformationGradientField {
    pub fn identity(dim: (usize, usize), spacing: [f64; 2]) -> Self {
        DeformationGradientField {
            d: Array2::from_elem(dim, Matrix2::identity()),
            condition: Array2::from_elem(dim, 1.0),
            valid: Array2::from_elem(dim, true),
            spacing,
        }
    }

    /// Bilinear interpolation at a point in pixels over valid neighbours only.
    /// `None` outside the sampled domain or when no neighbour is valid.
    pub fn sample(&self, x: [f64; 2]) -> Option<Matrix2<f64>> {
        let (n0, n1) = self.d.dim();
        let (u, v) = (x[0] / self.spacing[0], x[1] / self.spacing[1]);
        if !(u >= 0.0 && v >= 0.0 && u <= (n0 - 1) as f64 && v <= (n1 - 1) as f64) {
            return None;
        }
        let (i, j) = ((u.floor() as usize).min(n0.saturating_sub(2)), (v.floor() as usize).min(n1.saturating_sub(2)));
        let (fu, fv) = (u - i as f64, v - j as f64);
        let mut acc = Matrix2::zeros();
        let mut weight = 0.0;
        for (di, wi) in [(0, 1.0 - fu), (1, fu)] {
            for (dj, wj) in [(0, 1.0 - fv), (1, fv)] {
                let (a, b) = ((i + di).min(n0 - 1), (j + dj).min(n1 - 1));
                let w = wi * wj;
                if w > 0.0 && self.valid[(a, b)] {
                    acc += self.d[(a, b)] * w;
                    weight += w;
                }
            }
        }
        (weight > 0.0).then(|| acc / weight)
    }
}

/// Least-squares `D` with `Q_t D = Q_prev`, and the condition number of `Q_tᵀQ_t`.
pub fn solve_least_squares(q_t: &[Vector2<f64>], q_prev: &[Vector2<f64>]) -> Option<(Matrix2<f64>, f64)> {
    if q_t.len() < 2 || q_t.len() != q_prev.len() {
        return None;
    }
    let mut normal = Matrix2::zeros();
    let mut rhs = Matrix2::zeros();
    for (a, b) in q_t.iter().zip(q_prev) {
        normal += a * a.transpose();
        rhs += a * b.transpose();
    }
    let eig = normal.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    if lo <= 0.0 {
        return None;
    }
    Some((normal.try_inverse()? * rhs, hi / lo))
}

/// Per-position least squares over the tag directions valid in both frames.
/// Each row of `Q_t` takes the sign closer to the matching row of `Q_prev`.
pub fn deformation_gradient(
    q_t: &[FrequencyField],
    q_prev: &[FrequencyField],
    max_condition: f64,
) -> Result<DeformationGradientField> {
    if q_t.len() != q_prev.len() || q_t.is_empty() {
        return Err(Error::InvalidParams(format!("need matching direction stacks, got {} and {}", q_t.len(), q_prev.len())));
    }
    let dim = q_t[0].dim();
    if q_t.iter().chain(q_prev).any(|f| f.dim() != dim) {
        return Err(Error::ShapeMismatch("frequency fields differ in size".into()));
    }
    let mut out = DeformationGradientField::identity(dim, q_t[0].spacing);
    for ((i, j), d) in out.d.indexed_iter_mut() {
        let mut rows_t = Vec::new();
        let mut rows_prev = Vec::new();
        for (a, b) in q_t.iter().zip(q_prev) {
            if !(a.valid[(i, j)] && b.valid[(i, j)]) {
                continue;
            }
            let (qa, qb) = (a.q[(i, j)], b.q[(i, j)]);
            rows_t.push(if (qa - qb).norm() <= (qa + qb).norm() { qa } else { -qa });
            rows_prev.push(qb);
        }
        match solve_least_squares(&rows_t, &rows_prev) {
            Some((m, cond)) if cond <= max_condition && m.iter().all(|x| x.is_finite()) => {
                *d = m;
                out.condition[(i, j)] = cond;
            }
            other => {
                out.condition[(i, j)] = other.map_or(f64::INFINITY, |(_, c)| c);
                out.valid[(i, j)] = false;
            }
        }
    }
    Ok(out)
}

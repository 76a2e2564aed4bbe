use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigen-decomposition of the (negative definite) real part of the chirp form,
/// ordered so that `|λ₁| < |λ₂|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenFrame {
    pub l1: f64,
    pub l2: f64,
    pub k1: [f64; 2],
    pub k2: [f64; 2],
}

fn canonical_sign(v: Vector2<f64>) -> [f64; 2] {
    let first = if v[0] != 0.0 { v[0] } else { v[1] };
    if first < 0.0 {
        [-v[0], -v[1]]
    } else {
        [v[0], v[1]]
    }
}

impl EigenFrame {
    pub fn new(m: &Matrix2<f64>) -> Result<Self> {
        let sym = (m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let (e, v) = (eig.eigenvalues, eig.eigenvectors);
        let (i1, i2) = if e[0].abs() <= e[1].abs() { (0, 1) } else { (1, 0) };
        let (l1, l2) = (e[i1], e[i2]);
        if (l1 - l2).abs() < 1e-12 * l2.abs() {
            return Err(Error::DegenerateSpectrum { l1, l2 });
        }
        let k1 = canonical_sign(v.column(i1).into_owned());
        // Right-handed frame: k2 is k1 rotated by +90°, then sign-normalised.
        let k2 = canonical_sign(Vector2::new(-k1[1], k1[0]));
        Ok(EigenFrame { l1, l2, k1, k2 })
    }

    pub fn k1(&self) -> Vector2<f64> {
        Vector2::from(self.k1)
    }
    pub fn k2(&self) -> Vector2<f64> {
        Vector2::from(self.k2)
    }

    /// Coordinates `(α₁, α₂)` with `(p, q) = α₁k₁ + α₂k₂`.
    pub fn alpha(&self, p: f64, q: f64) -> (f64, f64) {
        let x = Vector2::new(p, q);
        (x.dot(&self.k1()), x.dot(&self.k2()))
    }

    pub fn point(&self, a1: f64, a2: f64) -> Vector2<f64> {
        self.k1() * a1 + self.k2() * a2
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        let (k1, k2) = (self.k1(), self.k2());
        k1 * k1.transpose() * self.l1 + k2 * k2.transpose() * self.l2
    }

    /// `Σ λ_k α_k²`, the real exponent of the unevolved transform.
    pub fn form(&self, a1: f64, a2: f64) -> f64 {
        self.l1 * a1 * a1 + self.l2 * a2 * a2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Generic,
    /// `α₁ = 0`: the point lies on the `k₂` axis.
    Axis1,
    /// `α₂ = 0`: the point lies on the `k₁` axis.
    Axis2,
}

/// Multiplier of the constrained minimisation of the form over the circle of
/// radius `t`, with the attained minimum and its location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangeRoot {
    pub lambda: f64,
    pub branch: Branch,
    /// Minimum of `Σ λ_k α_k(p', q')²` over `|(p', q') - (p, q)| = t`.
    pub value: f64,
    pub minimizer: [f64; 2],
}

/// Coefficients, lowest degree first, of
/// `P_t(λ) = t²(λ-λ₁)²(λ-λ₂)² - (λ₁α₁)²(λ-λ₂)² - (λ₂α₂)²(λ-λ₁)²`.
pub fn quartic_coefficients(frame: &EigenFrame, a1: f64, a2: f64, t: f64) -> [f64; 5] {
    let (l1, l2) = (frame.l1, frame.l2);
    let sq1 = [l1 * l1, -2.0 * l1, 1.0];
    let sq2 = [l2 * l2, -2.0 * l2, 1.0];
    let mut c = [0.0; 5];
    for i in 0..3 {
        for j in 0..3 {
            c[i + j] += t * t * sq1[i] * sq2[j];
        }
    }
    let (w1, w2) = ((l1 * a1).powi(2), (l2 * a2).powi(2));
    for i in 0..3 {
        c[i] -= w1 * sq2[i] + w2 * sq1[i];
    }
    c
}

pub fn eval_poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

fn eval_poly_deriv(c: &[f64], x: f64) -> f64 {
    c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, v)| acc * x + i as f64 * v)
}

/// `|P_t(λ)|` relative to the size of its terms at `λ`.
pub fn scaled_residual(c: &[f64; 5], x: f64) -> f64 {
    let scale: f64 = c.iter().enumerate().map(|(i, v)| (v * x.powi(i as i32)).abs()).sum();
    eval_poly(c, x).abs() / scale.max(f64::MIN_POSITIVE)
}

fn real_quartic_roots(c: &[f64; 5]) -> Vec<f64> {
    let lead = c[4];
    if lead == 0.0 {
        return Vec::new();
    }
    let mut comp = Matrix4::zeros();
    for i in 1..4 {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..4 {
        comp[(i, 3)] = -c[i] / lead;
    }
    let roots = comp.complex_eigenvalues();
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    roots
        .iter()
        .filter(|z| z.im.abs() <= 1e-6 * scale)
        .map(|z| newton_polish(c, z.re))
        .collect()
}

fn newton_polish(c: &[f64], mut x: f64) -> f64 {
    for _ in 0..50 {
        let d = eval_poly_deriv(c, x);
        if d == 0.0 {
            break;
        }
        let step = eval_poly(c, x) / d;
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1e-300) {
            break;
        }
    }
    x
}

/// Root of the secular equation `Σ (λ_kα_k/(λ_k-λ))² = t²` below `λ₂`, which
/// is the multiplier of the global minimiser.
fn secular_root(frame: &EigenFrame, a1: f64, a2: f64, t: f64) -> Option<f64> {
    let (l1, l2) = (frame.l1, frame.l2);
    let h = |x: f64| (l1 * a1 / (l1 - x)).powi(2) + (l2 * a2 / (l2 - x)).powi(2) - t * t;
    let spread = ((l1 * a1).powi(2) + (l2 * a2).powi(2)).sqrt();
    let mut lo = l2 - 2.0 * spread / t - 1e-300;
    let mut hi = l2;
    if !(h(lo) < 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn candidate(frame: &EigenFrame, a1: f64, a2: f64, lambda: f64) -> Option<(f64, [f64; 2])> {
    let d1 = lambda - frame.l1;
    let d2 = lambda - frame.l2;
    if d1 == 0.0 || d2 == 0.0 {
        return None;
    }
    let (b1, b2) = (lambda * a1 / d1, lambda * a2 / d2);
    let x = frame.point(b1, b2);
    Some((frame.form(b1, b2), [x[0], x[1]]))
}

/// Threshold below which an `α` coordinate counts as zero, relative to `|(p,q)|`.
const AXIS_TOL: f64 = 1e-13;

pub fn lagrange_multiplier(frame: &EigenFrame, p: f64, q: f64, t: f64) -> Result<LagrangeRoot> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!("t must be positive, got {t}")));
    }
    let (a1, a2) = frame.alpha(p, q);
    let radius = p.hypot(q);
    if a1.abs() <= AXIS_TOL * radius || radius == 0.0 {
        let s = if a2 < 0.0 { -1.0 } else { 1.0 };
        let x = frame.point(0.0, s * (a2.abs() + t));
        return Ok(LagrangeRoot {
            lambda: (1.0 + a2.abs() / t) * frame.l2,
            branch: Branch::Axis1,
            value: frame.l2 * (a2.abs() + t).powi(2),
            minimizer: [x[0], x[1]],
        });
    }
    if a2.abs() <= AXIS_TOL * radius {
        let limit = t_max(frame, a1)?;
        if t > limit {
            return Err(Error::BeyondCollapse { t, t_max: limit });
        }
        let s = if a1 < 0.0 { -1.0 } else { 1.0 };
        let x = frame.point(s * (a1.abs() + t), 0.0);
        return Ok(LagrangeRoot {
            lambda: (1.0 + a1.abs() / t) * frame.l1,
            branch: Branch::Axis2,
            value: frame.l1 * (a1.abs() + t).powi(2),
            minimizer: [x[0], x[1]],
        });
    }

    let coeffs = quartic_coefficients(frame, a1, a2, t);
    let mut roots = real_quartic_roots(&coeffs);
    if let Some(r) = secular_root(frame, a1, a2, t) {
        roots.push(r);
        roots.push(newton_polish(&coeffs, r));
    }
    let best = roots
        .iter()
        .filter(|&&l| scaled_residual(&coeffs, l) <= 1e-9)
        .filter_map(|&l| candidate(frame, a1, a2, l).map(|(v, x)| (l, v, x)))
        .filter(|(_, _, x)| ((x[0] - p).hypot(x[1] - q) - t).abs() <= 1e-6 * t.max(radius))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    match best {
        Some((lambda, value, minimizer)) => Ok(LagrangeRoot { lambda, branch: Branch::Generic, value, minimizer }),
        None => Err(Error::NoAdmissibleRoot { p, q, t }),
    }
}

/// `|α₁||λ₁| / (|λ₂| - |λ₁|)`: the largest `t` for which the minimiser of a point
/// on the `k₁` axis stays on that axis.
pub fn t_max_closed_form(frame: &EigenFrame, a1: f64) -> f64 {
    a1.abs() * frame.l1.abs() / (frame.l2.abs() - frame.l1.abs())
}

/// Curvature of the isoline of `xᵀRx` through `x`.
fn isoline_curvature(r: &Matrix2<f64>, x: Vector2<f64>) -> f64 {
    let g = r * x * 2.0;
    let h = r * 2.0;
    let (up, uq) = (g[0], g[1]);
    let num = uq * uq * h[(0, 0)] - 2.0 * up * uq * h[(0, 1)] + up * up * h[(1, 1)];
    num.abs() / (up * up + uq * uq).powf(1.5)
}

/// Numerical `t_max` for the point `α₁k₁`: the radius at which the circle
/// around the point touches the isoline through `(|α₁| + t)k₁` with equal curvature.
pub fn t_max(frame: &EigenFrame, a1: f64) -> Result<f64> {
    if a1 == 0.0 {
        return Ok(0.0);
    }
    let r = frame.matrix();
    let g = |t: f64| t * isoline_curvature(&r, frame.k1() * (a1.abs() + t)) - 1.0;
    let mut hi = a1.abs().max(f64::MIN_POSITIVE);
    let mut tries = 0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::NoConvergence("t_max bracket"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Two-branch closed-form approximation of the multiplier. The `λ₁` branch is
/// used while `t ≤ t_max(α₁)`, which makes it exact on both principal axes.
pub fn lagrange_approximation(frame: &EigenFrame, p: f64, q: f64, t: f64, c_knob: f64) -> f64 {
    let (a1, a2) = frame.alpha(p, q);
    let (s1, s2) = (a1 * a1, a2 * a2);
    if t <= t_max_closed_form(frame, a1) {
        frame.l1 * (1.0 + (s1 + s2 * ((s1 + s2) / (t * t)).powf(1.5)).sqrt() / t)
    } else {
        let ratio = frame.l1.abs() / frame.l2.abs();
        frame.l2 * (1.0 + (s2 + c_knob * c_knob * ratio * ratio * s1).sqrt() / t)
    }
}

/// Brute-force minimum of the form over `n` equally spaced points of the circle.
pub fn circle_minimum(frame: &EigenFrame, p: f64, q: f64, t: f64, n: usize) -> (f64, [f64; 2]) {
    let r = frame.matrix();
    (0..n)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / n as f64;
            let x = Vector2::new(p + t * th.cos(), q + t * th.sin());
            (x.dot(&(r * x)), [x[0], x[1]])
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("n > 0")
}

use ndarray::{Array2, Array3};
use num_complex::Complex64;

use super::tensor::{conductivity_field, TensorField};
use super::DiffusionParams;
use crate::calculus::{diff_group, diff_phase, Axis, Direction};
use crate::error::{Error, Result};
use crate::field::{GroupField, PhaseField};
use crate::heisenberg::GaborParams;

/// Largest stable step: `0.25·min(h₁², h₂²) / max eig C` in the balanced steps.
pub fn cfl_bound(cond: &TensorField, dp: &DiffusionParams, p: &GaborParams) -> f64 {
    let (h1, h2) = dp.steps(p);
    let top = cond
        .iter()
        .map(|c| nalgebra::SymmetricEigen::new(*c).eigenvalues.max())
        .fold(0.0, f64::max);
    0.25 * (h1 * h1).min(h2 * h2) / top.max(f64::MIN_POSITIVE)
}

fn check_cfl(cond: &TensorField, dp: &DiffusionParams, p: &GaborParams) -> Result<()> {
    let bound = cfl_bound(cond, dp, p);
    if dp.dt > bound {
        return Err(Error::CflViolated { dt: dp.dt, bound });
    }
    Ok(())
}

fn steps(dp: &DiffusionParams) -> usize {
    (dp.t_final / dp.dt).round() as usize
}

/// Explicit divergence-form steps of
/// `W_t = β⁻²A₁⁻(c₁₁β⁻²A₁⁺W + c₁₂A₂⁺W) + A₂⁻(c₂₁β⁻²A₁⁺W + c₂₂A₂⁺W)`.
/// The conductivity comes from the initial modulus unless `readapt` is set.
pub fn ced_evolve(g: &PhaseField, dp: &DiffusionParams) -> Result<PhaseField> {
    dp.validate()?;
    let p = *g.params();
    let b2 = dp.beta.powi(-2);
    let mut cond = conductivity_field(&g.modulus(), dp, &p);
    check_cfl(&cond, dp, &p)?;
    let mut w = g.clone();
    for _ in 0..steps(dp) {
        if dp.readapt {
            cond = conductivity_field(&w.modulus(), dp, &p);
            check_cfl(&cond, dp, &p)?;
        }
        let d1 = diff_phase(&w, Axis::Spatial, Direction::Forward);
        let d2 = diff_phase(&w, Axis::Frequency, Direction::Forward);
        let (flux1, flux2) = fluxes(&cond, d1.data(), d2.data(), b2);
        let div1 = diff_phase(&w.with_data(flux1), Axis::Spatial, Direction::Backward);
        let div2 = diff_phase(&w.with_data(flux2), Axis::Frequency, Direction::Backward);
        let next = w.data() + &((div1.data() * b2 + div2.data()) * dp.dt);
        w = w.with_data(next);
    }
    Ok(w)
}

fn fluxes(
    cond: &TensorField,
    d1: &Array2<Complex64>,
    d2: &Array2<Complex64>,
    b2: f64,
) -> (Array2<Complex64>, Array2<Complex64>) {
    let f1 = Array2::from_shape_fn(d1.dim(), |i| {
        let c = cond[i];
        c[(0, 0)] * b2 * d1[i] + c[(0, 1)] * d2[i]
    });
    let f2 = Array2::from_shape_fn(d1.dim(), |i| {
        let c = cond[i];
        c[(1, 0)] * b2 * d1[i] + c[(1, 1)] * d2[i]
    });
    (f1, f2)
}

/// The same evolution on the group quotient with group differences; the
/// conductivity is read from `|W(l, m, 0)|`.
pub fn ced_evolve_group(w0: &GroupField, dp: &DiffusionParams) -> Result<GroupField> {
    dp.validate()?;
    let p = *w0.params();
    let b2 = dp.beta.powi(-2);
    let modulus = w0.data().index_axis(ndarray::Axis(2), 0).mapv(|z| z.norm());
    let cond = conductivity_field(&modulus, dp, &p);
    check_cfl(&cond, dp, &p)?;
    let q = p.q();
    let mut w = w0.clone();
    for _ in 0..steps(dp) {
        let d1 = diff_group(&w, Axis::Spatial, Direction::Forward);
        let d2 = diff_group(&w, Axis::Frequency, Direction::Forward);
        let mut f1 = Array3::zeros((p.k(), p.m(), q));
        let mut f2 = Array3::zeros((p.k(), p.m(), q));
        for ((l, m, k), x) in f1.indexed_iter_mut() {
            let c = cond[(l, m)];
            let (a, b) = (d1.data()[(l, m, k)], d2.data()[(l, m, k)]);
            *x = c[(0, 0)] * b2 * a + c[(0, 1)] * b;
            f2[(l, m, k)] = c[(1, 0)] * b2 * a + c[(1, 1)] * b;
        }
        let div1 = diff_group(&w.with_data(f1), Axis::Spatial, Direction::Backward);
        let div2 = diff_group(&w.with_data(f2), Axis::Frequency, Direction::Backward);
        let next = w.data() + &((div1.data() * b2 + div2.data()) * dp.dt);
        w = w.with_data(next);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::Adaptivity;
    use crate::heisenberg::GroupElement;
    use crate::transform::{apply_s, apply_s_inverse};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(p: GaborParams, seed: u64) -> PhaseField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = Array2::from_shape_fn((p.k(), p.m()), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        PhaseField::new(p, data).unwrap()
    }

    fn params(p: &GaborParams, dt_frac: f64, steps: usize) -> DiffusionParams {
        let beta = DiffusionParams::default_beta(p);
        let (h1, h2) = (beta * beta * p.dp(), p.dq());
        let dt = dt_frac * 0.25 * (h1 * h1).min(h2 * h2);
        DiffusionParams::new(beta, 0.2, 1e-3, 1.0, dt, dt * steps as f64).unwrap()
    }

    #[test]
    fn norm_decays_every_step() {
        let p = GaborParams::square(32, 64, 0.25).unwrap();
        let g = random_field(p, 1);
        let base = params(&p, 1.0, 1);
        let mut w = g;
        let mut prev = w.norm();
        for _ in 0..20 {
            w = ced_evolve(&w, &base).unwrap();
            let n = w.norm();
            assert!(n <= prev * (1.0 + 1e-14));
            prev = n;
        }
    }

    #[test]
    fn cfl_is_enforced() {
        let p = GaborParams::square(32, 64, 0.25).unwrap();
        let g = random_field(p, 2);
        let mut dp = params(&p, 1.0, 1);
        dp.eps = 1.0;
        dp.dt *= 4.5;
        dp.t_final = dp.dt;
        assert!(matches!(ced_evolve(&g, &dp), Err(Error::CflViolated { .. })));
    }

    #[test]
    fn commutes_with_unimodular_scaling_and_translation() {
        let p = GaborParams::new(32, 8, 8, 8, 0.5).unwrap();
        let g = random_field(p, 3);
        let dp = params(&p, 0.9, 5).with_adaptivity(Adaptivity::StructureTensor);
        let z = Complex64::cis(0.7);
        let lhs = ced_evolve(&g.with_data(g.data() * z), &dp).unwrap();
        let rhs = ced_evolve(&g, &dp).unwrap();
        assert!(lhs.max_abs_diff(&rhs.with_data(rhs.data() * z)) < 1e-12);
        let h = GroupElement::new(5, 3, 1, &p);
        let shifted = ced_evolve(&g.translate(h), &dp).unwrap();
        assert!(shifted.max_abs_diff(&rhs.translate(h)) < 1e-10);
    }

    #[test]
    fn group_and_phase_space_evolutions_agree() {
        let p = GaborParams::new(32, 8, 8, 8, 0.5).unwrap();
        let g = random_field(p, 4);
        let dp = params(&p, 0.9, 5);
        let direct = ced_evolve(&g, &dp).unwrap();
        let via = apply_s(&ced_evolve_group(&apply_s_inverse(&g), &dp).unwrap());
        assert!(direct.max_abs_diff(&via) < 1e-12);
    }
}

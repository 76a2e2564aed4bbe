use gaborflow::deform::{
    canonical, deformation_gradient, frequency_stack, make_phantom, track_stack, FrequencyField, PhantomSpec,
    PolarGrid, TrackingParams, DEFAULT_MAX_CONDITION,
};
use nalgebra::{Matrix2, Vector2};
use ndarray::Array2;

fn grid() -> PolarGrid {
    PolarGrid::inward([32.0, 32.0], 20.0, 2.0, 8, 50)
}

#[test]
fn phantom_net_follows_the_material_points() {
    let spec = PhantomSpec::standard();
    let ph = make_phantom(&spec, &grid()).unwrap();
    let tracking = track_stack(&ph.stack, &TrackingParams::standard64().unwrap()).unwrap();
    let net = tracking.net(&ph.seed(), &ph.truth[0]).unwrap();
    let last = spec.frames - 1;
    let err = net.mean_error(last, &ph.truth[last]);
    assert!(err <= 0.5, "mean error {err} px at the final frame");
}

#[test]
fn fading_alone_gives_identity_gradients() {
    let spec = PhantomSpec { frames: 4, ..PhantomSpec::static_with_fading(0.7) };
    let ph = make_phantom(&spec, &grid()).unwrap();
    let tracking = track_stack(&ph.stack, &TrackingParams::standard64().unwrap()).unwrap();
    for g in &tracking.gradients {
        let (sum, count) = g
            .d
            .iter()
            .zip(&g.valid)
            .filter(|(_, &v)| v)
            .fold((0.0, 0usize), |(s, c), (d, _)| (s + (d - nalgebra::Matrix2::identity()).norm(), c + 1));
        assert!(count > 0);
        let mean = sum / count as f64;
        assert!(mean <= 1e-2, "mean |D - I| = {mean}");
    }
    let net = tracking.net(&ph.seed(), &ph.truth[0]).unwrap();
    assert!(net.mean_error(3, &ph.truth[3]) < 1e-9);
}

#[test]
fn fading_does_not_move_the_frequency_estimate() {
    let faded = PhantomSpec { frames: 3, fading: 0.5, ..PhantomSpec::standard() };
    let crisp = PhantomSpec { fading: 1.0, ..faded.clone() };
    let tp = TrackingParams::standard64().unwrap();
    let a = frequency_stack(&make_phantom(&faded, &grid()).unwrap().stack, &tp).unwrap();
    let b = frequency_stack(&make_phantom(&crisp, &grid()).unwrap().stack, &tp).unwrap();
    for (fa, fb) in a.iter().flatten().zip(b.iter().flatten()) {
        for ((qa, qb), (va, vb)) in fa.q.iter().zip(&fb.q).zip(fa.valid.iter().zip(&fb.valid)) {
            assert_eq!(va, vb);
            if *va {
                let gap = ((qa.x - qb.x) / fa.bin[0]).abs().max(((qa.y - qb.y) / fa.bin[1]).abs());
                assert!(gap <= 0.1, "gap {gap} bins");
            }
        }
    }
}

#[test]
fn affine_pullback_residual_is_small() {
    // Frequencies transported by a fixed affine map between frames.
    let a = Matrix2::new(1.04, -0.07, 0.05, 0.97);
    let prev: Vec<FrequencyField> = [[8.0, 0.0], [6.0, 6.0], [0.0, 8.0]]
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let q = Array2::from_shape_fn((16, 16), |(x, y)| {
                canonical(Vector2::new(k[0] + 0.01 * (x * i) as f64, k[1] - 0.02 * y as f64))
            });
            FrequencyField { q, valid: Array2::from_elem((16, 16), true), spacing: [4.0, 4.0], bin: [1.0, 1.0] }
        })
        .collect();
    let next: Vec<FrequencyField> = prev
        .iter()
        .map(|f| FrequencyField { q: f.q.mapv(|q| canonical(a.transpose().try_inverse().unwrap() * q)), ..f.clone() })
        .collect();
    let d = deformation_gradient(&next, &prev, DEFAULT_MAX_CONDITION).unwrap();
    for ((pos, dm), &ok) in d.d.indexed_iter().zip(&d.valid) {
        assert!(ok);
        assert!((dm - a).norm() <= 1e-10);
        for (fp, fnx) in prev.iter().zip(&next) {
            let (qp, qn) = (fp.q[pos], fnx.q[pos]);
            let aligned = if (qn - qp).norm() <= (qn + qp).norm() { qn } else { -qn };
            assert!((dm.transpose() * aligned - qp).norm() <= 1e-8);
        }
    }
}

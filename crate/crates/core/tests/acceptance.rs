//! Acceptance harness: one PASS/FAIL line per criterion, with indented detail
//! lines. Exits non-zero when a gating criterion fails.

use std::f64::consts::TAU;
use std::time::Instant;

use gaborflow::calculus::cr_residual;
use gaborflow::chirp::{
    lagrange_multiplier, quartic_coefficients, scaled_residual, t_max, Branch, ChirpParams, ChirpSignal, EigenFrame,
    ChirpOracle,
};
use gaborflow::deform::{
    canonical, deformation_gradient, make_phantom, reassign2d, track_stack, FrequencyField, Gabor2d, PhantomSpec,
    PolarGrid, TrackingParams, DEFAULT_MAX_CONDITION,
};
use gaborflow::diffusion::{ced_evolve, ced_evolve_group, linear_smooth, DiffusionParams, SmoothingParams};
use gaborflow::reassign::{
    energy_rescale, erode_modulus, reassign, reconstruction_errors, ErosionGrid, ReassignParams,
};
use gaborflow::transform::{apply_s, apply_s_inverse, shift_signal};
use gaborflow::{Complex64, GaborParams, GaborTransform, GroupElement, PhaseField, Window, WindowKind};
use nalgebra::{Matrix2, Vector2};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

type Check = gaborflow::Result<Verdict>;

struct Verdict {
    pass: bool,
    details: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { pass: true, details: Vec::new() }
    }

    /// Records a sub-check; the verdict passes only if all of them do.
    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("     {line}"));
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_signal(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn kind_name(kind: WindowKind) -> &'static str {
    match kind {
        WindowKind::SampledGaussian => "continuous",
        WindowKind::DiscreteCr => "discrete",
    }
}

fn perfect_reconstruction() -> Check {
    let mut v = Verdict::new();
    let p = GaborParams::paper128();
    let mut r = rng(1);
    for kind in [WindowKind::SampledGaussian, WindowKind::DiscreteCr] {
        let tf = GaborTransform::new(p, Window::new(kind, &p)?)?;
        let (mut worst, mut slowest) = (0.0f64, 0.0f64);
        for _ in 0..5 {
            let f = random_signal(128, &mut r);
            let start = Instant::now();
            let back = tf.synthesize(&tf.analyze(&f)?)?;
            slowest = slowest.max(start.elapsed().as_secs_f64());
            worst = worst.max(reconstruction_errors(&f, &back)?.eps1);
        }
        v.check(worst <= 1e-10, format!("{} window: eps1 {worst:.2e} (<= 1e-10)", kind_name(kind)));
        v.check(slowest < 2.0, format!("{} window: slowest pair {:.1} ms (< 2 s)", kind_name(kind), slowest * 1e3));
    }
    Ok(v)
}

/// Criterion 2 is a regression report: drift is flagged but does not gate.
fn table_regression() -> Check {
    let mut v = Verdict::new();
    let chirp = ChirpSignal { params: ChirpParams::new(0.15, 50.0)?, centre: 0.5, carrier: 32.0 };
    let f = chirp.sample(128);
    for a in [0.125, 1.0 / 6.0] {
        let p = GaborParams::paper128().with_scale(a)?;
        let run = |kind: WindowKind, rp: ReassignParams| -> gaborflow::Result<(f64, f64)> {
            let tf = GaborTransform::new(p, Window::new(kind, &p)?)?;
            let out = reassign(&tf.analyze(&f)?, &rp)?;
            let e = reconstruction_errors(&f, &energy_rescale(&tf.synthesize(&out.field)?, &f)?)?;
            Ok((e.eps1, e.eps2))
        };
        let cont = WindowKind::SampledGaussian;
        let disc = WindowKind::DiscreteCr;
        let ero = ReassignParams::erosion(0.1, a, 1.0)?;
        let up = ReassignParams::upwind(0.1, 1e-3, a)?;
        let up16 = ReassignParams::upwind(0.16, 1e-3, a)?;
        let (ec, ed, uc, ud, ud16) = (run(cont, ero)?, run(disc, ero)?, run(cont, up)?, run(disc, up)?, run(disc, up16)?);
        let rows = [
            ("erosion/continuous eps1", ec.0, 2.41e-2),
            ("erosion/continuous eps2", ec.1, 8.38e-3),
            ("erosion/discrete eps1", ed.0, 8.25e-2),
            ("upwind/continuous eps1", uc.0, 2.16e-2),
            ("upwind/discrete eps1", ud.0, 1.47e-2),
            ("upwind/discrete eps2", ud.1, 3.32e-4),
            ("upwind/discrete t=0.16 eps1", ud16.0, 2.43e-2),
        ];
        for (name, got, want) in rows {
            let rel = (got - want).abs() / want;
            v.check(rel <= 0.5, format!("a={a:.4} {name}: {got:.3e} vs {want:.2e} (drift {:+.0}%)", 100.0 * (got - want) / want));
        }
    }
    Ok(v)
}

fn convergence() -> Check {
    let mut v = Verdict::new();
    let chirp = ChirpSignal { params: ChirpParams::new(0.1, 20.0)?, centre: 0.5, carrier: 0.0 };
    let a = 0.2;
    let mut gaps = Vec::new();
    for n in [64usize, 128] {
        let p = GaborParams::square(n, 2 * n, a)?;
        let g = GaborTransform::new(p, Window::gaussian(&p))?.analyze(&chirp.sample(n))?;
        let mut sup = 0.0f64;
        for ((l, m), z) in g.data().indexed_iter() {
            let q = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 } * p.dq();
            let exact = chirp.gabor_periodic(a, l as f64 * p.dp(), q, 3);
            sup = sup.max((z - exact).norm());
        }
        v.note(format!("N={n}: sup gap {sup:.3e}"));
        gaps.push(sup);
    }
    v.check(gaps[1] < gaps[0], format!("gap decreases from N=64 to N=128 ({:.3e} -> {:.3e})", gaps[0], gaps[1]));
    Ok(v)
}

fn cr_window() -> Check {
    let mut v = Verdict::new();
    let mut r = rng(4);
    let p = GaborParams::square(64, 128, 0.25)?;
    let f = random_signal(64, &mut r);
    let g = GaborTransform::new(p, Window::discrete_cr(&p)?)?.analyze(&f)?;
    let res = cr_residual(&g, p.a());
    v.check(res <= 1e-10, format!("discrete window residual at N=64: {res:.2e} (<= 1e-10)"));
    let mut gauss = Vec::new();
    for n in [64usize, 128] {
        let p = GaborParams::square(n, 2 * n, 0.25)?;
        let f = random_signal(n, &mut r);
        let g = GaborTransform::new(p, Window::gaussian(&p))?.analyze(&f)?;
        gauss.push(cr_residual(&g, p.a()));
    }
    v.check(gauss[1] < gauss[0], format!("sampled Gaussian residual N=64 {:.3e} > N=128 {:.3e}", gauss[0], gauss[1]));
    Ok(v)
}

fn min_image(d: i64, n: usize) -> i64 {
    let r = d.rem_euclid(n as i64);
    r.min(n as i64 - r)
}

fn erosion_oracle() -> Check {
    let mut v = Verdict::new();
    let a = 0.25;
    let p = GaborParams::square(16, 32, a)?;
    let grid = ErosionGrid::phase_space(&p, a);
    let mut r = rng(5);
    let (mut quad_ok, mut flat_ok) = (0, 0);
    for trial in 0..100 {
        let m = Array2::from_shape_fn((16, 16), |_| r.gen_range(0.0..1.0));
        let t = 0.002 * (1 + trial % 7) as f64;
        let (cp, cq) = (grid.step_p.powi(2) / (4.0 * t), grid.step_q.powi(2) / (4.0 * t));
        let brute = Array2::from_shape_fn((16, 16), |(l, mi)| {
            m.indexed_iter().fold(f64::INFINITY, |best, ((l2, m2), &x)| {
                let dl = min_image(l as i64 - l2 as i64, 16) as f64;
                let dm = min_image(mi as i64 - m2 as i64, 16) as f64;
                best.min(x + cp * (dl * dl) + cq * (dm * dm))
            })
        });
        quad_ok += usize::from(erode_modulus(&m, t, a, 1.0, &p)? == brute);
        let radius = 0.1 + 0.15 * (trial % 9) as f64;
        let brute = Array2::from_shape_fn((16, 16), |(l, mi)| {
            m.indexed_iter().fold(f64::INFINITY, |best, ((l2, m2), &x)| {
                let x_p = min_image(l2 as i64 - l as i64, 16) as f64 * grid.step_p;
                let x_q = min_image(m2 as i64 - mi as i64, 16) as f64 * grid.step_q;
                if x_p * x_p + x_q * x_q <= radius * radius {
                    best.min(x)
                } else {
                    best
                }
            })
        });
        flat_ok += usize::from(erode_modulus(&m, radius, a, 0.5, &p)? == brute);
    }
    v.check(quad_ok == 100, format!("quadratic kernel: {quad_ok}/100 fields identical"));
    v.check(flat_ok == 100, format!("flat kernel: {flat_ok}/100 fields identical"));
    Ok(v)
}

fn random_frame(r: &mut ChaCha8Rng) -> gaborflow::Result<EigenFrame> {
    let c = ChirpParams::new(r.gen_range(0.3..2.0), r.gen_range(-3.0..3.0))?;
    Ok(ChirpOracle::new(c)?.frame)
}

/// Golden-section refinement of the sampled circle minimum.
fn refined_circle_minimum(frame: &EigenFrame, p: f64, q: f64, t: f64, samples: usize) -> f64 {
    let rm = frame.matrix();
    let f = |th: f64| {
        let x = Vector2::new(p + t * th.cos(), q + t * th.sin());
        x.dot(&(rm * x))
    };
    let h = TAU / samples as f64;
    let best = (0..samples).map(|i| i as f64 * h).min_by(|a, b| f(*a).total_cmp(&f(*b))).expect("samples > 0");
    let (mut lo, mut hi) = (best - h, best + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    f(0.5 * (lo + hi))
}

/// Outer extent of `{x : eroded exponent ≥ -c}` along a ray.
fn contour_radius(frame: &EigenFrame, dir: [f64; 2], t: f64, c: f64, outer: f64) -> gaborflow::Result<f64> {
    let (mut lo, mut hi) = (0.0, outer);
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        let x = frame.point(mid * dir[0], mid * dir[1]);
        if lagrange_multiplier(frame, x[0], x[1], t)?.value >= -c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn chirp_suite() -> Check {
    let mut v = Verdict::new();
    let start = Instant::now();
    let mut r = rng(6);
    let cases = 1000;
    let (mut quartic, mut helper, mut scaling, mut circle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cases {
        let frame = random_frame(&mut r)?;
        let (p, q, t) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(0.01..0.5));
        let root = lagrange_multiplier(&frame, p, q, t)?;
        let (a1, a2) = frame.alpha(p, q);
        quartic = quartic.max(scaled_residual(&quartic_coefficients(&frame, a1, a2, t), root.lambda));
        let sum: f64 = [(frame.l1, a1), (frame.l2, a2)]
            .iter()
            .map(|&(l, a)| (l * a / (l - root.lambda)).powi(2))
            .sum();
        helper = helper.max((sum - t * t).abs() / (t * t));
        for zeta in [0.5, 2.0] {
            let scaled = lagrange_multiplier(&frame, zeta * p, zeta * q, zeta * t)?;
            scaling = scaling.max((scaled.lambda - root.lambda).abs() / root.lambda.abs());
        }
        let brute = refined_circle_minimum(&frame, p, q, t, 10_000);
        circle = circle.max((brute - root.value).abs() / root.value.abs().max(1.0));
    }
    v.check(quartic <= 1e-9, format!("quartic residual {quartic:.2e} (<= 1e-9)"));
    v.check(helper <= 1e-9, format!("multiplier identity {helper:.2e} (<= 1e-9)"));
    v.check(scaling <= 1e-9, format!("scaling property {scaling:.2e} (<= 1e-9)"));
    v.check(circle <= 1e-6, format!("circle-sampled minimum {circle:.2e} (<= 1e-6)"));

    let mut continuity = 0.0f64;
    for i in 0..cases {
        let frame = random_frame(&mut r)?;
        let t = r.gen_range(0.01..0.5);
        let s = r.gen_range(0.1..1.0) * if i % 2 == 0 { 1.0 } else { -1.0 };
        let (on, off) = if i % 4 < 2 {
            (frame.point(0.0, s), frame.point(1e-9, s))
        } else {
            let t_axis = t_max(&frame, s)?;
            if t > t_axis {
                continue;
            }
            (frame.point(s, 0.0), frame.point(s, 1e-9))
        };
        let exact = lagrange_multiplier(&frame, on[0], on[1], t)?;
        let near = lagrange_multiplier(&frame, off[0], off[1], t)?;
        debug_assert!(exact.branch != Branch::Generic && near.branch == Branch::Generic);
        let gap_l = (exact.lambda - near.lambda).abs() / exact.lambda.abs();
        let gap_v = (exact.value.exp() - near.value.exp()).abs() / exact.value.exp().max(f64::MIN_POSITIVE);
        continuity = continuity.max(gap_l).max(gap_v);
    }
    v.check(continuity <= 1e-6, format!("axis-branch continuity {continuity:.2e} (<= 1e-6)"));

    // The axis formula holds while the disc fits the end of the major axis,
    // i.e. t below the curvature radius b²/a of the level ellipse.
    let mut anis = 0.0f64;
    let rays = 64;
    for _ in 0..cases {
        let frame = random_frame(&mut r)?;
        let c = r.gen_range(0.5..3.0);
        let (major, minor) = ((c / frame.l1.abs()).sqrt(), (c / frame.l2.abs()).sqrt());
        let t = r.gen_range(0.05..0.95) * minor.min(minor * minor / major);
        let (mut e1, mut e2) = (0.0f64, 0.0f64);
        for j in 0..rays {
            // Rays spread by elliptic angle so elongated contours are sampled
            // evenly near both vertices.
            let th = TAU * (j as f64 + 0.5) / rays as f64;
            let (u, w) = (major * th.cos(), minor * th.sin());
            let len = u.hypot(w);
            let dir = [u / len, w / len];
            let rad = contour_radius(&frame, dir, t, c, major)?;
            e1 = e1.max((rad * dir[0]).abs());
            e2 = e2.max((rad * dir[1]).abs());
        }
        let predicted = gaborflow::chirp::collapse_anisotropy(&frame, t, c)?;
        anis = anis.max(((e1 / e2) - predicted).abs() / predicted);
    }
    v.check(anis <= 0.05, format!("anisotropy vs measured contour {:.2}% (<= 5%)", 100.0 * anis));
    let secs = start.elapsed().as_secs_f64();
    v.check(secs < 60.0, format!("runtime {secs:.1} s (< 60 s)"));
    Ok(v)
}

fn covariance() -> Check {
    let mut v = Verdict::new();
    let a = 0.25;
    let p = GaborParams::new(64, 32, 32, 64, a)?;
    let tf = GaborTransform::new(p, Window::gaussian(&p))?;
    let mut r = rng(7);
    let f: Vec<Complex64> = random_signal(64, &mut r);
    let g = tf.analyze(&f)?;
    let beta = DiffusionParams::default_beta(&p);
    let (h1, h2) = (beta * beta * p.dp(), p.dq());
    let dt = 0.2 * (h1 * h1).min(h2 * h2);
    let ops: Vec<(&str, Box<dyn Fn(&PhaseField) -> gaborflow::Result<PhaseField>>)> = vec![
        ("upwind", Box::new(move |g| Ok(reassign(g, &ReassignParams::upwind(0.01, 1e-3, a)?)?.field))),
        ("erosion", Box::new(move |g| Ok(reassign(g, &ReassignParams::erosion(0.05, a, 1.0)?)?.field))),
        ("flat erosion", Box::new(move |g| Ok(reassign(g, &ReassignParams::erosion(0.3, a, 0.5)?)?.field))),
        ("ced", Box::new(move |g| ced_evolve(g, &DiffusionParams::new(beta, 0.2, 1e-3, 1.0, dt, 10.0 * dt)?))),
        ("linear smoothing", Box::new(|g| linear_smooth(g, &SmoothingParams::new(1e-3, 1.0, 1.0, 0.5, 1e-8)?))),
    ];
    for (name, op) in ops {
        let base = op(&g)?;
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let h = GroupElement::new(r.gen_range(0..32), r.gen_range(0..32), r.gen_range(0..64), &p);
            let shifted = op(&tf.analyze(&shift_signal(&f, h, &p)?)?)?;
            worst = worst.max(shifted.max_abs_diff(&base.translate(h)));
        }
        v.check(worst <= 1e-8, format!("{name}: {worst:.2e} (<= 1e-8)"));
    }
    Ok(v)
}

/// Periodic heat flow `u_t = Δu` on a unit-step grid, exact in Fourier space.
fn heat_flow(u: &Array2<Complex64>, t: f64) -> Array2<Complex64> {
    let mut planner = FftPlanner::new();
    let mut out = u.clone();
    for axis in 0..2 {
        let n = u.len_of(ndarray::Axis(axis));
        let (fwd, inv) = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
        for mut lane in out.lanes_mut(ndarray::Axis(axis)) {
            let mut buf = lane.to_vec();
            fwd.process(&mut buf);
            for (j, z) in buf.iter_mut().enumerate() {
                let k = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                let w = TAU * k / n as f64;
                *z *= (-t * w * w).exp() / n as f64;
            }
            inv.process(&mut buf);
            lane.iter_mut().zip(buf).for_each(|(x, y)| *x = y);
        }
    }
    out
}

fn diffusion_properties() -> Check {
    let mut v = Verdict::new();
    let p = GaborParams::paper128();
    let chirp = ChirpSignal { params: ChirpParams::new(0.15, 50.0)?, centre: 0.5, carrier: 32.0 };
    let g = GaborTransform::new(p, Window::gaussian(&p))?.analyze(&chirp.sample(128))?;
    let beta = DiffusionParams::default_beta(&p);
    let (h1, h2) = (beta * beta * p.dp(), p.dq());
    let dt = 0.2 * (h1 * h1).min(h2 * h2);
    let mut norms = vec![g.norm()];
    for k in 1..=15 {
        let dp = DiffusionParams::new(beta, 0.1, 1e-6, 1.5, dt, dt * k as f64)?;
        norms.push(ced_evolve(&g, &dp)?.norm());
    }
    let monotone = norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14));
    v.check(monotone, format!("l2 norm over 15 steps: {:.6e} -> {:.6e}, decreasing every step", norms[0], norms[15]));

    let p = GaborParams::square(64, 128, 0.125)?;
    let data = Array2::from_shape_fn((64, 64), |(l, m)| {
        let x = (l as f64 - 32.0) / 8.0;
        let y = if m < 32 { m as f64 } else { m as f64 - 64.0 } / 2.0;
        Complex64::new((-0.5 * (x * x + y * y)).exp(), 0.0)
    });
    let g = PhaseField::new(p, data)?;
    let (dt, steps) = (0.002, 5);
    let dp = DiffusionParams::new(DiffusionParams::default_beta(&p), 1.0, 1.0, 0.0, dt, dt * steps as f64)?;
    let out = ced_evolve(&g, &dp)?;
    let gap = (out.data() - &heat_flow(g.data(), dt * steps as f64)).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / g.norm();
    v.check(gap <= 1e-3, format!("isotropic limit vs Gaussian smoothing: {gap:.2e} (<= 1e-3)"));

    let p = GaborParams::new(64, 16, 16, 16, 0.5)?;
    let mut r = rng(8);
    let g = GaborTransform::new(p, Window::gaussian(&p))?.analyze(&random_signal(64, &mut r))?;
    let beta = DiffusionParams::default_beta(&p);
    let (h1, h2) = (beta * beta * p.dp(), p.dq());
    let dt = 0.2 * (h1 * h1).min(h2 * h2);
    let dp = DiffusionParams::new(beta, 0.3, 1e-3, 1.0, dt, 8.0 * dt)?;
    let direct = ced_evolve(&g, &dp)?;
    let via = apply_s(&ced_evolve_group(&apply_s_inverse(&g), &dp)?);
    let gap = direct.max_abs_diff(&via);
    v.check(gap <= 1e-12, format!("group and phase-space evolutions: {gap:.2e} (<= 1e-12)"));
    Ok(v)
}

fn deformation_pipeline() -> Check {
    let mut v = Verdict::new();
    let a = Matrix2::new(1.04, -0.07, 0.05, 0.97);
    let prev: Vec<FrequencyField> = [[8.0, 0.0], [6.0, 6.0], [0.0, 8.0], [-6.0, 6.0]]
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let q = Array2::from_shape_fn((32, 32), |(x, y)| {
                canonical(Vector2::new(k[0] + 0.01 * (x * i) as f64, k[1] - 0.02 * y as f64))
            });
            FrequencyField { q, valid: Array2::from_elem((32, 32), true), spacing: [2.0, 2.0], bin: [1.0, 1.0] }
        })
        .collect();
    let inv_t = a.transpose().try_inverse().expect("invertible");
    let next: Vec<FrequencyField> =
        prev.iter().map(|f| FrequencyField { q: f.q.mapv(|q| canonical(inv_t * q)), ..f.clone() }).collect();
    let d = deformation_gradient(&next, &prev, DEFAULT_MAX_CONDITION)?;
    let worst = d.d.iter().zip(&d.valid).filter(|(_, &ok)| ok).map(|(m, _)| (m - a).norm()).fold(0.0, f64::max);
    v.check(worst <= 1e-10, format!("affine gradient recovered: {worst:.2e} (<= 1e-10)"));

    let grid = PolarGrid::inward([32.0, 32.0], 20.0, 2.0, 8, 50);
    let tp = TrackingParams::standard64()?;
    let spec = PhantomSpec::standard();
    let ph = make_phantom(&spec, &grid)?;
    let net = track_stack(&ph.stack, &tp)?.net(&ph.seed(), &ph.truth[0])?;
    let last = spec.frames - 1;
    let err = net.mean_error(last, &ph.truth[last]);
    v.check(err <= 0.5, format!("phantom net mean error at frame {last}: {err:.3} px (<= 0.5)"));

    let spec = PhantomSpec::static_with_fading(0.7);
    let ph = make_phantom(&spec, &grid)?;
    let tracking = track_stack(&ph.stack, &tp)?;
    let (sum, count) = tracking
        .gradients
        .iter()
        .flat_map(|g| g.d.iter().zip(&g.valid))
        .filter(|(_, &ok)| ok)
        .fold((0.0, 0usize), |(s, c), (m, _)| (s + (m - Matrix2::identity()).norm(), c + 1));
    let mean = sum / count.max(1) as f64;
    v.check(count > 0 && mean <= 1e-2, format!("fading-only mean |D - I|: {mean:.2e} (<= 1e-2)"));
    Ok(v)
}

fn texture() -> Array2<f64> {
    let blobs = [([18.0, 20.0], [7.0, 3.0]), ([44.0, 40.0], [-2.0, 9.0]), ([22.0, 48.0], [5.0, 5.0]), ([46.0, 14.0], [9.0, -4.0])];
    Array2::from_shape_fn((64, 64), |(x, y)| {
        let (x, y) = (x as f64, y as f64);
        blobs
            .iter()
            .map(|(c, k)| {
                let d2 = (x - c[0]).powi(2) + (y - c[1]).powi(2);
                (-d2 / (2.0 * 8.0 * 8.0)).exp() * (TAU * (k[0] * x + k[1] * y) / 64.0).cos()
            })
            .sum()
    })
}

fn reassignment_2d() -> Check {
    let mut v = Verdict::new();
    let p = GaborParams::new(64, 32, 32, 32, 1.0)?;
    let g = Gabor2d::new([p, p], WindowKind::SampledGaussian)?.analyze(&texture())?;
    let original_peak = g.modulus().iter().copied().fold(0.0, f64::max);
    let counts = |m: &ndarray::Array4<f64>| {
        let peak = m.iter().copied().fold(0.0, f64::max);
        let above = |level: f64| m.iter().filter(|&&x| x > 0.5 * level).count();
        (above(peak), above(original_peak))
    };
    // The quadratic cost per grid step is (1/32)²/(4t); erosion starts to act
    // once that falls to the size of neighbouring modulus differences.
    let mut rows = vec![(0.0, counts(&g.modulus()))];
    for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
        rows.push((t, counts(&reassign2d(&g, &ReassignParams::erosion(t, 1.0, 1.0)?)?.modulus())));
    }
    let own = rows.iter().map(|(t, c)| format!("t={t}: {}", c.0)).collect::<Vec<_>>().join(", ");
    let fixed = rows.iter().map(|(t, c)| format!("t={t}: {}", c.1)).collect::<Vec<_>>().join(", ");
    v.check(rows.windows(2).all(|w| w[1].1 .0 < w[0].1 .0), format!("cells above half of the current max: {own}"));
    v.note(format!("cells above half of the initial max: {fixed}"));
    Ok(v)
}

fn main() {
    let criteria: [(&str, fn() -> Check, bool); 10] = [
        ("perfect reconstruction", perfect_reconstruction, true),
        ("chirp reassignment regression", table_regression, false),
        ("discrete-to-exact convergence", convergence, true),
        ("Cauchy-Riemann window", cr_window, true),
        ("erosion oracle equivalence", erosion_oracle, true),
        ("chirp oracle invariants", chirp_suite, true),
        ("left invariance", covariance, true),
        ("diffusion properties", diffusion_properties, true),
        ("deformation pipeline", deformation_pipeline, true),
        ("2d reassignment concentration", reassignment_2d, true),
    ];
    let mut gating_failures = 0;
    for (i, (name, run, gating)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let verdict = run().unwrap_or_else(|e| Verdict { pass: false, details: vec![format!("FAIL error: {e}")] });
        let tag = if verdict.pass { "PASS" } else { "FAIL" };
        let note = if gating { "" } else { " (reported, non-gating)" };
        println!("[{tag}] {:>2}. {name}{note} [{:.1} s]", i + 1, start.elapsed().as_secs_f64());
        for d in &verdict.details {
            println!("        {d}");
        }
        if gating && !verdict.pass {
            gating_failures += 1;
        }
    }
    if gating_failures > 0 {
        println!("{gating_failures} gating criteria failed");
        std::process::exit(1);
    }
}

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use gaborflow::chirp::{ChirpOracle, ChirpParams, ChirpSignal};
use gaborflow::deform::{
    frequency_field, gabor2d_analysis, make_phantom, reassign2d, track_stack, DeformationNet, NetPoint, PhantomSpec,
    PolarGrid, TrackingParams,
};
use gaborflow::diffusion::{
    ced_evolve, cfl_bound, conductivity_field, linear_smooth, Adaptivity, DiffusionParams, SmoothingParams,
};
use gaborflow::io::{self, RunReport};
use gaborflow::reassign::{
    energy_rescale, reassign as run_reassign, reconstruction_errors, Method, ReassignParams, UpwindScheme,
};
use gaborflow::{Complex64, Error, GaborParams, GaborTransform, PhaseField, Window, WindowKind};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::json;

use crate::args::*;
use crate::stack::{read_seed, write_seed, StackManifest};

type Outcome = anyhow::Result<RunReport>;

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidParams(msg.into()).into()
}

fn warn_grid(p: &GaborParams) {
    for w in p.warnings() {
        eprintln!("warning: {w}");
    }
}

/// Explicit flags override the preset; missing ones default from `N`.
fn resolve_grid(g: &GridArgs, signal_len: usize) -> anyhow::Result<GaborParams> {
    let base = match g.preset.as_deref() {
        Some(name) => Some(GaborParams::preset(name).ok_or_else(|| invalid(format!("unknown preset {name:?}")))?),
        None => None,
    };
    let n = g.n.or(base.map(|p| p.n())).unwrap_or(signal_len);
    let k = g.k.or(base.map(|p| p.k())).unwrap_or(n);
    let m = g.m.or(base.map(|p| p.m())).unwrap_or(n);
    let q = match g.q.or(base.map(|p| p.q())) {
        Some(q) => q,
        // The smallest Q that is a multiple of 2P.
        None if k > 0 && n.is_multiple_of(k) && (n / k) > 0 && m.is_multiple_of(n / k) => 2 * m / (n / k),
        None => return Err(invalid(format!("cannot derive Q from N = {n}, K = {k}, M = {m}; pass --q"))),
    };
    let a = g.a.or(base.map(|p| p.a())).ok_or_else(|| invalid("the window scale needs --a or --preset"))?;
    let p = GaborParams::new(n, k, m, q, a)?;
    warn_grid(&p);
    Ok(p)
}

fn transform(p: GaborParams, kind: WindowKind) -> gaborflow::Result<GaborTransform> {
    GaborTransform::new(p, Window::new(kind, &p)?)
}

pub fn chirp(a: ChirpArgs) -> Outcome {
    let signal = ChirpSignal { params: ChirpParams::new(a.b, a.r)?, centre: a.centre, carrier: a.carrier };
    if a.n == 0 {
        return Err(invalid("signal length must be positive"));
    }
    let f = signal.sample(a.n);
    io::write_signal(&a.output, &f)?;
    let mut report =
        RunReport::new("chirp", json!({ "n": a.n, "b": a.b, "r": a.r, "centre": a.centre, "carrier": a.carrier }));
    report.metric("norm", gaborflow::l2_norm(&f));
    report.outputs.push(a.output);
    Ok(report)
}

pub fn gabor(a: GaborArgs) -> Outcome {
    let kind = WindowKind::from(a.window);
    if a.inverse {
        let g = io::read_phase_field(&a.input)?;
        let p = *g.params();
        let f = transform(p, kind)?.synthesize(&g)?;
        io::write_signal(&a.output, &f)?;
        let mut report = RunReport::new("gabor", json!({ "inverse": true, "window": kind, "params": p }));
        if let Some(reference) = &a.reference {
            let e = reconstruction_errors(&io::read_signal(reference)?, &f)?;
            report.metric("eps1", e.eps1).metric("eps2", e.eps2);
        }
        report.outputs.push(a.output);
        return Ok(report);
    }
    let f = io::read_signal(&a.input)?;
    let p = resolve_grid(&a.grid, f.len())?;
    let g = transform(p, kind)?.analyze(&f)?;
    io::write_phase_field(&a.output, &g)?;
    let mut report = RunReport::new("gabor", json!({ "inverse": false, "window": kind, "params": p }));
    report.metric("signal_norm", gaborflow::l2_norm(&f)).metric("field_norm", g.norm());
    report.outputs.push(a.output);
    if let Some(path) = a.render {
        io::render_field(g.data(), io::RenderStyle::Overlay).write_ppm(&path)?;
        report.outputs.push(path);
    }
    Ok(report)
}

pub fn reassign(a: ReassignArgs) -> Outcome {
    let g = io::read_phase_field(&a.input)?;
    let p = *g.params();
    let scale = a.a.unwrap_or(p.a());
    let rp = match a.method {
        MethodArg::Erosion => ReassignParams::erosion(a.t, scale, a.eta)?,
        MethodArg::Upwind => {
            if a.eta != 1.0 {
                return Err(invalid(format!("the upwind scheme uses the quadratic kernel only, got eta = {}", a.eta)));
            }
            let scheme = match a.scheme {
                SchemeArg::Consistent => UpwindScheme::Consistent,
                SchemeArg::Published => UpwindScheme::Published,
            };
            ReassignParams::upwind(a.t, a.dt, scale)?.with_scheme(scheme)
        }
    };
    let out = run_reassign(&g, &rp)?;
    io::write_phase_field(&a.output, &out.field)?;
    let kind = WindowKind::from(a.window);
    let mut report = RunReport::new("reassign", json!({ "reassign": rp, "window": kind, "params": p }));
    report.metric("frozen_cells", out.frozen_cells as f64).metric("steps", out.steps as f64);
    if let Some(reference) = &a.reference {
        let f = io::read_signal(reference)?;
        let mut rec = transform(p, kind)?.synthesize(&out.field)?;
        if a.rescale {
            rec = energy_rescale(&rec, &f)?;
        }
        let e = reconstruction_errors(&f, &rec)?;
        report.metric("eps1", e.eps1).metric("eps2", e.eps2);
    }
    if rp.method == Method::Erosion && a.dt != 1e-3 {
        eprintln!("warning: --dt is ignored by erosion");
    }
    report.outputs.push(a.output);
    Ok(report)
}

pub fn diffuse(a: DiffuseArgs) -> Outcome {
    let g = io::read_phase_field(&a.input)?;
    let p = *g.params();
    let (out, parameters) = match a.mode {
        DiffuseMode::Ced => {
            let beta = a.beta.unwrap_or_else(|| DiffusionParams::default_beta(&p));
            let adaptivity = match a.adaptivity {
                AdaptivityArg::Hessian => Adaptivity::Hessian,
                AdaptivityArg::StructureTensor => Adaptivity::StructureTensor,
            };
            // A provisional step only to evaluate the stability bound.
            let probe = DiffusionParams::new(beta, a.eps, a.c, a.sigma, 1.0, a.t)?.with_adaptivity(adaptivity);
            let bound = cfl_bound(&conductivity_field(&g.modulus(), &probe, &p), &probe, &p);
            let dt = a.dt.unwrap_or(0.9 * bound);
            let dp = DiffusionParams { dt, readapt: a.readapt, ..probe };
            dp.validate()?;
            (ced_evolve(&g, &dp)?, json!({ "mode": "ced", "diffusion": dp, "cfl_bound": bound, "params": p }))
        }
        DiffuseMode::Linear => {
            let sp = SmoothingParams::new(a.d11, a.d22, a.c_loc, a.t, a.truncation)?;
            (linear_smooth(&g, &sp)?, json!({ "mode": "linear", "smoothing": sp, "params": p }))
        }
    };
    io::write_phase_field(&a.output, &out)?;
    let mut report = RunReport::new("diffuse", parameters);
    report.metric("input_norm", g.norm()).metric("output_norm", out.norm());
    report.outputs.push(a.output);
    Ok(report)
}

/// Signed representative of `i` modulo `n`, in `[-n/2, n/2)`.
fn wrapped(i: usize, n: usize) -> f64 {
    if i < n.div_ceil(2) {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

pub fn chirp_oracle(a: ChirpOracleArgs) -> Outcome {
    if a.eta != 0.5 {
        return Err(invalid(format!("the closed form covers the flat kernel (eta = 0.5) only, got eta = {}", a.eta)));
    }
    let [k, m] = a.grid[..] else {
        return Err(invalid("--grid takes K and M"));
    };
    let grid = GridArgs { preset: None, n: a.n.or(Some(m)), k: Some(k), m: Some(m), q: a.q, a: Some(a.a) };
    let p = resolve_grid(&grid, k)?;
    let params = ChirpParams::new(a.b, a.r)?;
    // The oracle works at unit window scale; the dilated chirp carries `a`.
    let oracle = ChirpOracle::new(params.dilated(a.a))?;
    let cells: Vec<gaborflow::Result<Complex64>> = (0..p.k() * p.m())
        .map(|idx| {
            let (l, mm) = (idx / p.m(), idx % p.m());
            let (pp, qq) = (wrapped(l, p.k()) * p.dp(), wrapped(mm, p.m()) * p.dq());
            ChirpOracle::eroded_scaled(params, a.a, a.t, pp, qq, -0.5 * pp * qq)
        })
        .collect();
    let data = cells.into_iter().collect::<gaborflow::Result<Vec<_>>>()?;
    let field = PhaseField::new(p, Array2::from_shape_vec((p.k(), p.m()), data).context("assembling the field")?)?;
    io::write_phase_field(&a.output, &field)?;

    let frame = oracle.frame;
    let info = json!({
        "lambda1": frame.l1,
        "lambda2": frame.l2,
        "k1": frame.k1,
        "k2": frame.k2,
        "level": a.level,
        "t_fin": oracle.collapse_time(a.level),
    });
    match &a.info {
        Some(path) => io::write_json(path, &info)?,
        None => println!("{}", serde_json::to_string_pretty(&info)?),
    }
    let mut report = RunReport::new(
        "chirp-oracle",
        json!({ "b": a.b, "r": a.r, "a": a.a, "t": a.t, "eta": a.eta, "params": p, "spectrum": info }),
    );
    report.metric("field_norm", field.norm());
    report.outputs.push(a.output);
    report.outputs.extend(a.info);
    Ok(report)
}

fn analysis_params(an: &AnalysisArgs, dim: (usize, usize)) -> anyhow::Result<TrackingParams> {
    if !(an.sigma.is_finite() && an.sigma > 0.0) {
        return Err(invalid(format!("window sigma must be positive, got {}", an.sigma)));
    }
    let axis = |n: usize| {
        let a = an.sigma * std::f64::consts::TAU.sqrt() / n as f64;
        GaborParams::new(n, an.k.unwrap_or(n / 2), an.m.unwrap_or(n), an.q.unwrap_or(n), a)
    };
    let mut tp = TrackingParams::new([axis(dim.0)?, axis(dim.1)?]);
    tp.dc_mask = an.dc_mask;
    tp.refine = an.refine.into();
    tp.remove_mean = !an.keep_mean;
    tp.reassign = an.reassign_t.map(|t| ReassignParams::erosion(t, 1.0, 1.0)).transpose()?;
    Ok(tp)
}

fn analysis_json(tp: &TrackingParams) -> serde_json::Value {
    serde_json::to_value(tp).unwrap_or_default()
}

pub fn freqfield(a: FreqfieldArgs) -> Outcome {
    let img = io::read_image(&a.input)?;
    let tp = analysis_params(&a.analysis, img.dim())?;
    let img = if tp.remove_mean {
        let mean = img.mean().unwrap_or(0.0);
        img.mapv(|v| v - mean)
    } else {
        img
    };
    let windows = [Window::new(tp.window, &tp.gabor[0])?, Window::new(tp.window, &tp.gabor[1])?];
    let mut g = gabor2d_analysis(&img, [&windows[0], &windows[1]], tp.gabor)?;
    if let Some(rp) = &tp.reassign {
        g = reassign2d(&g, rp)?;
    }
    let field = frequency_field(&g, tp.dc_mask, tp.refine)?;
    io::write_frequency_field(&a.output, &field)?;
    let mut report = RunReport::new("freqfield", json!({ "analysis": analysis_json(&tp) }));
    let valid = field.valid.iter().filter(|&&v| v).count();
    report.metric("valid_positions", valid as f64).metric("positions", field.valid.len() as f64);
    report.outputs.push(a.output);
    if let Some(path) = a.render {
        io::render_frequency_field(&field, 0.25).write_ppm(&path)?;
        report.outputs.push(path);
    }
    Ok(report)
}

fn polar_grid(pa: &PolarArgs, default_centre: [f64; 2]) -> anyhow::Result<PolarGrid> {
    let centre = match pa.centre.as_deref() {
        Some(&[r, c]) => [r, c],
        Some(_) => return Err(invalid("--centre takes a row and a column")),
        None => default_centre,
    };
    if pa.rings == 0 || pa.points == 0 || !(pa.outer > 0.0) || !(pa.step >= 0.0) {
        return Err(invalid("the polar grid needs rings, points, a positive outer radius and a non-negative step"));
    }
    if pa.outer - pa.step * (pa.rings - 1) as f64 <= 0.0 {
        return Err(invalid("the innermost ring would have non-positive radius"));
    }
    Ok(PolarGrid::inward(centre, pa.outer, pa.step, pa.rings, pa.points))
}

fn as_net(positions: &[Vec<Vec<[f64; 2]>>]) -> DeformationNet {
    let frames = positions
        .iter()
        .map(|f| f.iter().map(|r| r.iter().map(|&x| NetPoint { x, masked: false }).collect()).collect())
        .collect();
    DeformationNet { frames }
}

pub fn defnet(a: DefnetArgs) -> Outcome {
    let (_, stack) = StackManifest::load(&a.manifest)?;
    let dim = stack.images[0][0].dim();
    let tp = analysis_params(&a.analysis, dim)?;
    let truth = a.truth.as_deref().map(io::read_net_csv).transpose()?;
    let seed = match (&a.seed, &truth) {
        (Some(path), _) => read_seed(path)?,
        (None, Some(t)) => t.iter().map(|f| f[0][0]).collect(),
        (None, None) => return Err(invalid("defnet needs --seed or --truth")),
    };
    if seed.len() != stack.frames() {
        return Err(invalid(format!("seed covers {} frames, the stack has {}", seed.len(), stack.frames())));
    }
    let grid0 = match &truth {
        Some(t) if a.polar.centre.is_none() => t[0].clone(),
        _ => polar_grid(&a.polar, [dim.0 as f64 / 2.0, dim.1 as f64 / 2.0])?.points(),
    };
    let tracking = track_stack(&stack, &tp)?;
    let net = tracking.net(&seed, &grid0)?;
    io::write_net_csv(&a.output, &net)?;

    let mut report = RunReport::new("defnet", json!({ "analysis": analysis_json(&tp), "frames": stack.frames() }));
    let masked = net.frames.iter().flatten().flatten().filter(|p| p.masked).count();
    report.metric("masked_points", masked as f64);
    if let Some(t) = &truth {
        if t.len() != net.frames.len() {
            bail!(Error::InvalidParams(format!("truth has {} frames, the stack has {}", t.len(), net.frames.len())));
        }
        let errors: Vec<f64> = (0..t.len()).map(|i| net.mean_error(i, &t[i])).collect();
        report.metric("final_mean_error", *errors.last().unwrap_or(&0.0));
        report.metric("max_mean_error", errors.iter().copied().fold(0.0, f64::max));
    }
    report.outputs.push(a.output);
    if let Some(dir) = a.render_dir {
        std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
        for (t, frame) in net.frames.iter().enumerate() {
            let path = dir.join(format!("net_{t:03}.ppm"));
            io::render_net(&stack.images[t][0], frame).write_ppm(&path)?;
            report.outputs.push(path);
        }
    }
    Ok(report)
}

fn image_name(t: usize, i: usize, pgm: bool) -> PathBuf {
    PathBuf::from(format!("frame{t:03}_tag{i}.{}", if pgm { "pgm" } else { "f64" }))
}

fn write_stack_image(path: &Path, img: &Array2<f64>, pgm_bits: Option<u8>) -> gaborflow::Result<()> {
    match pgm_bits {
        Some(bits) => io::write_pgm(path, img, bits),
        None => io::write_real_image(path, img),
    }
}

pub fn phantom(a: PhantomArgs) -> Outcome {
    let mut spec = match &a.spec {
        Some(path) => io::read_json::<PhantomSpec>(path)?,
        None => PhantomSpec::standard(),
    };
    if a.still {
        spec = PhantomSpec { scale: 0.0, scale_slope: 0.0, rotation: 0.0, rotation_slope: 0.0, ..spec };
    }
    spec.frames = a.frames.unwrap_or(spec.frames);
    spec.fading = a.fading.unwrap_or(spec.fading);
    if !(a.noise.is_finite() && a.noise >= 0.0) {
        return Err(invalid(format!("noise level must be non-negative, got {}", a.noise)));
    }
    let grid = polar_grid(&a.polar, spec.centre)?;
    let mut phantom = make_phantom(&spec, &grid)?;
    if a.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let normal = Normal::new(0.0, a.noise).map_err(|e| invalid(e.to_string()))?;
        for img in phantom.stack.images.iter_mut().flatten() {
            img.mapv_inplace(|v| v + normal.sample(&mut rng));
        }
    }

    let dir = &a.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
    let bits = a.pgm.as_deref().map(|b| if b == "16" { 16 } else { 8 });
    let mut frames = Vec::with_capacity(spec.frames);
    let mut report = RunReport::new(
        "phantom",
        json!({ "spec": spec, "noise": a.noise, "seed": a.seed, "pgm_bits": bits }),
    );
    for (t, frame) in phantom.stack.images.iter().enumerate() {
        let mut names = Vec::with_capacity(frame.len());
        for (i, img) in frame.iter().enumerate() {
            let name = image_name(t, i, bits.is_some());
            write_stack_image(&dir.join(&name), img, bits)?;
            names.push(name);
        }
        frames.push(names);
    }
    let manifest = StackManifest { directions: phantom.stack.directions.clone(), frames };
    let outputs = [dir.join("stack.json"), dir.join("truth.csv"), dir.join("seed.csv"), dir.join("phantom.json")];
    io::write_json(&outputs[0], &manifest)?;
    io::write_net_csv(&outputs[1], &as_net(&phantom.truth))?;
    write_seed(&outputs[2], &phantom.seed())?;
    io::write_json(&outputs[3], &spec)?;
    report.metric("frames", spec.frames as f64).metric("directions", manifest.directions.len() as f64);
    report.outputs.extend(outputs);
    Ok(report)
}

pub fn render(a: RenderArgs) -> Outcome {
    let g = io::read_phase_field(&a.input)?;
    let style = io::RenderStyle::from(a.style);
    io::render_field(g.data(), style).write_ppm(&a.output)?;
    let mut report = RunReport::new("render", json!({ "style": style }));
    report.outputs.push(a.output);
    Ok(report)
}

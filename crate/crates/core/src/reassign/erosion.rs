//! (min, +) erosion of a non-negative field by the reassignment kernels.

use ndarray::{Array2, ArrayViewMut1, Axis};
use num_complex::Complex64;
use rayon::prelude::*;

use super::ReassignParams;
use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::heisenberg::GaborParams;

/// Sampling of a field in scaled coordinates `(p/a, a·q)`, where every kernel is
/// a function of the Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErosionGrid {
    pub step_p: f64,
    pub step_q: f64,
    pub periodic: bool,
}

impl ErosionGrid {
    /// The phase-space grid of `p`: steps `1/K` and `N/M`, periodic.
    pub fn phase_space(p: &GaborParams, a: f64) -> Self {
        ErosionGrid { step_p: p.dp() / a, step_q: a * p.dq(), periodic: true }
    }

    /// Signed offsets `d` of every partner index, each partner once,
    /// measured by the minimal image when periodic.
    fn offsets(&self, n: usize) -> Vec<i64> {
        let n = n as i64;
        if self.periodic {
            (-(n - 1) / 2..=n / 2).collect()
        } else {
            (-(n - 1)..n).collect()
        }
    }

    fn partner(&self, i: usize, d: i64, n: usize) -> Option<usize> {
        let j = i as i64 + d;
        if self.periodic {
            Some(j.rem_euclid(n as i64) as usize)
        } else if (0..n as i64).contains(&j) {
            Some(j as usize)
        } else {
            None
        }
    }

    fn in_disc(&self, dl: i64, dm: i64, t: f64) -> bool {
        let (x, y) = (dl as f64 * self.step_p, dm as f64 * self.step_q);
        x * x + y * y <= t * t
    }
}

/// `inf_{p',q'} A(p',q') + K_t(p-p', q-q')` on the phase-space grid of `p`.
///
/// `eta = 1` uses `(a⁻²Δp² + a²Δq²)/(4t)`, `eta = 1/2` the flat disc of radius
/// `t`, and other `eta > 1/2` the power kernel
/// `((2η-1)/(2η)) t (ρ/t)^{2η/(2η-1)}` with `ρ` the scaled distance.
pub fn erode_modulus(m: &Array2<f64>, t: f64, a: f64, eta: f64, p: &GaborParams) -> Result<Array2<f64>> {
    if m.dim() != (p.k(), p.m()) {
        return Err(Error::ShapeMismatch(format!("modulus is {:?}, grid needs ({}, {})", m.dim(), p.k(), p.m())));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParams(format!("window scale must be positive, got {a}")));
    }
    erode_grid(m, ErosionGrid::phase_space(p, a), t, eta)
}

/// Erosion on an arbitrary grid; see [`erode_modulus`] for the kernels.
pub fn erode_grid(m: &Array2<f64>, grid: ErosionGrid, t: f64, eta: f64) -> Result<Array2<f64>> {
    if !(eta.is_finite() && eta >= 0.5) {
        return Err(Error::EtaOutOfRange(eta));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParams(format!("erosion time must be positive, got {t}")));
    }
    if m.is_empty() {
        return Ok(m.clone());
    }
    Ok(if eta == 1.0 {
        let cp = grid.step_p * grid.step_p / (4.0 * t);
        let cq = grid.step_q * grid.step_q / (4.0 * t);
        let mut out = m.clone();
        erode_quadratic_axis(&mut out, Axis(0), cp, grid.periodic);
        erode_quadratic_axis(&mut out, Axis(1), cq, grid.periodic);
        out
    } else if eta == 0.5 {
        erode_flat(m, grid, t)
    } else {
        erode_power(m, grid, t, eta)
    })
}

/// One separable pass of the quadratic kernel `c·d²` (`d` in grid steps) along
/// `axis`, in place. Works on arrays of any dimension.
pub fn erode_quadratic_axis<D: ndarray::Dimension>(
    data: &mut ndarray::Array<f64, D>,
    axis: Axis,
    c: f64,
    periodic: bool,
) {
    data.lanes_mut(axis).into_iter().par_bridge().for_each(|lane| lower_envelope(lane, c, periodic));
}

/// `out[x] = min_y f[y] + c·d(x, y)²` via the lower envelope of parabolas.
/// Periodic lanes are tripled so every minimal image is a candidate.
fn lower_envelope(mut lane: ArrayViewMut1<f64>, c: f64, periodic: bool) {
    let n = lane.len();
    if n <= 1 {
        return;
    }
    let f: Vec<f64> = lane.iter().copied().collect();
    let (lo, hi) = if periodic { (-(n as i64), 2 * n as i64) } else { (0, n as i64) };
    let val = |y: i64| f[y.rem_euclid(n as i64) as usize];
    let cost = |x: i64, y: i64| {
        let d = (x - y) as f64;
        val(y) + c * (d * d)
    };

    let mut v: Vec<i64> = Vec::with_capacity((hi - lo) as usize);
    let mut z: Vec<f64> = Vec::with_capacity((hi - lo) as usize + 1);
    v.push(lo);
    z.push(f64::NEG_INFINITY);
    z.push(f64::INFINITY);
    for q in lo + 1..hi {
        let fq = val(q);
        loop {
            let r = *v.last().unwrap();
            let s = (fq - val(r)) / (2.0 * c * (q - r) as f64) + 0.5 * (q + r) as f64;
            if s <= z[v.len() - 1] && v.len() > 1 {
                v.pop();
                z.pop();
                continue;
            }
            if s <= z[v.len() - 1] {
                // The only parabola left is dominated everywhere.
                v[0] = q;
                break;
            }
            v.push(q);
            *z.last_mut().unwrap() = s;
            z.push(f64::INFINITY);
            break;
        }
    }

    let mut k = 0;
    for x in 0..n as i64 {
        while z[k + 1] < x as f64 {
            k += 1;
        }
        // Neighbouring parabolas guard against rounding in the breakpoints.
        let mut best = cost(x, v[k]);
        if k > 0 {
            best = best.min(cost(x, v[k - 1]));
        }
        if k + 1 < v.len() {
            best = best.min(cost(x, v[k + 1]));
        }
        lane[x as usize] = best;
    }
}

/// Flat disc: for each row offset a periodic sliding-window minimum over the
/// admissible column half-width.
fn erode_flat(m: &Array2<f64>, grid: ErosionGrid, t: f64) -> Array2<f64> {
    let (kk, mm) = m.dim();
    let rows: Vec<(i64, usize)> = grid
        .offsets(kk)
        .into_iter()
        .filter_map(|dl| {
            if !grid.in_disc(dl, 0, t) {
                return None;
            }
            let mut w = 0usize;
            while w < mm && grid.in_disc(dl, w as i64 + 1, t) {
                w += 1;
            }
            Some((dl, w))
        })
        .collect();
    let mut out = Array2::from_elem((kk, mm), f64::INFINITY);
    out.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(l, mut row_out)| {
        for &(dl, w) in &rows {
            let Some(src) = grid.partner(l, dl, kk) else { continue };
            let windowed = window_min(m.row(src).to_vec(), w, grid.periodic);
            for (o, x) in row_out.iter_mut().zip(windowed) {
                if x < *o {
                    *o = x;
                }
            }
        }
    });
    out
}

/// `out[i] = min_{|d| ≤ w} f[i + d]`, wrapping or clipping at the ends.
fn window_min(f: Vec<f64>, w: usize, periodic: bool) -> Vec<f64> {
    let n = f.len();
    if periodic && 2 * w + 1 >= n {
        let g = f.iter().copied().fold(f64::INFINITY, f64::min);
        return vec![g; n];
    }
    let (lo, hi) = if periodic { (-(w as i64), (n + w) as i64) } else { (0, n as i64) };
    let at = |j: i64| f[j.rem_euclid(n as i64) as usize];
    let mut out = vec![0.0; n];
    let mut dq: std::collections::VecDeque<i64> = std::collections::VecDeque::new();
    let mut next = lo;
    for i in 0..n as i64 {
        let right = (i + w as i64).min(hi - 1);
        while next <= right {
            while dq.back().is_some_and(|&b| at(b) >= at(next)) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        let left = if periodic { i - w as i64 } else { (i - w as i64).max(0) };
        while dq.front().is_some_and(|&f0| f0 < left) {
            dq.pop_front();
        }
        out[i as usize] = at(*dq.front().unwrap());
    }
    out
}

/// Power kernel by direct minimisation over a table of offsets; offsets whose
/// kernel value exceeds the data range are dropped as they can never win.
fn erode_power(m: &Array2<f64>, grid: ErosionGrid, t: f64, eta: f64) -> Array2<f64> {
    let (kk, mm) = m.dim();
    let range = m.iter().copied().fold(f64::NEG_INFINITY, f64::max) - m.iter().copied().fold(f64::INFINITY, f64::min);
    let power = 2.0 * eta / (2.0 * eta - 1.0);
    let coef = (2.0 * eta - 1.0) / (2.0 * eta) * t;
    let mut table = Vec::new();
    for dl in grid.offsets(kk) {
        for dm in grid.offsets(mm) {
            let (x, y) = (dl as f64 * grid.step_p, dm as f64 * grid.step_q);
            let k = coef * ((x * x + y * y).sqrt() / t).powf(power);
            if k <= range {
                table.push((dl, dm, k));
            }
        }
    }
    let mut out = Array2::zeros((kk, mm));
    out.axis_iter_mut(Axis(0)).into_par_iter().enumerate().for_each(|(l, mut row)| {
        for (mi, o) in row.iter_mut().enumerate() {
            let mut best = m[(l, mi)];
            for &(dl, dm, k) in &table {
                if let (Some(a), Some(b)) = (grid.partner(l, dl, kk), grid.partner(mi, dm, mm)) {
                    best = best.min(m[(a, b)] + k);
                }
            }
            *o = best;
        }
    });
    out
}

/// Erodes the modulus and restores the original phase.
pub fn erosion_reassign(g: &PhaseField, rp: &ReassignParams) -> Result<PhaseField> {
    if rp.t_final == 0.0 {
        return Ok(g.clone());
    }
    let eroded = erode_modulus(&g.modulus(), rp.t_final, rp.a, rp.eta, g.params())?;
    let data = ndarray::Zip::from(g.data()).and(&eroded).map_collect(|&z, &e| {
        let r = z.norm();
        if r > 0.0 {
            z * (e / r)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(g.with_data(data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(kk: usize, mm: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((kk, mm), |_| rng.gen_range(0.0..1.0))
    }

    fn min_image(d: i64, n: usize, periodic: bool) -> i64 {
        if !periodic {
            return d;
        }
        let n = n as i64;
        let r = d.rem_euclid(n);
        r.min(n - r)
    }

    fn brute_quadratic(m: &Array2<f64>, cp: f64, cq: f64, periodic: bool) -> Array2<f64> {
        let (kk, mm) = m.dim();
        Array2::from_shape_fn((kk, mm), |(l, mi)| {
            let mut best = f64::INFINITY;
            for ((l2, m2), &v) in m.indexed_iter() {
                let dl = min_image(l as i64 - l2 as i64, kk, periodic) as f64;
                let dm = min_image(mi as i64 - m2 as i64, mm, periodic) as f64;
                best = best.min(v + cp * (dl * dl) + cq * (dm * dm));
            }
            best
        })
    }

    fn brute_flat(m: &Array2<f64>, grid: ErosionGrid, t: f64) -> Array2<f64> {
        let (kk, mm) = m.dim();
        Array2::from_shape_fn((kk, mm), |(l, mi)| {
            let mut best = f64::INFINITY;
            for ((l2, m2), &v) in m.indexed_iter() {
                let dl = min_image(l2 as i64 - l as i64, kk, grid.periodic);
                let dm = min_image(m2 as i64 - mi as i64, mm, grid.periodic);
                if grid.in_disc(dl, dm, t) {
                    best = best.min(v);
                }
            }
            best
        })
    }

    #[test]
    fn quadratic_matches_brute_force_exactly() {
        let p = GaborParams::square(16, 32, 0.25).unwrap();
        for trial in 0..100 {
            let m = random(16, 16, trial);
            let t = 0.002 * (1 + trial % 7) as f64;
            let grid = ErosionGrid::phase_space(&p, 0.25);
            let fast = erode_modulus(&m, t, 0.25, 1.0, &p).unwrap();
            let (cp, cq) = (grid.step_p.powi(2) / (4.0 * t), grid.step_q.powi(2) / (4.0 * t));
            assert_eq!(fast, brute_quadratic(&m, cp, cq, true), "trial {trial}");
        }
    }

    #[test]
    fn quadratic_non_periodic_matches_brute_force() {
        let m = random(12, 9, 3);
        let grid = ErosionGrid { step_p: 0.1, step_q: 0.2, periodic: false };
        let fast = erode_grid(&m, grid, 0.05, 1.0).unwrap();
        assert_eq!(fast, brute_quadratic(&m, 0.1 * 0.1 / 0.2, 0.2 * 0.2 / 0.2, false));
    }

    #[test]
    fn flat_matches_brute_force_exactly() {
        let p = GaborParams::square(16, 32, 0.25).unwrap();
        let grid = ErosionGrid::phase_space(&p, 0.25);
        for trial in 0..100 {
            let m = random(16, 16, 1000 + trial);
            let t = 0.1 + 0.15 * (trial % 9) as f64;
            assert_eq!(erode_modulus(&m, t, 0.25, 0.5, &p).unwrap(), brute_flat(&m, grid, t), "trial {trial}");
        }
        let open = ErosionGrid { step_p: 0.3, step_q: 0.2, periodic: false };
        let m = random(10, 13, 7);
        assert_eq!(erode_grid(&m, open, 0.7, 0.5).unwrap(), brute_flat(&m, open, 0.7));
    }

    #[test]
    fn power_kernel_brackets_and_never_increases() {
        let p = GaborParams::square(16, 32, 0.5).unwrap();
        let m = random(16, 16, 9);
        let e = erode_modulus(&m, 0.05, 0.5, 0.75, &p).unwrap();
        assert!(e.iter().zip(m.iter()).all(|(x, y)| x <= y));
        let global = m.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(e.iter().all(|&x| x >= global));
    }

    #[test]
    fn small_time_is_identity() {
        let p = GaborParams::square(16, 32, 0.25).unwrap();
        let m = random(16, 16, 4);
        let e = erode_modulus(&m, 1e-6, 0.25, 1.0, &p).unwrap();
        assert!(e.iter().zip(m.iter()).all(|(x, y)| (x - y).abs() <= 1e-6));
    }

    #[test]
    fn large_disc_gives_global_minimum() {
        let p = GaborParams::square(16, 32, 0.25).unwrap();
        let m = random(16, 16, 5);
        let global = m.iter().copied().fold(f64::INFINITY, f64::min);
        let e = erode_modulus(&m, 100.0, 0.25, 0.5, &p).unwrap();
        assert!(e.iter().all(|&x| x == global));
    }

    #[test]
    fn rejects_small_eta() {
        let p = GaborParams::square(16, 32, 0.25).unwrap();
        let m = random(16, 16, 6);
        assert!(matches!(erode_modulus(&m, 0.1, 0.25, 0.4, &p), Err(Error::EtaOutOfRange(_))));
        assert!(matches!(erode_modulus(&m, 0.1, 0.25, f64::NAN, &p), Err(Error::EtaOutOfRange(_))));
    }

    #[test]
    fn semigroup() {
        let p = GaborParams::square(16, 32, 0.25).unwrap();
        let m = random(16, 16, 8);
        let two = erode_modulus(&erode_modulus(&m, 0.01, 0.25, 1.0, &p).unwrap(), 0.02, 0.25, 1.0, &p).unwrap();
        let once = erode_modulus(&m, 0.03, 0.25, 1.0, &p).unwrap();
        // Intermediate points are restricted to the grid, so composing can only
        // land above the single erosion.
        assert!(two.iter().zip(once.iter()).all(|(a, b)| *a >= b - 1e-12));
        let flat2 = erode_modulus(&erode_modulus(&m, 0.3, 0.25, 0.5, &p).unwrap(), 0.3, 0.25, 0.5, &p).unwrap();
        let flat1 = erode_modulus(&m, 0.6, 0.25, 0.5, &p).unwrap();
        assert!(flat2.iter().zip(flat1.iter()).all(|(a, b)| *a >= *b));
        // Within one cell diagonal of the continuous semigroup.
        let grid = ErosionGrid::phase_space(&p, 0.25);
        let h = grid.step_p.hypot(grid.step_q);
        let inner = erode_modulus(&m, 0.6 - h, 0.25, 0.5, &p).unwrap();
        assert!(flat2.iter().zip(inner.iter()).all(|(a, b)| *a <= *b));
    }

    #[test]
    fn phase_is_restored() {
        let p = GaborParams::square(16, 32, 0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let data = Array2::from_shape_fn((16, 16), |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let g = PhaseField::new(p, data).unwrap();
        let rp = ReassignParams::erosion(0.01, 0.25, 1.0).unwrap();
        let out = erosion_reassign(&g, &rp).unwrap();
        for (x, y) in out.data().iter().zip(g.data().iter()) {
            assert!(x.norm() <= y.norm() + 1e-15);
            if x.norm() > 1e-12 {
                assert!((x.arg() - y.arg()).abs() < 1e-12);
            }
        }
    }
}

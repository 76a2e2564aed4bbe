//! File formats: complex signals, phase-space fields, real images, PGM/PPM
//! pixmaps, deformation-net CSV and JSON run reports. Binary numbers are
//! little-endian except 16-bit PGM samples, which the format fixes as
//! big-endian.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Vector2;
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::deform::{DeformationNet, FrequencyField, NetPoint};
use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::heisenberg::GaborParams;

/// `foo.bin` → `foo.bin.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = read_bytes(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    C128,
    F64,
}

impl Dtype {
    fn width(self) -> usize {
        match self {
            Dtype::C128 => 16,
            Dtype::F64 => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalHeader {
    pub n: usize,
    pub dtype: Dtype,
}

/// Sidecar for row-major arrays; `params` is present for phase-space fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayHeader {
    pub dtype: Dtype,
    pub shape: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GaborParams>,
}

fn complex_to_bytes(data: impl IntoIterator<Item = Complex64>) -> Vec<u8> {
    data.into_iter().flat_map(|z| z.re.to_le_bytes().into_iter().chain(z.im.to_le_bytes())).collect()
}

fn bytes_to_f64(bytes: &[u8]) -> Vec<f64> {
    bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight"))).collect()
}

fn bytes_to_complex(bytes: &[u8]) -> Vec<Complex64> {
    bytes_to_f64(bytes).chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

fn read_payload(path: &Path, dtype: Dtype, count: usize) -> Result<Vec<u8>> {
    let bytes = read_bytes(path)?;
    let want = count * dtype.width();
    if bytes.len() != want {
        return Err(Error::format(path, format!("expected {want} bytes, found {}", bytes.len())));
    }
    Ok(bytes)
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a `.csv` file of `re,im` lines, or raw `c128` with its sidecar.
pub fn read_signal(path: &Path) -> Result<Vec<Complex64>> {
    if is_csv(path) {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path).map_err(|e| csv_error(path, e))?;
        return rdr
            .deserialize::<(f64, f64)>()
            .map(|row| row.map(|(re, im)| Complex64::new(re, im)).map_err(|e| csv_error(path, e)))
            .collect();
    }
    let header: SignalHeader = read_json(&sidecar_path(path))?;
    if header.dtype != Dtype::C128 {
        return Err(Error::format(path, "signals must be c128"));
    }
    Ok(bytes_to_complex(&read_payload(path, Dtype::C128, header.n)?))
}

pub fn write_signal(path: &Path, f: &[Complex64]) -> Result<()> {
    if is_csv(path) {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(|e| csv_error(path, e))?;
        for z in f {
            w.serialize((z.re, z.im)).map_err(|e| csv_error(path, e))?;
        }
        return w.flush().map_err(|e| Error::io(path, e));
    }
    write_bytes(path, &complex_to_bytes(f.iter().copied()))?;
    write_json(&sidecar_path(path), &SignalHeader { n: f.len(), dtype: Dtype::C128 })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::format(path, e.to_string())
}

/// Raw `G[l][m]` with a sidecar carrying the grid parameters.
pub fn write_phase_field(path: &Path, g: &PhaseField) -> Result<()> {
    let (k, m) = g.data().dim();
    write_bytes(path, &complex_to_bytes(g.data().iter().copied()))?;
    write_json(&sidecar_path(path), &ArrayHeader { dtype: Dtype::C128, shape: vec![k, m], params: Some(*g.params()) })
}

pub fn read_phase_field(path: &Path) -> Result<PhaseField> {
    let header: ArrayHeader = read_json(&sidecar_path(path))?;
    let params = header.params.ok_or_else(|| Error::format(path, "sidecar lacks grid parameters"))?;
    if header.dtype != Dtype::C128 || header.shape != [params.k(), params.m()] {
        return Err(Error::format(path, format!("sidecar shape {:?} does not match ({}, {})", header.shape, params.k(), params.m())));
    }
    let data = bytes_to_complex(&read_payload(path, Dtype::C128, params.k() * params.m())?);
    PhaseField::new(params, Array2::from_shape_vec((params.k(), params.m()), data).expect("length checked"))
}

pub fn write_real_image(path: &Path, img: &Array2<f64>) -> Result<()> {
    let bytes: Vec<u8> = img.iter().flat_map(|v| v.to_le_bytes()).collect();
    write_bytes(path, &bytes)?;
    write_json(&sidecar_path(path), &ArrayHeader { dtype: Dtype::F64, shape: vec![img.nrows(), img.ncols()], params: None })
}

pub fn read_real_image(path: &Path) -> Result<Array2<f64>> {
    let header: ArrayHeader = read_json(&sidecar_path(path))?;
    let [rows, cols] = header.shape[..] else {
        return Err(Error::format(path, format!("expected a two-dimensional shape, got {:?}", header.shape)));
    };
    if header.dtype != Dtype::F64 {
        return Err(Error::format(path, "images must be f64"));
    }
    let data = bytes_to_f64(&read_payload(path, Dtype::F64, rows * cols)?);
    Ok(Array2::from_shape_vec((rows, cols), data).expect("length checked"))
}

/// PGM (P5) or raw `f64` with sidecar, chosen by extension.
pub fn read_image(path: &Path) -> Result<Array2<f64>> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
        read_pgm(path)
    } else {
        read_real_image(path)
    }
}

/// Frequencies as `[k0][k1][2]` `f64`, NaN where invalid.
pub fn write_frequency_field(path: &Path, f: &FrequencyField) -> Result<()> {
    let (k0, k1) = f.dim();
    let bytes: Vec<u8> = f
        .q
        .iter()
        .zip(&f.valid)
        .flat_map(|(q, &ok)| if ok { [q.x, q.y] } else { [f64::NAN; 2] })
        .flat_map(f64::to_le_bytes)
        .collect();
    write_bytes(path, &bytes)?;
    write_json(&sidecar_path(path), &ArrayHeader { dtype: Dtype::F64, shape: vec![k0, k1, 2], params: None })
}

// PGM

fn pgm_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| &bytes[start..*pos])
}

/// Binary PGM with 8- or 16-bit samples, scaled to `[0, 1]` by the maxval.
/// Rows of the file are the first array axis.
pub fn read_pgm(path: &Path) -> Result<Array2<f64>> {
    let bytes = read_bytes(path)?;
    let bad = |r: &str| Error::format(path, r);
    let mut pos = 0;
    if pgm_token(&bytes, &mut pos) != Some(b"P5") {
        return Err(bad("not a binary PGM (P5)"));
    }
    let mut num = || -> Result<usize> {
        let tok = pgm_token(&bytes, &mut pos).ok_or_else(|| bad("truncated header"))?;
        std::str::from_utf8(tok).ok().and_then(|s| s.parse().ok()).ok_or_else(|| bad("malformed header number"))
    };
    let (width, height, maxval) = (num()?, num()?, num()?);
    if maxval == 0 || maxval > 65535 {
        return Err(bad("maxval must be in 1..=65535"));
    }
    let body = &bytes[pos + 1..];
    let width_bytes = if maxval < 256 { 1 } else { 2 };
    if body.len() < width * height * width_bytes {
        return Err(bad("pixel data is truncated"));
    }
    let scale = 1.0 / maxval as f64;
    Ok(Array2::from_shape_fn((height, width), |(r, c)| {
        let i = r * width + c;
        let v = if width_bytes == 1 { body[i] as u16 } else { u16::from_be_bytes([body[2 * i], body[2 * i + 1]]) };
        v as f64 * scale
    }))
}

/// Clamps to `[0, 1]` and quantises to 8 or 16 bits.
pub fn write_pgm(path: &Path, img: &Array2<f64>, bits: u8) -> Result<()> {
    let maxval: u32 = match bits {
        8 => 255,
        16 => 65535,
        _ => return Err(Error::InvalidParams(format!("PGM depth must be 8 or 16 bits, got {bits}"))),
    };
    let mut out = format!("P5\n{} {}\n{maxval}\n", img.ncols(), img.nrows()).into_bytes();
    for &v in img {
        let s = (v.clamp(0.0, 1.0) * maxval as f64).round() as u16;
        if bits == 8 {
            out.push(s as u8);
        } else {
            out.extend_from_slice(&s.to_be_bytes());
        }
    }
    write_bytes(path, &out)
}

// Pixmaps

/// 8-bit RGB raster, row-major from the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pixmap {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<u8>,
}

impl Pixmap {
    pub fn new(width: usize, height: usize) -> Self {
        Pixmap { width, height, rgb: vec![0; 3 * width * height] }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, c: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.rgb[i..i + 3].copy_from_slice(&c);
    }

    fn plot(&mut self, x: f64, y: f64, c: [u8; 3]) {
        let (xi, yi) = (x.round(), y.round());
        if xi >= 0.0 && yi >= 0.0 && (xi as usize) < self.width && (yi as usize) < self.height {
            self.set(xi as usize, yi as usize, c);
        }
    }

    fn line(&mut self, a: [f64; 2], b: [f64; 2], c: [u8; 3]) {
        let steps = ((b[0] - a[0]).abs().max((b[1] - a[1]).abs()).ceil() as usize).max(1);
        for s in 0..=steps {
            let u = s as f64 / steps as f64;
            self.plot(a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]), c);
        }
    }

    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.rgb);
        out
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        write_bytes(path, &self.to_ppm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RenderStyle {
    PhaseHue,
    ModulusGray,
    #[default]
    Overlay,
}

impl std::str::FromStr for RenderStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phase-hue" | "phase" => Ok(RenderStyle::PhaseHue),
            "modulus-gray" | "modulus" => Ok(RenderStyle::ModulusGray),
            "overlay" => Ok(RenderStyle::Overlay),
            other => Err(Error::InvalidParams(format!("unknown render style {other:?}"))),
        }
    }
}

fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// HSV with full saturation.
fn hue_rgb(h: f64, value: f64) -> [u8; 3] {
    let h6 = h.rem_euclid(1.0) * 6.0;
    let sector = (h6.floor() as usize) % 6;
    let f = h6 - h6.floor();
    let (up, down) = (value * f, value * (1.0 - f));
    let (r, g, b) = match sector {
        0 => (value, up, 0.0),
        1 => (down, value, 0.0),
        2 => (0.0, value, up),
        3 => (0.0, down, value),
        4 => (up, 0.0, value),
        _ => (value, 0.0, down),
    };
    [to_byte(r), to_byte(g), to_byte(b)]
}

/// Position `l` runs left to right, frequency `m` bottom to top. Hue is
/// `arg/2π`; value is the modulus over its maximum. Zero cells are black.
pub fn render_field(g: &Array2<Complex64>, style: RenderStyle) -> Pixmap {
    let (k, m) = g.dim();
    let peak = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut px = Pixmap::new(k, m);
    for ((l, mm), z) in g.indexed_iter() {
        let r = z.norm();
        if r == 0.0 {
            continue;
        }
        let value = r / peak;
        let hue = (z.arg() / TAU).rem_euclid(1.0);
        let c = match style {
            RenderStyle::PhaseHue => hue_rgb(hue, 1.0),
            RenderStyle::ModulusGray => [to_byte(value); 3],
            RenderStyle::Overlay => hue_rgb(hue, value),
        };
        px.set(l, m - 1 - mm, c);
    }
    px
}

/// Grey image with axis 0 drawn horizontally, as in the net coordinates.
fn grey_background(img: &Array2<f64>) -> Pixmap {
    let (lo, hi) = img.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (w, h) = img.dim();
    let mut px = Pixmap::new(w, h);
    for ((x, y), &v) in img.indexed_iter() {
        px.set(x, y, [to_byte((v - lo) / span); 3]);
    }
    px
}

const NET_COLOUR: [u8; 3] = [255, 40, 40];
const SPOKE_COLOUR: [u8; 3] = [255, 200, 0];

/// Contours and spokes of one net frame drawn over `img`.
pub fn render_net(img: &Array2<f64>, frame: &[Vec<NetPoint>]) -> Pixmap {
    let mut px = grey_background(img);
    for ring in frame {
        for j in 0..ring.len() {
            px.line(ring[j].x, ring[(j + 1) % ring.len()].x, NET_COLOUR);
        }
    }
    for pair in frame.windows(2) {
        for (a, b) in pair[0].iter().zip(&pair[1]) {
            px.line(a.x, b.x, SPOKE_COLOUR);
        }
    }
    px
}

/// One segment per valid position along the canonical frequency, of length
/// `scale` pixels per cycle-per-image, with the origin marked in white.
pub fn render_frequency_field(f: &FrequencyField, scale: f64) -> Pixmap {
    let (k0, k1) = f.dim();
    let (w, h) = ((k0 as f64 * f.spacing[0]) as usize, (k1 as f64 * f.spacing[1]) as usize);
    let mut px = Pixmap::new(w, h);
    for ((i, j), q) in f.q.indexed_iter() {
        if !f.valid[(i, j)] {
            continue;
        }
        let x = [i as f64 * f.spacing[0], j as f64 * f.spacing[1]];
        let dir: Vector2<f64> = *q * scale;
        px.line(x, [x[0] + dir.x, x[1] + dir.y], NET_COLOUR);
        px.plot(x[0], x[1], [255; 3]);
    }
    px
}

// Nets

#[derive(Debug, Serialize, Deserialize)]
struct NetRow {
    t: usize,
    r: usize,
    j: usize,
    x: f64,
    y: f64,
}

pub fn write_net_csv(path: &Path, net: &DeformationNet) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for (t, frame) in net.frames.iter().enumerate() {
        for (r, ring) in frame.iter().enumerate() {
            for (j, p) in ring.iter().enumerate() {
                w.serialize(NetRow { t, r, j, x: p.x[0], y: p.x[1] }).map_err(|e| csv_error(path, e))?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Positions `[t][r][j]` from a `t,r,j,x,y` file.
pub fn read_net_csv(path: &Path) -> Result<Vec<Vec<Vec<[f64; 2]>>>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let rows: Vec<NetRow> = rdr.deserialize().collect::<std::result::Result<_, _>>().map_err(|e| csv_error(path, e))?;
    let dims = rows.iter().fold((0, 0, 0), |(a, b, c), row| (a.max(row.t + 1), b.max(row.r + 1), c.max(row.j + 1)));
    if rows.len() != dims.0 * dims.1 * dims.2 {
        return Err(Error::format(path, "net is not a complete T × R × J array"));
    }
    let mut out = vec![vec![vec![[f64::NAN; 2]; dims.2]; dims.1]; dims.0];
    for row in rows {
        out[row.t][row.r][row.j] = [row.x, row.y];
    }
    Ok(out)
}

/// Summary written by every command with `--report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: serde_json::Value,
    pub metrics: BTreeMap<String, f64>,
    pub outputs: Vec<PathBuf>,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        RunReport { command: command.to_string(), parameters, metrics: BTreeMap::new(), outputs: Vec::new(), wall_time_ms: 0.0 }
    }

    pub fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        self.metrics.insert(name.to_string(), value);
        self
    }
}

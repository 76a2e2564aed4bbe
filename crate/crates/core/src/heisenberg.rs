//! Finite Heisenberg group quotient and the grid parameters that define it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer sampling grid of a discrete Gabor frame plus the window scale.
///
/// `N = K·L` samples are analysed at `K` shifts of stride `L` and `M` frequency
/// bins, giving oversampling `P = M/L`. The phase variable is resolved in `Q`
/// steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct GaborParams {
    n: usize,
    k: usize,
    m: usize,
    l: usize,
    q: usize,
    p: usize,
    a: f64,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    l: Option<usize>,
    #[serde(rename = "Q")]
    q: usize,
    a: f64,
}

impl TryFrom<ParamsRepr> for GaborParams {
    type Error = Error;

    fn try_from(r: ParamsRepr) -> Result<Self> {
        let params = GaborParams::new(r.n, r.k, r.m, r.q, r.a)?;
        if let Some(l) = r.l {
            if l != params.l {
                return Err(Error::InvalidParams(format!(
                    "L = {l} disagrees with N/K = {}",
                    params.l
                )));
            }
        }
        Ok(params)
    }
}

impl From<GaborParams> for ParamsRepr {
    fn from(p: GaborParams) -> Self {
        ParamsRepr { n: p.n, k: p.k, m: p.m, l: Some(p.l), q: p.q, a: p.a }
    }
}

impl GaborParams {
    /// Validates the divisibility conditions the group law depends on.
    pub fn new(n: usize, k: usize, m: usize, q: usize, a: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if n == 0 || k == 0 || m == 0 || q == 0 {
            return bad(format!("all sizes must be positive (N={n}, K={k}, M={m}, Q={q})"));
        }
        if !(a.is_finite() && a > 0.0) {
            return bad(format!("window scale a must be positive, got {a}"));
        }
        if !n.is_multiple_of(k) {
            return bad(format!("N = {n} is not a multiple of K = {k}"));
        }
        let l = n / k;
        if !m.is_multiple_of(l) {
            return bad(format!("M = {m} is not a multiple of L = N/K = {l}"));
        }
        let p = m / l;
        if !q.is_multiple_of(2 * p) {
            return bad(format!("Q/(2P) must be an integer (Q = {q}, P = {p})"));
        }
        if !k.is_multiple_of(p) {
            return bad(format!("K/P must be an integer (K = {k}, P = {p})"));
        }
        Ok(GaborParams { n, k, m, l, q, p, a })
    }

    /// Extreme oversampling: `K = M = N`, `L = 1`.
    pub fn square(n: usize, q: usize, a: f64) -> Result<Self> {
        Self::new(n, n, n, q, a)
    }

    /// The 128-point configuration used for the chirp reassignment table.
    pub fn paper128() -> Self {
        Self::new(128, 128, 128, 256, 0.125).expect("preset is valid")
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "paper128" => Some(Self::paper128()),
            _ => None,
        }
    }

    pub fn with_scale(self, a: f64) -> Result<Self> {
        Self::new(self.n, self.k, self.m, self.q, a)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn l(&self) -> usize {
        self.l
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Integer factor `Q/(2P)` of the commutator term in the group law.
    pub fn twist(&self) -> usize {
        self.q / (2 * self.p)
    }

    /// Spatial step `1/K` in physical units.
    pub fn dp(&self) -> f64 {
        1.0 / self.k as f64
    }

    /// Frequency step `N/M = K/P` in physical units.
    pub fn dq(&self) -> f64 {
        self.n as f64 / self.m as f64
    }

    /// Whether reduction modulo `[K, M, Q]` commutes with the product, i.e. the
    /// quotient is a group on canonical representatives. Needs `L` and `K/P` even.
    pub fn has_exact_quotient(&self) -> bool {
        self.l.is_multiple_of(2) && (self.k / self.p).is_multiple_of(2)
    }

    /// Soft warnings for grids that run but lack the normal-subgroup property.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.l.is_multiple_of(2) {
            out.push(format!("L = {} is odd; the lattice subgroup is not normal", self.l));
        }
        if !self.n.is_multiple_of(2) {
            out.push(format!("N = {} is odd; the lattice subgroup is not normal", self.n));
        }
        out
    }
}

/// Element `[l, m, k]` of the quotient group, stored in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GroupElement {
    pub l: usize,
    pub m: usize,
    pub k: usize,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { l: 0, m: 0, k: 0 };

    /// Reduces arbitrary integer coordinates to canonical representatives.
    pub fn new(l: i64, m: i64, k: i64, p: &GaborParams) -> Self {
        GroupElement {
            l: l.rem_euclid(p.k as i64) as usize,
            m: m.rem_euclid(p.m as i64) as usize,
            k: k.rem_euclid(p.q as i64) as usize,
        }
    }

    pub fn mul(self, other: GroupElement, p: &GaborParams) -> GroupElement {
        let (l, m, k) = raw_mul(self.coords(), other.coords(), p.twist() as i64);
        GroupElement::new(l, m, k, p)
    }

    pub fn inv(self, p: &GaborParams) -> GroupElement {
        GroupElement::new(-(self.l as i64), -(self.m as i64), -(self.k as i64), p)
    }

    /// Image under the monomorphism into the continuous group.
    pub fn embed(self, p: &GaborParams) -> HeisenbergPoint {
        phi_coords(self.l as i64, self.m as i64, self.k as i64, p.k, p.p, p.q)
    }

    pub fn coords(self) -> (i64, i64, i64) {
        (self.l as i64, self.m as i64, self.k as i64)
    }
}

/// Group law on unreduced integer representatives.
pub fn raw_mul(g: (i64, i64, i64), h: (i64, i64, i64), twist: i64) -> (i64, i64, i64) {
    (g.0 + h.0, g.1 + h.1, g.2 + h.2 + twist * (g.1 * h.0 - h.1 * g.0))
}

/// `(l/K, mK/P, k/Q)` without any grid validation.
pub fn phi_coords(l: i64, m: i64, k: i64, big_k: usize, big_p: usize, big_q: usize) -> HeisenbergPoint {
    HeisenbergPoint {
        p: l as f64 / big_k as f64,
        q: m as f64 * big_k as f64 / big_p as f64,
        s: k as f64 / big_q as f64,
    }
}

/// Point `(p, q, s)` of the continuous reduced Heisenberg group.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HeisenbergPoint {
    pub p: f64,
    pub q: f64,
    pub s: f64,
}

impl HeisenbergPoint {
    pub fn mul(self, o: HeisenbergPoint) -> HeisenbergPoint {
        HeisenbergPoint {
            p: self.p + o.p,
            q: self.q + o.q,
            s: self.s + o.s + 0.5 * (self.q * o.p - self.p * o.q),
        }
    }

    pub fn inv(self) -> HeisenbergPoint {
        HeisenbergPoint { p: -self.p, q: -self.q, s: -self.s }
    }
}

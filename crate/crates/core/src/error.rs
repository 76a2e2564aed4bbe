use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("cr-window-requires-extreme-oversampling (need L = 1 and K = M = N, got L = {l}, K = {k}, M = {m}, N = {n})")]
    CrRequiresExtremeOversampling { n: usize, k: usize, m: usize, l: usize },

    #[error("cr-nullspace-degenerate: numerical nullspace has dimension {dim}")]
    CrNullspaceDegenerate { dim: usize },

    #[error("window-not-frame: smallest frame eigenvalue {min:e} vs largest {max:e}")]
    WindowNotFrame { min: f64, max: f64 },

    #[error("eta-out-of-range: {0} (must be finite and >= 1/2)")]
    EtaOutOfRange(f64),

    #[error("unstable-step: sup norm grew from {before:e} to {after:e} at step {step}")]
    UnstableStep { step: usize, before: f64, after: f64 },

    #[error("zero-norm {0}")]
    ZeroNorm(&'static str),

    #[error("degenerate-spectrum: eigenvalues {l1} and {l2} coincide")]
    DegenerateSpectrum { l1: f64, l2: f64 },

    #[error("no-admissible-root at (p, q) = ({p}, {q}), t = {t}")]
    NoAdmissibleRoot { p: f64, q: f64, t: f64 },

    #[error("beyond-collapse: t = {t} exceeds t_max = {t_max} on the principal axis")]
    BeyondCollapse { t: f64, t_max: f64 },

    #[error("t = {t} is not below the collapse time {t_fin}")]
    PastFinalTime { t: f64, t_fin: f64 },

    #[error("root finder did not converge: {0}")]
    NoConvergence(&'static str),

    #[error("cfl-violated: dt = {dt:e} exceeds the stability bound {bound:e}")]
    CflViolated { dt: f64, bound: f64 },

    #[error("empty-after-mask at position ({0}, {1})")]
    EmptyAfterMask(usize, usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::LengthMismatch { .. }
                | Error::ShapeMismatch(_)
                | Error::CrRequiresExtremeOversampling { .. }
                | Error::EtaOutOfRange(_)
                | Error::CflViolated { .. }
                | Error::Io { .. }
                | Error::Format { .. }
                | Error::Json(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format { path: path.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

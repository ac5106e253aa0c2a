//! Computing with paths valued in the free nilpotent group `G^m(R^d)`.
//!
//! The crate provides, bottom up:
//!
//! - [`tensor`]: exact arithmetic in the truncated tensor algebra
//!   `T^(m)(R^d)` — products, inverses, `exp`/`log`, dilations, Lie
//!   brackets, and a Dynkin certificate of group-likeness.
//! - [`signature`]: signatures of piecewise-linear paths by segment
//!   exponentials and Chen concatenation.
//! - [`metrics`]: homogeneous norms, invariant distances, the path-space
//!   distances `d_inf`, `d_inf_tilde`, `d_{omega,p}`, `d_{p-var}`, and the
//!   smallest control of the p-variation.
//! - [`realizer`]: constructive Chow — realize a group element as the
//!   signature of a short explicit path; grid interpolants and the
//!   composite control they induce.
//! - [`membership`]: Wiener and Ciesielski criteria separating finite
//!   p-variation group paths from the closure of lifted smooth paths,
//!   on sampled evidence.
//! - [`corpus`]: deterministic generators for the standard example paths
//!   (pure area, lacunary series, chirp, lifted Brownian motion).
//! - [`harness`]: strong-convergence experiments for SDE approximations
//!   driven by piecewise-linear vs. group-interpolant drivers.

use thiserror::Error;

pub mod corpus;
pub mod harness;
pub mod membership;
pub mod metrics;
pub mod realizer;
pub mod rng;
pub mod signature;
pub mod tensor;
pub mod tol;

pub use signature::PiecewisePath;
pub use tensor::{GroupElement, LieElement, TruncatedTensor};

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported shape d={d}, m={m} (supported: 1 <= d <= 6, 1 <= m <= 5)")]
    UnsupportedShape { d: usize, m: usize },

    #[error("shape mismatch: (d={0}, m={1}) vs (d={2}, m={3})")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("level {level} holds {got} coefficients, expected {expected}")]
    BadLevelLength {
        level: usize,
        got: usize,
        expected: usize,
    },

    #[error("scalar (level-0) part must be {expected}, got {got}")]
    BadScalarPart { expected: f64, got: f64 },

    #[error("not group-like: Dynkin residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    NotGroupLike { residual: f64, tol: f64 },

    #[error("not a Lie element: Dynkin residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    NotLie { residual: f64, tol: f64 },

    #[error("constructive realization supports m <= 3, got m = {0}")]
    UnsupportedStep(usize),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid interval: s = {s}, t = {t}")]
    BadInterval { s: f64, t: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("control vanishes off the diagonal: omega({s}, {t}) = {value}")]
    DegenerateControl { s: f64, t: f64, value: f64 },

    #[error("invalid variation exponent p = {0}, need p >= 1")]
    BadExponent(f64),

    #[error("delta = {delta} is below the finest grid gap {gap}; enlarge delta or refine the grid")]
    DeltaTooSmall { delta: f64, gap: f64 },

    #[error("no subdivision of the grid has all gaps <= {delta}")]
    InfeasibleMesh { delta: f64 },

    #[error("delta ladder needs at least {need} feasible values, got {got}")]
    BadLadder { need: usize, got: usize },

    #[error("subdivision must be drawn from the grid and contain both endpoints")]
    BadSubdivision,

    #[error("no sampled pair (s, t) satisfies t - s <= {delta}")]
    EmptyWindow { delta: f64 },

    #[error("{0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse: {0}")]
    Parse(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

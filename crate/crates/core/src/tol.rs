//! Default tolerances used across the crate.
//!
//! Two regimes: *certification* tolerances admit accumulated rounding from
//! series evaluations (1e-9), *identity* tolerances check algebraic
//! identities that hold exactly in real arithmetic (1e-12). Functions that
//! certify group-likeness take an explicit tolerance, so these defaults can
//! be overridden per call site.

/// Dynkin residual allowed when certifying a [`crate::GroupElement`].
pub const GROUP_CERT: f64 = 1e-9;

/// Dynkin residual allowed under closure operations (product, inverse,
/// dilation) of already certified elements.
pub const GROUP_CLOSURE: f64 = 1e-8;

/// Exact algebraic identities (associativity, exp/log round trips,
/// Chen's identity, homogeneity).
pub const IDENTITY: f64 = 1e-12;

/// Residual of a constructive realization against its target.
pub const REALIZE: f64 = 1e-9;

/// Grid-matching residual of an interpolant against the sampled path.
pub const GRID_MATCH: f64 = 1e-8;

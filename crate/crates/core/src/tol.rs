//! Numeric tolerances shared across the crate.
//!
//! Two tiers: representation tolerances decide whether a vector is a valid
//! probability distribution, comparison tolerances absorb accumulated
//! floating-point error when checking inequalities between computed gaps.

/// Maximum `|sum - 1|` for an in-memory mixed strategy or joint distribution.
pub const PROB_SUM: f64 = 1e-12;

/// Maximum `|sum - 1|` for a joint distribution read from a text file.
pub const FILE_PROB_SUM: f64 = 1e-9;

/// Slack on every reported bound check (`lhs <= bound + GAP`).
pub const GAP: f64 = 1e-9;

/// Maximum spread of per-cell sums accepted by constant-sum normalization.
pub const CONSTANT_SUM: f64 = 1e-9;

/// Pivot and reduced-cost threshold inside the simplex solver.
pub const LP_PIVOT: f64 = 1e-9;

/// Agreement required between oracle outputs (primal/dual values, Nash gap
/// of the LP solution).
pub const LP_CHECK: f64 = 1e-7;

//! Module-wide tolerance constants.

use serde::{Deserialize, Serialize};

/// Exact-arithmetic level: unit norms, orthonormality, incidence.
pub const EXACT: f64 = 1e-12;
/// Matrix level: determinants, eigenvector checks.
pub const MATRIX: f64 = 1e-9;
/// Frontier membership for points produced by iterative root finding.
pub const FRONTIER: f64 = 1e-8;
/// Classification band for `contains`.
pub const BOUNDARY_BAND: f64 = 1e-10;

/// Overridable tolerance set. `Default` gives the module constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub exact: f64,
    pub matrix: f64,
    pub frontier: f64,
    pub boundary_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: EXACT,
            matrix: MATRIX,
            frontier: FRONTIER,
            boundary_band: BOUNDARY_BAND,
        }
    }
}

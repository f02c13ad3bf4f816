//! Numeric tolerances shared by every check in the crate.

/// Identity-check tolerance, relative to the largest coefficient in play.
pub const TAU_ID: f64 = 1e-9;
/// Root residual tolerance: `|q(r)| < TAU_ROOT * max|coeff|`.
pub const TAU_ROOT: f64 = 1e-10;
/// Trailing coefficients below `TAU_TRIM * max|coeff|` are dropped.
pub const TAU_TRIM: f64 = 1e-12;
/// Roots closer than this are reported as one multiple root.
pub const TAU_CLUSTER: f64 = 1e-6;
/// Minimum pole separation accepted by [`crate::JnrData`].
pub const TAU_SEP: f64 = 1e-8;
/// Radius around grid points and poles where regularised formulas take over.
pub const TAU_NEAR: f64 = 1e-6;

/// The full tolerance set, overridable from the command line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub id: f64,
    pub root: f64,
    pub trim: f64,
    pub cluster: f64,
    pub sep: f64,
    pub near: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            id: TAU_ID,
            root: TAU_ROOT,
            trim: TAU_TRIM,
            cluster: TAU_CLUSTER,
            sep: TAU_SEP,
            near: TAU_NEAR,
        }
    }
}

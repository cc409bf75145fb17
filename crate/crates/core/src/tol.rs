//! Numeric tolerances shared by every stage.

use std::sync::OnceLock;

/// Default feasibility tolerance for LP rows and flow balances.
pub const DEFAULT_FEAS: f64 = 1e-7;
/// Objective agreement tolerance between LP routes.
pub const OBJ: f64 = 1e-6;
/// Values below this are treated as exactly zero.
pub const ZERO: f64 = 1e-9;
/// Maximum allowed residual of a flow decomposition.
pub const DECOMPOSITION: f64 = 1e-6;

/// Environment variable overriding [`DEFAULT_FEAS`].
pub const TOL_ENV: &str = "LCATSP_TOL";

/// Feasibility tolerance, read once from `LCATSP_TOL` when set.
pub fn feas() -> f64 {
    static FEAS: OnceLock<f64> = OnceLock::new();
    *FEAS.get_or_init(|| {
        std::env::var(TOL_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(DEFAULT_FEAS)
    })
}

/// `ceil(z - 1e-9)`, so that `1.0000000001` rounds to 1.
pub fn nudged_ceil(z: f64) -> i64 {
    (z - ZERO).ceil().max(0.0) as i64
}

pub(crate) fn clamp_zero(v: f64) -> f64 {
    if v < ZERO {
        0.0
    } else {
        v
    }
}

//! Relative optimality gaps in percent.

use serde::Serialize;

use crate::error::{OmtError, Result};

/// Gaps between upper bounds U, lower bounds L and the root relaxation R.
/// A bar marks the best value over all compared runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapMetrics {
    /// 100(U̅ − R)/U̅
    pub g_ur: f64,
    /// 100(U̅ − L)/U̅
    pub g_ul_bar: f64,
    /// 100(U − L̅)/U
    pub g_u_lbar: f64,
    /// 100(U − L)/U, the gap at termination
    pub g_ul: f64,
}

/// 100(upper − lower)/upper.
pub fn gap_pct(upper: f64, lower: f64) -> Result<f64> {
    if !(upper > 0.0) {
        return Err(OmtError::InvalidArgument(format!("gap denominator must be positive, got {upper}")));
    }
    Ok(100.0 * (upper - lower) / upper)
}

pub fn gap_metrics(obj_u: f64, obj_l: f64, obj_u_best: f64, obj_r: f64, obj_l_best: f64) -> Result<GapMetrics> {
    Ok(GapMetrics {
        g_ur: gap_pct(obj_u_best, obj_r)?,
        g_ul_bar: gap_pct(obj_u_best, obj_l)?,
        g_u_lbar: gap_pct(obj_u, obj_l_best)?,
        g_ul: gap_pct(obj_u, obj_l)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_gap() {
        assert_eq!(gap_pct(100.0, 80.0).unwrap(), 20.0);
        assert!(gap_pct(0.0, 1.0).is_err());
        let g = gap_metrics(100.0, 80.0, 90.0, 45.0, 85.0).unwrap();
        assert_eq!(g.g_ul, 20.0);
        assert_eq!(g.g_ur, 50.0);
        assert!((g.g_ul_bar - 100.0 * 10.0 / 90.0).abs() < 1e-12);
        assert_eq!(g.g_u_lbar, 15.0);
    }
}

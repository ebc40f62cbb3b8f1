//! Strong-Wolfe line search for ascent directions.
//!
//! The dual objective maximized by the L-BFGS projection is concave but only
//! almost-everywhere differentiable (kinks where eigenvalues cross zero), so
//! the search falls back to sufficient-increase backtracking when the
//! curvature condition cannot be met within the iteration budget.

use crate::error::{Error, Result};

/// Total bracket/zoom/backtracking iteration budget.
pub const MAX_LINE_SEARCH_ITERS: usize = 40;

/// Largest step the bracketing phase may expand to, as a multiple of the
/// initial step. The dual can be exactly linear along a ray (all eigenvalues
/// pinned on one side of zero), where unbounded doubling would fling the
/// iterate astronomically far and strand the ascent; a capped step still
/// makes progress and the next iteration continues from there.
pub const MAX_STEP_GROWTH: f64 = 1024.0;

/// Find a step `t > 0` along an ascent direction satisfying the strong Wolfe
/// conditions on φ:
///
/// - sufficient increase: φ(t) ≥ φ(0) + c1·t·φ′(0)
/// - curvature: |φ′(t)| ≤ c2·φ′(0)
///
/// `phi` and `dphi` evaluate the 1-D restriction and its derivative; `step0`
/// is the first trial step. Requires φ′(0) > 0.
pub fn wolfe_line_search(
    mut phi: impl FnMut(f64) -> f64,
    mut dphi: impl FnMut(f64) -> f64,
    c1: f64,
    c2: f64,
    step0: f64,
) -> Result<f64> {
    let phi0 = phi(0.0);
    let d0 = dphi(0.0);
    if !(d0 > 0.0) {
        return Err(Error::Domain(format!(
            "line search requires an ascent direction, got slope {d0:e} at 0"
        )));
    }
    if !(step0 > 0.0) {
        return Err(Error::Domain("initial step must be positive".into()));
    }

    let sufficient = |t: f64, val: f64| val >= phi0 + c1 * t * d0;

    let mut iters = 0usize;
    let mut t_prev = 0.0;
    let mut phi_prev = phi0;
    let mut t = step0;
    let mut bracket: Option<(f64, f64)> = None; // (lo, hi): lo satisfies sufficient increase

    while iters < MAX_LINE_SEARCH_ITERS {
        iters += 1;
        let phi_t = phi(t);
        if !phi_t.is_finite() {
            break;
        }
        if !sufficient(t, phi_t) || (t_prev > 0.0 && phi_t <= phi_prev) {
            bracket = Some((t_prev, t));
            break;
        }
        let d_t = dphi(t);
        if d_t.abs() <= c2 * d0 {
            return Ok(t);
        }
        if d_t <= 0.0 {
            // overshot the maximizer
            bracket = Some((t, t_prev));
            break;
        }
        if t >= step0 * MAX_STEP_GROWTH {
            // still ascending at the expansion cap: take the capped step
            return Ok(t);
        }
        t_prev = t;
        phi_prev = phi_t;
        t *= 2.0;
    }

    if let Some((mut lo, mut hi)) = bracket {
        let mut phi_lo = if lo == 0.0 { phi0 } else { phi(lo) };
        while iters < MAX_LINE_SEARCH_ITERS {
            iters += 1;
            let mid = 0.5 * (lo + hi);
            let phi_mid = phi(mid);
            if !phi_mid.is_finite() {
                break;
            }
            if !sufficient(mid, phi_mid) || phi_mid <= phi_lo {
                hi = mid;
            } else {
                let d_mid = dphi(mid);
                if d_mid.abs() <= c2 * d0 {
                    return Ok(mid);
                }
                if d_mid * (hi - lo) >= 0.0 {
                    hi = lo;
                }
                lo = mid;
                phi_lo = phi_mid;
            }
            if (hi - lo).abs() <= 1e-16 * lo.abs().max(1.0) {
                break;
            }
        }
    }

    // curvature could not be met: keep any step with sufficient increase
    let mut t = step0;
    for _ in 0..MAX_LINE_SEARCH_ITERS {
        if sufficient(t, phi(t)) {
            return Ok(t);
        }
        t *= 0.5;
    }
    Err(Error::LineSearchFailure(MAX_LINE_SEARCH_ITERS))
}

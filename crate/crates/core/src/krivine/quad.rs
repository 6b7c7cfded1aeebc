//! Adaptive quadrature and bracketed root finding.

use alloc::format;
use alloc::string::ToString;

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 60;
const MAX_BISECTIONS: u32 = 200;

/// Integrates `f` over `[a, b]` by adaptive Simpson quadrature with
/// Richardson extrapolation, to absolute accuracy about `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(format!(
            "invalid integration interval [{a}, {b}]"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "quadrature tolerance must be positive".to_string(),
        ));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = eval(f, a)?;
    let fb = eval(f, b)?;
    let (m, fm, whole) = simpson(f, a, fa, b, fb)?;
    refine(f, a, fa, b, fb, m, fm, whole, tol, 0)
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::Internal(format!(
            "integrand is not finite at {x}: {y}"
        )))
    }
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> Result<(f64, f64, f64)> {
    let m = 0.5 * (a + b);
    let fm = eval(f, m)?;
    Ok((m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)))
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let (lm, flm, left) = simpson(f, a, fa, m, fm)?;
    let (rm, frm, right) = simpson(f, m, fm, b, fb)?;
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Internal(format!(
            "quadrature failed to converge near [{a}, {b}]"
        )));
    }
    let half = 0.5 * tol;
    Ok(refine(f, a, fa, m, fm, lm, flm, left, half, depth + 1)?
        + refine(f, m, fm, b, fb, rm, frm, right, half, depth + 1)?)
}

/// Finds the root of `f` in `[lo, hi]` by bisection. The endpoint values
/// must straddle zero; the result's residual must come out at or below
/// `residual_tol`, otherwise the bracket or the function is reported as an
/// internal error.
pub fn bisect<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    residual_tol: f64,
) -> Result<f64> {
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "invalid bracket [{lo}, {hi}]"
        )));
    }
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Internal(format!(
            "bracket [{lo}, {hi}] does not straddle a sign change ({flo:.3e}, {fhi:.3e})"
        )));
    }
    let (mut lo, mut hi, neg_at_lo) = (lo, hi, flo < 0.0);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating point resolution
        }
        let fmid = f(mid)?;
        if fmid == 0.0 {
            return Ok(mid);
        }
        if (fmid < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let residual = f(mid)?.abs();
    if residual > residual_tol {
        return Err(Error::Internal(format!(
            "root residual {residual:.3e} exceeds {residual_tol:.3e}"
        )));
    }
    Ok(mid)
}

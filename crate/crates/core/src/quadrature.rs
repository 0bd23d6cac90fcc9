//! Adaptive Simpson quadrature on finite intervals.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("integration bounds must be finite with a <= b, got [{a}, {b}]")]
    BadBounds { a: f64, b: f64 },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error(
        "adaptive Simpson did not reach relative tolerance {rel_tol:e} on [{a}, {b}] \
         (estimate {estimate}, residual {residual:e} near x = {worst_x})"
    )]
    NoConvergence { a: f64, b: f64, rel_tol: f64, estimate: f64, residual: f64, worst_x: f64 },
}

pub const DEFAULT_REL_TOL: f64 = 1e-8;
const MAX_DEPTH: u32 = 48;
const ABS_FLOOR: f64 = 1e-14;

struct State<'a, F> {
    f: &'a F,
    worst: (f64, f64),
    converged: bool,
}

/// Integrates `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64, QuadratureError> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(QuadratureError::BadBounds { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    let eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite { x })
        }
    };
    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    // Coarse pass to scale the tolerance by the magnitude of the integral.
    let coarse = {
        let n = 64;
        let h = (b - a) / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let x = a + h * i as f64;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * eval(x)?.abs();
        }
        s * h / 3.0
    };
    let tol = (rel_tol * coarse).max(ABS_FLOOR);

    let mut st = State { f, worst: (0.0, a), converged: true };
    let value = recurse(&mut st, a, b, fa, fm, fb, whole, tol, 0)?;
    if st.converged {
        Ok(value)
    } else {
        Err(QuadratureError::NoConvergence {
            a,
            b,
            rel_tol,
            estimate: value,
            residual: st.worst.0,
            worst_x: st.worst.1,
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    st: &mut State<'_, F>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, QuadratureError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = (st.f)(lm);
    let frm = (st.f)(rm);
    if !flm.is_finite() {
        return Err(QuadratureError::NonFinite { x: lm });
    }
    if !frm.is_finite() {
        return Err(QuadratureError::NonFinite { x: rm });
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH || m <= a || m >= b {
        st.converged = false;
        if delta.abs() > st.worst.0 {
            st.worst = (delta.abs(), m);
        }
        return Ok(left + right + delta / 15.0);
    }
    // Tolerance shrinks by sqrt(2) per level so step discontinuities still terminate.
    let child_tol = tol * std::f64::consts::FRAC_1_SQRT_2;
    let l = recurse(st, a, m, fa, flm, fm, left, child_tol, depth + 1)?;
    let r = recurse(st, m, b, fm, frm, fb, right, child_tol, depth + 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(&|x: f64| 3.0 * x * x, 0.0, 2.0, 1e-10).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_square() {
        let v = integrate(&|x: f64| 1.0 / (x * x), 1.0, 2.0, 1e-10).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn step_function() {
        let v = integrate(&|x: f64| if x > 1.7 { 2.0 } else { 1.0 }, 1.0, 3.0, 1e-8).unwrap();
        assert!((v - 3.3).abs() < 1e-7, "{v}");
    }

    #[test]
    fn degenerate_and_bad_bounds() {
        assert_eq!(integrate(&|x: f64| x, 2.0, 2.0, 1e-8), Ok(0.0));
        assert!(matches!(integrate(&|x: f64| x, 2.0, 1.0, 1e-8), Err(QuadratureError::BadBounds { .. })));
        assert!(matches!(integrate(&|x: f64| x, 0.0, f64::INFINITY, 1e-8), Err(QuadratureError::BadBounds { .. })));
    }

    #[test]
    fn singular_integrand_reports() {
        let r = integrate(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-8);
        assert!(matches!(r, Err(QuadratureError::NonFinite { .. })));
    }
}

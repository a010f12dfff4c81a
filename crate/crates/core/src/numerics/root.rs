use super::{Interval, NumericsError, Result, Tolerance};

/// Brent's method on a sign-changing bracket.
///
/// Stops once `|f(x)| <= tol.abs` or the bracket has shrunk below `tol.abs`.
/// The returned point always lies inside the initial bracket.
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: Interval, tol: &Tolerance) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    if !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::BadInterval { lo: a, hi: b });
    }
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() {
        return Err(NumericsError::NonFinite { at: a });
    }
    if fb.is_nan() {
        return Err(NumericsError::NonFinite { at: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoBracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_steps.min(10_000) {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.abs;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= tol.abs {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(NumericsError::NonFinite { at: b });
        }
    }
    Err(NumericsError::NonConvergence {
        routine: "find_root",
        steps: tol.max_steps.min(10_000),
    })
}

use super::{Boundary, MomentumFn};
use crate::error::{Error, Result};
use crate::numerics::{fd_derivative, find_root, Interval, Tolerance};
use std::f64::consts::PI;
use std::sync::Arc;

const SAMPLES: usize = 4000;

fn admissible(k: f64) -> bool {
    k.is_finite() && k * k < 1.0
}

/// Sample points strictly inside the hint, clustered towards finite ends.
fn sample_points(hint: &Interval) -> Vec<f64> {
    let n = SAMPLES;
    if hint.hi.is_finite() {
        let (lo, w) = (hint.lo, hint.width());
        (1..n)
            .map(|i| lo + w * 0.5 * (1.0 - (PI * i as f64 / n as f64).cos()))
            .filter(|&x| x > hint.lo && x < hint.hi)
            .collect()
    } else {
        // x = lo + scale * t / (1 - t)^2 reaches far out and still resolves lo
        let scale = hint.lo.abs().max(1.0);
        (1..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let u = 0.5 * (1.0 - (PI * t).cos());
                hint.lo + scale * u / (1.0 - u).powi(2)
            })
            .filter(|&x| x > hint.lo && x.is_finite())
            .collect()
    }
}

/// Boundary between an admissible point `good` and an inadmissible `bad`.
/// Uses a root of `1 - K^2` when `K` is finite on both sides, bisection on
/// the admissibility predicate otherwise.
fn refine(eval: &dyn Fn(f64) -> f64, good: f64, bad: f64) -> (f64, Boundary) {
    let kb = eval(bad);
    let (lo, hi) = if good < bad { (good, bad) } else { (bad, good) };
    if kb.is_finite() {
        let g = |x: f64| 1.0 - eval(x).powi(2);
        let tol = Tolerance::uniform(1e-14);
        if let Ok(iv) = Interval::closed(lo, hi) {
            if let Ok(r) = find_root(g, iv, &tol) {
                if eval(r).is_finite() {
                    return (r, Boundary::Turning);
                }
            }
        }
    }
    let (mut g, mut b) = (good, bad);
    for _ in 0..200 {
        let m = 0.5 * (g + b);
        if m == g || m == b {
            break;
        }
        if admissible(eval(m)) {
            g = m;
        } else {
            b = m;
        }
    }
    let kind = if eval(b).is_finite() {
        Boundary::Turning
    } else {
        Boundary::Cutoff
    };
    (g, kind)
}

fn hint_end_kind(x: f64) -> Boundary {
    if x == 0.0 {
        Boundary::Axis
    } else if x.is_infinite() {
        Boundary::Unbounded
    } else {
        Boundary::Cutoff
    }
}

/// Admissible component of `hint` for `eval`: the one containing the hint's
/// midpoint, else the widest one. Returns the open interval and the kinds of
/// its two ends.
pub(crate) fn find_domain(
    eval: &dyn Fn(f64) -> f64,
    hint: &Interval,
    label: &str,
) -> Result<(Interval, Boundary, Boundary)> {
    find_domain_near(eval, hint, label, None)
}

/// As [`find_domain`], but the component containing `prefer` wins when
/// there is one.
pub(crate) fn find_domain_near(
    eval: &dyn Fn(f64) -> f64,
    hint: &Interval,
    label: &str,
    prefer: Option<f64>,
) -> Result<(Interval, Boundary, Boundary)> {
    if hint.lo < 0.0 {
        return Err(Error::BadParams(format!(
            "domain hint must lie in x >= 0, got lo = {}",
            hint.lo
        )));
    }
    let xs = sample_points(hint);
    let ok: Vec<bool> = xs.iter().map(|&x| admissible(eval(x))).collect();

    // runs of admissible samples as index ranges
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = None;
    for (i, &flag) in ok.iter().enumerate() {
        match (flag, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, xs.len() - 1));
    }
    if runs.is_empty() {
        return Err(Error::EmptyDomain(format!(
            "K^2 >= 1 throughout the hint for {label}"
        )));
    }

    let ends = |&(a, b): &(usize, usize)| -> (f64, Boundary, f64, Boundary) {
        let (lo, lk) = if a == 0 {
            (hint.lo, hint_end_kind(hint.lo))
        } else {
            refine(eval, xs[a], xs[a - 1])
        };
        let (hi, hk) = if b == xs.len() - 1 {
            (hint.hi, hint_end_kind(hint.hi))
        } else {
            refine(eval, xs[b], xs[b + 1])
        };
        (lo, lk, hi, hk)
    };

    let mid = 0.5 * (hint.lo + hint.hi);
    let candidates: Vec<_> = runs.iter().map(ends).collect();
    let chosen = prefer
        .and_then(|p| candidates.iter().find(|c| c.0 < p && p < c.2))
        .or_else(|| {
            candidates
                .iter()
                .find(|c| hint.hi.is_finite() && c.0 < mid && mid < c.2)
        })
        .or_else(|| {
            if hint.hi.is_finite() {
                candidates
                    .iter()
                    .max_by(|a, b| (a.2 - a.0).total_cmp(&(b.2 - b.0)))
            } else {
                candidates.first()
            }
        })
        .expect("at least one run");
    let iv = Interval::open(chosen.0, chosen.2)
        .map_err(|_| Error::EmptyDomain(format!("admissible set of {label} has no interior")))?;
    Ok((iv, chosen.1, chosen.3))
}

/// Momentum from an arbitrary expression. The derivative is a central
/// difference and the domain is the admissible component of `domain_hint`
/// (`K^2 < 1`) that contains the hint's midpoint, or the widest one if the
/// midpoint is not admissible. For an unbounded hint the lowest component
/// is taken.
pub fn from_expression(
    eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    domain_hint: Interval,
    label: impl Into<String>,
) -> Result<MomentumFn> {
    let label = label.into();
    let eval = Arc::new(eval);
    let (domain, lo_kind, hi_kind) = find_domain(&*eval, &domain_hint, &label)?;
    let e2 = eval.clone();
    let deriv = move |x: f64| fd_derivative(&*e2, x).unwrap_or(f64::NAN);
    MomentumFn::new(move |x| eval(x), deriv, domain, (lo_kind, hi_kind), label)
}

/// Momentum from a closed form with a known derivative; the domain is found
/// as in [`from_expression`].
pub fn from_closed_form(
    eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    domain_hint: Interval,
    label: impl Into<String>,
) -> Result<MomentumFn> {
    let label = label.into();
    let (domain, lo_kind, hi_kind) = find_domain(&eval, &domain_hint, &label)?;
    MomentumFn::new(eval, deriv, domain, (lo_kind, hi_kind), label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_x() {
        let m = from_expression(|x| x / 2.0, Interval::open(0.0, 10.0).unwrap(), "x/2").unwrap();
        assert_eq!(m.domain.lo, 0.0);
        assert!((m.domain.hi - 2.0).abs() < 1e-12);
        assert_eq!(m.lo_kind, Boundary::Axis);
        assert_eq!(m.hi_kind, Boundary::Turning);
        assert!((m.deriv(1.0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn reciprocal() {
        let m = from_expression(|x| 1.0 / x, Interval::open(0.1, 100.0).unwrap(), "1/x").unwrap();
        assert!((m.domain.lo - 1.0).abs() < 1e-12);
        assert_eq!(m.domain.hi, 100.0);
        assert_eq!(m.hi_kind, Boundary::Cutoff);
    }

    #[test]
    fn constant_two_is_empty() {
        let r = from_expression(|_| 2.0, Interval::open(0.0, 1.0).unwrap(), "2");
        assert!(matches!(r, Err(Error::EmptyDomain(_))));
    }

    #[test]
    fn unbounded_hint() {
        let m = from_expression(
            |x| 1.0 / x,
            Interval::open(0.0, f64::INFINITY).unwrap(),
            "1/x",
        )
        .unwrap();
        assert!((m.domain.lo - 1.0).abs() < 1e-12);
        assert!(m.domain.hi.is_infinite());
        assert_eq!(m.hi_kind, Boundary::Unbounded);
    }

    #[test]
    fn formula_singularity_is_cutoff() {
        // sqrt(1 - x) is undefined beyond 1, and K -> 0 there, not +-1
        let m = from_expression(
            |x| (1.0 - x).sqrt(),
            Interval::open(0.0, 3.0).unwrap(),
            "sqrt",
        )
        .unwrap();
        assert!((m.domain.hi - 1.0).abs() < 1e-12);
        assert_eq!(m.hi_kind, Boundary::Cutoff);
    }

    #[test]
    fn midpoint_component_preferred() {
        // K = sin(x) * 2: admissible where |sin x| < 1/2
        let m = from_expression(
            |x| 2.0 * x.sin(),
            Interval::open(2.0, 4.0).unwrap(),
            "2 sin",
        )
        .unwrap();
        assert!((m.domain.lo - 5.0 * PI / 6.0).abs() < 1e-12);
        assert!((m.domain.hi - 7.0 * PI / 6.0).abs() < 1e-12);
    }
}

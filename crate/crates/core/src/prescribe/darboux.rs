use super::{from_gauss_curvature, PrescribedFn};
use crate::error::{Error, Result};
use crate::generatrix::graph_z_at;
use crate::numerics::{elliptic_e_inc, integrate_adaptive, Tolerance};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Parameter range of the tractrix profile, `t in [-T, T]`.
pub const PSEUDOSPHERE_T: f64 = 5.0;

/// Profiles of rotational surfaces with constant Gauss curvature `K0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DarbouxFamily {
    /// `K0 > 0`: `r = a k cos t`, `z = a E(k, t)`
    Positive,
    /// `K0 < 0`, `0 < k < 1`: `r = a k sinh t`, `z = a int_0^t sqrt(1 - k^2 cosh^2 u) du`
    ConicalPoint,
    /// `K0 < 0`: `r = a k cosh t`, `z = a int_0^t sqrt(1 - k^2 sinh^2 u) du`
    HyperboloidType,
    /// `K0 < 0`, the tractrix `r = a sech t`, `z = a (t - tanh t)`
    Pseudosphere,
}

fn check(k0: f64, family: DarbouxFamily, k: f64) -> Result<f64> {
    use DarbouxFamily::*;
    if k0 == 0.0 || !k0.is_finite() {
        return Err(Error::BadParams(format!(
            "K0 must be finite and nonzero, got {k0}"
        )));
    }
    let ok = match family {
        Positive => k0 > 0.0 && k > 0.0 && k.is_finite(),
        ConicalPoint => k0 < 0.0 && k > 0.0 && k < 1.0,
        HyperboloidType => k0 < 0.0 && k != 0.0 && k.is_finite(),
        Pseudosphere => k0 < 0.0,
    };
    if !ok {
        return Err(Error::BadParams(format!(
            "{family:?} profile not defined for K0={k0}, k={k}"
        )));
    }
    Ok(1.0 / k0.abs().sqrt())
}

/// Parameter range `[t_lo, t_hi]` where the profile is real.
fn t_range(family: DarbouxFamily, k: f64) -> (f64, f64) {
    use DarbouxFamily::*;
    match family {
        Positive if k > 1.0 => {
            let t = (1.0 / k).asin();
            (-t, t)
        }
        Positive => (-FRAC_PI_2, FRAC_PI_2),
        ConicalPoint => (0.0, (1.0 / k).acosh()),
        HyperboloidType => {
            let t = (1.0 / k.abs()).asinh();
            (-t, t)
        }
        Pseudosphere => (-PSEUDOSPHERE_T, PSEUDOSPHERE_T),
    }
}

/// Profile points at parameters `ts`, with `z(0) = 0`.
fn profile_at(a: f64, family: DarbouxFamily, k: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    use DarbouxFamily::*;
    let tol = Tolerance::uniform(1e-13);
    let integrand = move |u: f64| -> f64 {
        let v = match family {
            ConicalPoint => 1.0 - (k * u.cosh()).powi(2),
            _ => 1.0 - (k * u.sinh()).powi(2),
        };
        v.max(0.0).sqrt()
    };
    let mut out = Vec::with_capacity(ts.len());
    // running integrals from t = 0, one per sign of t, visited by |t|
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&i, &j| ts[i].abs().total_cmp(&ts[j].abs()));
    let mut z = vec![0.0; ts.len()];
    let (mut pos, mut neg) = ((0.0, 0.0), (0.0, 0.0));
    for &i in &order {
        let t = ts[i];
        z[i] = match family {
            Positive => a * elliptic_e_inc(k, t)?,
            Pseudosphere => a * (t - t.tanh()),
            _ => {
                let run = if t >= 0.0 { &mut pos } else { &mut neg };
                run.1 += integrate_adaptive(integrand, run.0, t, &tol)?;
                run.0 = t;
                a * run.1
            }
        };
    }
    for (i, &t) in ts.iter().enumerate() {
        let r = match family {
            Positive => a * k * t.cos(),
            ConicalPoint => a * k * t.sinh(),
            HyperboloidType => a * k.abs() * t.cosh(),
            Pseudosphere => a / t.cosh(),
        };
        out.push((r, z[i]));
    }
    Ok(out)
}

/// `n` samples `(r, z)` of the closed-form profile, equally spaced in the
/// parameter over its real range. `a = 1 / sqrt|K0|`; `k` is ignored for
/// the pseudosphere.
pub fn darboux_profile(
    k0: f64,
    family: DarbouxFamily,
    k: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let a = check(k0, family, k)?;
    let (lo, hi) = t_range(family, k);
    let ts: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    profile_at(a, family, k, &ts)
}

#[derive(Debug, Clone, Serialize)]
pub struct DarbouxReport {
    pub k0: f64,
    pub c: f64,
    pub family: DarbouxFamily,
    pub k: f64,
    pub a: f64,
    /// Sup distance in `z` between the two profiles at shared abscissae.
    pub distance: f64,
    pub samples: usize,
}

/// Family and modulus for `K^2 = K0 x^2 + c`: `c = 1 - k^2` gives the
/// positive and conical-point profiles, `c = 1 + k^2` the hyperboloid type
/// and `c = 1` the pseudosphere.
pub fn darboux_case(k0: f64, c: f64) -> Result<(DarbouxFamily, f64)> {
    use DarbouxFamily::*;
    if k0 > 0.0 {
        if c < 1.0 {
            Ok((Positive, (1.0 - c).sqrt()))
        } else {
            Err(Error::EmptyDomain(format!(
                "K0={k0}, c={c}: K^2 >= 1 everywhere"
            )))
        }
    } else if k0 < 0.0 {
        if c <= 0.0 {
            Err(Error::EmptyDomain(format!(
                "K0={k0}, c={c}: K^2 <= 0 everywhere"
            )))
        } else if c < 1.0 {
            Ok((ConicalPoint, (1.0 - c).sqrt()))
        } else if c == 1.0 {
            Ok((Pseudosphere, 0.0))
        } else {
            Ok((HyperboloidType, (c - 1.0).sqrt()))
        }
    } else {
        Err(Error::BadParams("K0 must be nonzero".into()))
    }
}

const CROSS_SAMPLES: usize = 400;

/// Compare the prescribed-curvature momentum `K^2 = K0 x^2 + c` (through
/// its graph `z(x)`) with the closed-form profile of the matching family.
///
/// Both are sampled on the `t >= 0` half of the profile, where `r` is
/// monotone, aligned in `z` at `t = 0`, and compared for both
/// orientations; the smaller sup distance is reported.
pub fn cross_validate_darboux(k0: f64, c: f64) -> Result<DarbouxReport> {
    let (family, k) = darboux_case(k0, c)?;
    let a = check(k0, family, k)?;
    let m = from_gauss_curvature(&PrescribedFn::Const(k0), c, 0.0, 1)?.momentum;
    let t_hi = t_range(family, k).1;
    let n = CROSS_SAMPLES;
    let ts: Vec<f64> = (0..n).map(|i| t_hi * i as f64 / (n - 1) as f64).collect();
    let mut prof = profile_at(a, family, k, &ts)?;
    let z_ref = prof[0].1;
    let r_ref = prof[0].0.clamp(m.domain.lo, m.domain.hi);
    for p in &mut prof {
        p.0 = p.0.clamp(m.domain.lo, m.domain.hi);
        p.1 -= z_ref;
    }
    prof.sort_by(|p, q| p.0.total_cmp(&q.0));
    prof.dedup_by(|p, q| p.0 == q.0);
    let xs: Vec<f64> = prof.iter().map(|p| p.0).collect();
    let g = graph_z_at(&m, &xs, 1)?;
    let g_ref = g
        .iter()
        .find(|p| p.0 == r_ref)
        .map(|p| p.1)
        .ok_or_else(|| Error::DegenerateCurve("reference sample lost while aligning".into()))?;
    let dist = |sigma: f64| {
        prof.iter()
            .zip(&g)
            .map(|(p, q)| (p.1 - sigma * (q.1 - g_ref)).abs())
            .fold(0.0, f64::max)
    };
    Ok(DarbouxReport {
        k0,
        c,
        family,
        k,
        a,
        distance: dist(1.0).min(dist(-1.0)),
        samples: xs.len(),
    })
}

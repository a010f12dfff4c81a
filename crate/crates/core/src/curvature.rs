//! Principal, mean and Gauss curvature of a rotational surface from its
//! momentum: `k_m = K'(x)` along meridians, `k_p = K(x)/x` along parallels.

use crate::error::{Error, Result};
use crate::generatrix::GeneratrixCurve;
use crate::momentum::MomentumFn;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

/// Curvatures are clipped to this magnitude in W-diagrams.
pub const CLIP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureRecord {
    pub x: f64,
    pub k_m: f64,
    pub k_p: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "K_G")]
    pub k_g: f64,
}

impl CurvatureRecord {
    pub fn from_principal(x: f64, k_m: f64, k_p: f64) -> Self {
        Self {
            x,
            k_m,
            k_p,
            h: (k_m + k_p) / 2.0,
            k_g: k_m * k_p,
        }
    }
}

pub fn curvatures(m: &MomentumFn, x: f64) -> Result<CurvatureRecord> {
    if !m.in_domain(x) {
        return Err(Error::OutOfDomain {
            x,
            lo: m.domain.lo,
            hi: m.domain.hi,
        });
    }
    Ok(CurvatureRecord::from_principal(
        x,
        m.deriv(x),
        m.eval(x) / x,
    ))
}

/// `n` records at Chebyshev points of the middle 99% of the (compact)
/// domain, with both principal curvatures clipped to `+-1e6`.
pub fn wdiagram(m: &MomentumFn, n: usize) -> Result<Vec<CurvatureRecord>> {
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let (lo, hi) = m.compact_span();
    let pad = 0.005 * (hi - lo);
    let (a, b) = (lo + pad, hi - pad);
    let clip = |v: f64| v.clamp(-CLIP, CLIP);
    Ok((0..n)
        .map(|i| {
            // Chebyshev-Lobatto points, increasing
            let t = 0.5 * (1.0 - (PI * i as f64 / (n - 1) as f64).cos());
            let x = a + (b - a) * t;
            CurvatureRecord::from_principal(x, clip(m.deriv(x)), clip(m.eval(x) / x))
        })
        .collect())
}

/// Curvature of the sampled curve as `d(theta)/ds` between consecutive
/// samples, reported at the mean abscissa.
pub fn discrete_curvature(c: &GeneratrixCurve) -> Result<Vec<(f64, f64)>> {
    if c.samples.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: c.samples.len(),
        });
    }
    Ok(c.samples
        .windows(2)
        .map(|w| {
            (
                0.5 * (w[0].x + w[1].x),
                (w[1].theta - w[0].theta) / (w[1].s - w[0].s),
            )
        })
        .collect())
}

/// Whether `k_m = k_p` (relative to the curvature scale) at `n` domain
/// samples.
pub fn is_umbilical(m: &MomentumFn, n: usize, tol: f64) -> bool {
    m.interior_samples(n).into_iter().all(|x| {
        let r = CurvatureRecord::from_principal(x, m.deriv(x), m.eval(x) / x);
        (r.k_m - r.k_p).abs() <= tol * (1.0 + r.k_m.abs().max(r.k_p.abs()))
    })
}

/// CSV with header `x,k_m,k_p,H,K_G`, 17 significant digits.
pub fn write_csv<W: Write>(records: &[CurvatureRecord], mut w: W) -> Result<()> {
    writeln!(w, "x,k_m,k_p,H,K_G")?;
    for r in records {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.x, r.k_m, r.k_p, r.h, r.k_g
        )?;
    }
    Ok(())
}

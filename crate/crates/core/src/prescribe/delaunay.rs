use crate::error::{Error, Result};
use crate::generatrix::GeneratrixCurve;
use serde::Serialize;

/// Roulette of a conic focus: semi-axes `a`, `b` and `eps = +1` for the
/// ellipse (unduloid), `-1` for the hyperbola (nodoid).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelaunayParams {
    pub a: f64,
    pub b: f64,
    pub eps: i8,
}

impl DelaunayParams {
    pub fn new(a: f64, b: f64, eps: i8) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::BadParams(format!(
                "roulette semi-axes must be positive, got a={a}, b={b}"
            )));
        }
        if eps != 1 && eps != -1 {
            return Err(Error::BadParams(format!("eps must be +1 or -1, got {eps}")));
        }
        if eps == 1 && !(a > b) {
            return Err(Error::BadParams(format!(
                "elliptic roulette needs a > b, got a={a}, b={b}"
            )));
        }
        Ok(Self { a, b, eps })
    }

    /// Roulette of `K = H0 x + c/x`: `a = 1/(2 H0)`, `eps b^2 = c / H0`.
    pub fn from_momentum(h0: f64, c: f64) -> Result<Self> {
        if h0 == 0.0 || c == 0.0 {
            return Err(Error::BadParams(format!(
                "roulette needs H0 != 0 and c != 0, got {h0}, {c}"
            )));
        }
        let r = c / h0;
        Self::new(
            1.0 / (2.0 * h0.abs()),
            r.abs().sqrt(),
            if r > 0.0 { 1 } else { -1 },
        )
    }

    /// Right-hand side of `(dx/dz)^2 = (4a^2x^2 - (x^2 + eps b^2)^2) / (x^2 + eps b^2)^2`.
    pub fn rhs(&self, x: f64) -> f64 {
        let q = x * x + f64::from(self.eps) * self.b * self.b;
        (4.0 * self.a * self.a * x * x - q * q) / (q * q)
    }
}

/// Sup over consecutive sample pairs of `|(dx/dz)^2 - rhs(x_mid)|`, with
/// `dx/dz` the difference quotient. `z` must be strictly monotone.
pub fn delaunay_residual(curve: &GeneratrixCurve, p: &DelaunayParams) -> Result<f64> {
    let s = &curve.samples;
    if s.len() < 2 {
        return Err(Error::DegenerateCurve("need at least two samples".into()));
    }
    let dir = (s[1].z - s[0].z).signum();
    let mut worst: f64 = 0.0;
    for w in s.windows(2) {
        let dz = w[1].z - w[0].z;
        if dz == 0.0 || dz.signum() != dir {
            return Err(Error::DegenerateCurve(format!(
                "z is stationary near s = {}",
                w[0].s
            )));
        }
        let q = (w[1].x - w[0].x) / dz;
        worst = worst.max((q * q - p.rhs(0.5 * (w[0].x + w[1].x))).abs());
    }
    Ok(worst)
}

/// Sup of `|x - a cosh((z - z*) / a)|` with `z*` fitted at the sample of
/// smallest `x` (refined by a parabola through its neighbours).
pub fn catenary_residual(curve: &GeneratrixCurve, a: f64) -> Result<f64> {
    let s = &curve.samples;
    if s.len() < 3 {
        return Err(Error::DegenerateCurve("need at least three samples".into()));
    }
    let i = (0..s.len())
        .min_by(|&i, &j| s[i].x.total_cmp(&s[j].x))
        .expect("nonempty")
        .clamp(1, s.len() - 2);
    // vertex of the parabola x(z) through three samples
    let (z0, z1, z2) = (s[i - 1].z, s[i].z, s[i + 1].z);
    let (x0, x1, x2) = (s[i - 1].x, s[i].x, s[i + 1].x);
    let num = (z1 - z0).powi(2) * (x1 - x2) - (z1 - z2).powi(2) * (x1 - x0);
    let den = (z1 - z0) * (x1 - x2) - (z1 - z2) * (x1 - x0);
    let z_star = if den != 0.0 { z1 - 0.5 * num / den } else { z1 };
    Ok(s.iter()
        .map(|st| (st.x - a * ((st.z - z_star) / a).cosh()).abs())
        .fold(0.0, f64::max))
}

use crate::curvature::curvatures;
use crate::error::Result;
use crate::generatrix::default_profile;
use crate::momentum::MomentumFn;
use crate::numerics::{fd_derivative, Tolerance};
use crate::surface::{mesh_principal_curvatures, revolve};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self {
            name,
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

const MESH_NS: usize = 400;
const MESH_NT: usize = 128;

/// Oracle checks on a momentum: curvature identities, derivative against
/// finite differences, the first integral along a reconstructed profile and
/// mesh-estimated principal curvatures against the exact ones.
///
/// The mesh comparison skips the outer 5% of rows on each side and measures
/// errors relative to `max(1, |k|)`.
pub fn verify_surface(m: &MomentumFn) -> Result<Vec<Check>> {
    let mut ident: f64 = 0.0;
    let mut deriv: f64 = 0.0;
    for x in m.interior_samples(100) {
        let r = curvatures(m, x)?;
        ident = ident
            .max((2.0 * r.h - (r.k_m + r.k_p)).abs())
            .max((r.k_g - r.k_m * r.k_p).abs());
        let fd = fd_derivative(|y| m.eval(y), x)?;
        deriv = deriv.max((r.k_m - fd).abs() / (1.0 + r.k_m.abs()));
    }

    let curve = default_profile(m, None, None, &Tolerance::uniform(1e-12))?;
    let drift = curve.first_integral_drift();

    let mesh = revolve(&curve.resample(MESH_NS)?, MESH_NT)?;
    let est = mesh_principal_curvatures(&mesh)?;
    let (mut em, mut ep): (f64, f64) = (0.0, 0.0);
    let skip = MESH_NS / 20;
    for i in skip..MESH_NS - skip {
        let x = mesh.source.samples[i].x;
        let (km, kp) = (m.deriv(x), m.eval(x) / x);
        let (a, b) = est.at(i, 0);
        if km.is_finite() && kp.is_finite() {
            em = em.max((a - km).abs() / km.abs().max(1.0));
            ep = ep.max((b - kp).abs() / kp.abs().max(1.0));
        }
    }
    Ok(vec![
        Check::new("identities", ident, 0.0),
        Check::new("derivative", deriv, 1e-6),
        Check::new("first_integral", drift, 1e-8),
        Check::new("mesh_k_m", em, 1e-2),
        Check::new("mesh_k_p", ep, 1e-2),
    ])
}

use super::Principal;
use crate::error::{Error, Result};
use crate::momentum::{catalog, from_closed_form, CatalogEntry, CatalogKind, MomentumFn};
use crate::numerics::Interval;
use serde::Serialize;
use std::collections::BTreeMap;

fn half_line() -> Interval {
    Interval::open(0.0, f64::INFINITY).expect("valid interval")
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Solution of `k_m = p k_p + q` with integration constant `c`:
/// `K = q x / (1 - p) + c x^p`, or `K = q x ln x + c x` when `p = 1`.
pub fn solve_linear(p: f64, q: f64, c: f64) -> Result<MomentumFn> {
    if p == 0.0 || !(p.is_finite() && q.is_finite() && c.is_finite()) {
        return Err(Error::BadParams(format!(
            "linear: need finite p != 0, got p={p}, q={q}, c={c}"
        )));
    }
    let label = format!("linear(p={p},q={q},c={c})");
    let m = if p == 1.0 {
        from_closed_form(
            move |x: f64| q * x * x.ln() + c * x,
            move |x: f64| q * (x.ln() + 1.0) + c,
            half_line(),
            label,
        )?
    } else {
        let r = q / (1.0 - p);
        from_closed_form(
            move |x: f64| r * x + c * x.powf(p),
            move |x: f64| r + c * p * x.powf(p - 1.0),
            half_line(),
            label,
        )?
    };
    Ok(m.with_params(params(&[("p", p), ("q", q), ("c", c)])))
}

/// Solution of `a K_G + 2 b H + c = 0` on the branch `sign`:
/// `K = (-b x + sign sqrt((b^2 - a c) x^2 + a d)) / a`, which satisfies
/// `a K^2 + 2 b x K + c x^2 = d`.
pub fn solve_special_linear(a: f64, b: f64, c: f64, d: f64, sign: i8) -> Result<MomentumFn> {
    if a == 0.0 {
        return Err(Error::NeedsNonzeroA);
    }
    if ![a, b, c, d].iter().all(|v| v.is_finite()) {
        return Err(Error::BadParams(
            "special linear: non-finite coefficient".into(),
        ));
    }
    let s = if sign < 0 { -1.0 } else { 1.0 };
    let disc = b * b - a * c;
    let rad = move |x: f64| disc * x * x + a * d;
    let m = from_closed_form(
        move |x: f64| (-b * x + s * rad(x).sqrt()) / a,
        move |x: f64| (-b + s * disc * x / rad(x).sqrt()) / a,
        half_line(),
        format!(
            "special(a={a},b={b},c={c},d={d},{})",
            if s > 0.0 { '+' } else { '-' }
        ),
    )?;
    Ok(m.with_params(params(&[
        ("a", a),
        ("b", b),
        ("c", c),
        ("d", d),
        ("sign", s),
    ])))
}

/// `K = x / sqrt(mu + c x^2)`, the non-constant solution of `k_m = mu k_p^3`.
pub fn solve_cubic(mu: f64, c: f64) -> Result<MomentumFn> {
    if mu == 0.0 || !(mu.is_finite() && c.is_finite()) {
        return Err(Error::BadParams(format!(
            "cubic: need finite mu != 0, got mu={mu}, c={c}"
        )));
    }
    let label = format!("cubic(mu={mu},c={c})");
    // K^2 < 1  <=>  (1 - c) x^2 < mu, on top of mu + c x^2 > 0
    use crate::momentum::Boundary::*;
    let (lo, hi, lk, hk) = if mu > 0.0 {
        if c < 1.0 {
            (0.0, (mu / (1.0 - c)).sqrt(), Axis, Turning)
        } else {
            (0.0, f64::INFINITY, Axis, Unbounded)
        }
    } else if c > 1.0 {
        ((mu / (1.0 - c)).sqrt(), f64::INFINITY, Turning, Unbounded)
    } else {
        return Err(Error::EmptyDomain(format!("{label}: mu < 0 needs c > 1")));
    };
    let iv = Interval::open(lo, hi).map_err(|_| Error::EmptyDomain(label.clone()))?;
    let m = MomentumFn::new(
        move |x: f64| x / (mu + c * x * x).sqrt(),
        move |x: f64| mu / (mu + c * x * x).powf(1.5),
        iv,
        (lk, hk),
        label,
    )?;
    Ok(m.with_params(params(&[("mu", mu), ("c", c)])))
}

/// The plane and the non-degenerate quadrics of revolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum QuadricClass {
    #[serde(rename = "plane")]
    Plane,
    #[serde(rename = "sphere")]
    Sphere {
        #[serde(rename = "R")]
        r: f64,
    },
    #[serde(rename = "ellipsoid")]
    EllipsoidOfRevolution { a: f64, b: f64 },
    #[serde(rename = "hyperboloid2")]
    TwoSheetsHyperboloid { a: f64, b: f64 },
    #[serde(rename = "paraboloid")]
    ParaboloidOfRevolution { a: f64 },
    #[serde(rename = "hyperboloid1")]
    OneSheetHyperboloid { a: f64, b: f64 },
}

impl QuadricClass {
    pub fn to_entry(&self) -> CatalogEntry {
        use CatalogKind::*;
        match *self {
            QuadricClass::Plane => CatalogEntry::new(HorizontalPlane, &[]),
            QuadricClass::Sphere { r } => CatalogEntry::new(Sphere, &[("R", r)]),
            QuadricClass::EllipsoidOfRevolution { a, b } => {
                CatalogEntry::new(Ellipsoid, &[("a", a), ("b", b)])
            }
            QuadricClass::TwoSheetsHyperboloid { a, b } => {
                CatalogEntry::new(TwoSheetsHyperboloid, &[("a", a), ("b", b)])
            }
            QuadricClass::ParaboloidOfRevolution { a } => {
                CatalogEntry::new(Paraboloid, &[("a", a)])
            }
            QuadricClass::OneSheetHyperboloid { a, b } => {
                CatalogEntry::new(OneSheetHyperboloid, &[("a", a), ("b", b)])
            }
        }
    }
}

/// Which quadric `solve_cubic(mu, c)` generates.
pub fn classify_cubic(mu: f64, c: f64) -> Result<QuadricClass> {
    if mu == 0.0 || !(mu.is_finite() && c.is_finite()) {
        return Err(Error::BadParams(format!(
            "cubic: need finite mu != 0, got mu={mu}"
        )));
    }
    if mu > 0.0 {
        Ok(if c == 0.0 {
            QuadricClass::Sphere { r: mu.sqrt() }
        } else if c < 1.0 {
            let a2 = mu / (1.0 - c);
            QuadricClass::EllipsoidOfRevolution {
                a: a2.sqrt(),
                b: (a2 * a2 / mu).sqrt(),
            }
        } else if c > 1.0 {
            let a2 = mu / (c - 1.0);
            QuadricClass::TwoSheetsHyperboloid {
                a: a2.sqrt(),
                b: (a2 * a2 / mu).sqrt(),
            }
        } else {
            QuadricClass::ParaboloidOfRevolution { a: mu.sqrt() }
        })
    } else if c > 1.0 {
        let a2 = mu / (1.0 - c);
        Ok(QuadricClass::OneSheetHyperboloid {
            a: a2.sqrt(),
            b: (-a2 * a2 / mu).sqrt(),
        })
    } else {
        Err(Error::EmptyDomain(format!(
            "cubic(mu={mu},c={c}): mu < 0 needs c > 1"
        )))
    }
}

/// `K = a x^2 + mu / (4 a)`: the elasticoid of modulus `k = -mu / (4 a)`.
pub fn solve_hyperbola(mu: f64, a_coef: f64) -> Result<MomentumFn> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::BadParams(format!(
            "hyperbola: need finite mu != 0, got {mu}"
        )));
    }
    if !(a_coef > 0.0 && a_coef.is_finite()) {
        return Err(Error::BadParams(format!(
            "hyperbola: need a > 0, got {a_coef}"
        )));
    }
    let k = -mu / (4.0 * a_coef);
    if k <= -1.0 {
        return Err(Error::EmptyDomain(format!(
            "hyperbola(mu={mu},a={a_coef}): K >= 1 for all x"
        )));
    }
    catalog(&CatalogEntry::new(
        CatalogKind::Elasticoid,
        &[("a", a_coef), ("k", k)],
    ))
}

/// The solution with `k_m = k_p = sqrt(mu)`: the sphere `K = sqrt(mu) x` of
/// radius `1 / sqrt(mu)`.
pub fn sphere_branch(mu: f64) -> Result<MomentumFn> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::BadParams(format!(
            "sphere branch needs mu > 0, got {mu}"
        )));
    }
    catalog(&CatalogEntry::new(
        CatalogKind::Sphere,
        &[("R", 1.0 / mu.sqrt())],
    ))
}

/// The right circular cylinder of the given radius. It has `k_p` constant
/// but `x` constant too, so it has no momentum `K(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylinderMarker {
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct ConstPrincipalSolution {
    pub momentum: MomentumFn,
    /// Present for a nonzero constant parallel curvature.
    pub cylinder: Option<CylinderMarker>,
}

fn signed(entry: CatalogEntry, negative: bool) -> Result<MomentumFn> {
    catalog(&if negative { entry.negated() } else { entry })
}

/// Surfaces with a constant principal curvature. Meridian: `K = v x + c`
/// (plane, cone, sphere or torus). Parallel: `K = v x` (plane or sphere),
/// plus the cylinder of radius `1 / |v|`.
pub fn solve_const_principal(
    which: Principal,
    value: f64,
    c: f64,
) -> Result<ConstPrincipalSolution> {
    use CatalogKind::*;
    if !(value.is_finite() && c.is_finite()) {
        return Err(Error::BadParams(
            "constant principal curvature: non-finite input".into(),
        ));
    }
    let (v, c) = match which {
        Principal::Meridian => (value, c),
        Principal::Parallel => (value, 0.0),
    };
    let momentum = if v == 0.0 {
        if c == 0.0 {
            catalog(&CatalogEntry::new(HorizontalPlane, &[]))?
        } else if c.abs() < 1.0 {
            catalog(&CatalogEntry::new(Cone, &[("theta0", c.asin())]))?
        } else {
            return Err(Error::EmptyDomain(format!("K = {c} is never admissible")));
        }
    } else {
        // K = v x + c = sign(v) (x - a) / R with R = 1/|v|, a = -c/v
        let r = 1.0 / v.abs();
        if c == 0.0 {
            signed(CatalogEntry::new(Sphere, &[("R", r)]), v < 0.0)?
        } else {
            signed(
                CatalogEntry::new(Torus, &[("a", -c / v), ("R", r)]),
                v < 0.0,
            )?
        }
    };
    let cylinder = match which {
        Principal::Parallel if value != 0.0 => Some(CylinderMarker {
            radius: 1.0 / value.abs(),
        }),
        _ => None,
    };
    Ok(ConstPrincipalSolution { momentum, cylinder })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same(a: &MomentumFn, b: &MomentumFn, tol: f64) {
        for x in b.interior_samples(50) {
            let (u, v) = (a.eval(x), b.eval(x));
            assert!(
                (u - v).abs() <= tol,
                "{} vs {} at {x}: {u} {v}",
                a.label,
                b.label
            );
        }
    }

    fn cat(s: &str) -> MomentumFn {
        catalog(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn linear_examples() {
        let m = solve_linear(-1.0, 0.0, 1.0).unwrap();
        assert!((m.domain.lo - 1.0).abs() < 1e-12 && m.domain.hi.is_infinite());
        same(&m, &cat("catenoid:a=1"), 1e-15);
        let m = solve_linear(0.5, 0.0, 1.0 / 2f64.sqrt()).unwrap();
        assert!((m.domain.hi - 2.0).abs() < 1e-12);
        same(&m, &cat("onducycloid:R=1"), 1e-15);
        let m = solve_linear(1.0, 0.0, 0.5).unwrap();
        same(&m, &cat("sphere:R=2"), 1e-15);
        assert!(solve_linear(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn special_linear_examples() {
        // a = -2b, c = d = 0: the minus branch is the sphere of radius |a / 2b|
        let m = solve_special_linear(-3.0, 1.5, 0.0, 0.0, -1).unwrap();
        same(&m, &cat("sphere:R=1"), 1e-15);
        let m = solve_special_linear(-4.0, 1.0, 0.0, 0.0, -1).unwrap();
        same(&m, &cat("sphere:R=2"), 1e-15);
        let m = solve_special_linear(1.0, 0.0, 0.0, 0.0, 1).unwrap();
        assert!(m.interior_samples(10).iter().all(|&x| m.eval(x) == 0.0));
        let m = solve_special_linear(1.0, 0.0, -1.0, 0.0, 1).unwrap();
        same(&m, &cat("sphere:R=1"), 1e-15);
        assert!(matches!(
            solve_special_linear(0.0, 1.0, 0.0, 0.0, 1),
            Err(Error::NeedsNonzeroA)
        ));
    }

    #[test]
    fn special_linear_implicit_form() {
        let (a, b, c, d) = (1.0, 0.3, -0.5, 0.2);
        for sign in [1, -1] {
            let m = solve_special_linear(a, b, c, d, sign).unwrap();
            for x in m.interior_samples(100) {
                let k = m.eval(x);
                assert!(
                    (a * k * k + 2.0 * b * x * k + c * x * x - d).abs() <= 1e-12,
                    "{sign} {x}"
                );
            }
        }
    }

    #[test]
    fn cubic_examples() {
        same(&solve_cubic(1.0, 0.0).unwrap(), &cat("sphere:R=1"), 1e-15);
        same(
            &solve_cubic(1.0, 1.0).unwrap(),
            &cat("paraboloid:a=1"),
            1e-15,
        );
        let h = solve_cubic(-1.0, 2.0).unwrap();
        assert_eq!(h.domain.lo, 1.0);
        same(&h, &cat("hyperboloid1:a=1,b=1"), 1e-15);
        assert!(matches!(solve_cubic(-1.0, 0.5), Err(Error::EmptyDomain(_))));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify_cubic(4.0, 0.0).unwrap(),
            QuadricClass::Sphere { r: 2.0 }
        );
        assert_eq!(
            classify_cubic(1.0, 0.0).unwrap(),
            QuadricClass::Sphere { r: 1.0 }
        );
        assert_eq!(
            classify_cubic(4.0, 0.75).unwrap(),
            QuadricClass::EllipsoidOfRevolution { a: 4.0, b: 8.0 }
        );
        assert!(matches!(
            classify_cubic(-1.0, 0.5),
            Err(Error::EmptyDomain(_))
        ));
        assert_eq!(
            classify_cubic(9.0, 1.0).unwrap(),
            QuadricClass::ParaboloidOfRevolution { a: 3.0 }
        );
        let json = serde_json::to_string(&classify_cubic(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(json, r#"{"kind":"sphere","R":1.0}"#);
    }

    #[test]
    fn classification_matches_catalog() {
        for (mu, c) in [
            (16.0, -15.0),
            (2.0, 0.3),
            (1.0, 3.0),
            (0.5, 1.0),
            (-2.0, 1.5),
            (-0.3, 4.0),
        ] {
            let q = classify_cubic(mu, c).unwrap();
            let from_cat = catalog(&q.to_entry()).unwrap();
            let solved = solve_cubic(mu, c).unwrap();
            assert!((from_cat.domain.lo - solved.domain.lo).abs() < 1e-12);
            same(&from_cat, &solved, 1e-12);
        }
    }

    #[test]
    fn hyperbola_examples() {
        let m = solve_hyperbola(-2.0, 1.0).unwrap();
        same(&m, &cat("elasticoid:a=1,k=0.5"), 0.0);
        let s = sphere_branch(1.0).unwrap();
        same(&s, &cat("sphere:R=1"), 0.0);
        let s = sphere_branch(4.0).unwrap();
        assert_eq!(s.domain.hi, 0.5);
        assert!(solve_hyperbola(8.0, 1.0).is_err());
    }

    #[test]
    fn const_principal_examples() {
        let s = solve_const_principal(Principal::Meridian, 0.5, 0.0).unwrap();
        same(&s.momentum, &cat("sphere:R=2"), 0.0);
        assert!(s.cylinder.is_none());
        let t = solve_const_principal(Principal::Meridian, 1.0, -2.0).unwrap();
        same(&t.momentum, &cat("torus:a=2,R=1"), 1e-15);
        let c = solve_const_principal(Principal::Meridian, 0.0, 0.3).unwrap();
        assert!(c
            .momentum
            .interior_samples(5)
            .iter()
            .all(|&x| (c.momentum.eval(x) - 0.3).abs() < 1e-15));
        let n = solve_const_principal(Principal::Meridian, -1.0, 2.0).unwrap();
        assert_eq!(n.momentum.eval(2.5), -0.5);
        let p = solve_const_principal(Principal::Parallel, 0.25, 99.0).unwrap();
        same(&p.momentum, &cat("sphere:R=4"), 0.0);
        assert_eq!(p.cylinder, Some(CylinderMarker { radius: 4.0 }));
    }
}

//! Weingarten relations `Phi(k_m, k_p) = 0` between the principal curvatures
//! of a rotational surface. Each relation becomes a first order equation
//! `K' = F(x, K)` on the momentum; the classical families are solved in
//! closed form and anything else numerically.

mod closed;
mod generic;

pub use closed::{
    classify_cubic, solve_const_principal, solve_cubic, solve_hyperbola, solve_linear,
    solve_special_linear, sphere_branch, ConstPrincipalSolution, CylinderMarker, QuadricClass,
};
pub use generic::solve_generic;

use crate::curvature::CurvatureRecord;
use crate::error::{Error, Result};
use crate::parse::{check_keys, parse_tagged, require};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Right-hand side `F(x, K)` of `K' = F(x, K)`.
pub type OdeField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Principal {
    Meridian,
    Parallel,
}

#[derive(Clone)]
pub enum WRelation {
    /// `k_m = p k_p + q`
    Linear {
        p: f64,
        q: f64,
    },
    /// `a K_G + 2 b H + c = 0`
    SpecialLinear {
        a: f64,
        b: f64,
        c: f64,
    },
    /// `k_m = mu k_p^3`
    Cubic {
        mu: f64,
    },
    /// `k_m^2 - 2 k_p k_m + mu = 0`
    Hyperbola {
        mu: f64,
    },
    ConstPrincipal {
        which: Principal,
        value: f64,
    },
    Generic {
        f: OdeField,
    },
}

impl fmt::Debug for WRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WRelation::Generic { .. } => f.write_str("Generic { .. }"),
            other => write!(f, "{other}"),
        }
    }
}

impl fmt::Display for WRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WRelation::Linear { p, q } => write!(f, "linear:p={p},q={q}"),
            WRelation::SpecialLinear { a, b, c } => write!(f, "special:a={a},b={b},c={c}"),
            WRelation::Cubic { mu } => write!(f, "cubic:mu={mu}"),
            WRelation::Hyperbola { mu } => write!(f, "hyperbola:mu={mu}"),
            WRelation::ConstPrincipal { which, value } => {
                let w = match which {
                    Principal::Meridian => "meridian",
                    Principal::Parallel => "parallel",
                };
                write!(f, "const:{w}={value}")
            }
            WRelation::Generic { .. } => f.write_str("generic"),
        }
    }
}

impl WRelation {
    pub fn generic(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        WRelation::Generic { f: Arc::new(f) }
    }

    /// Checks the parameter constraints of each variant.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadParams(m));
        match *self {
            WRelation::Linear { p, q } if !(p.is_finite() && q.is_finite()) => {
                bad(format!("{self}: non-finite"))
            }
            WRelation::Linear { p: 0.0, .. } => bad("linear relation needs p != 0".into()),
            WRelation::SpecialLinear { a, b, c }
                if !(a.is_finite() && b.is_finite() && c.is_finite()) =>
            {
                bad(format!("{self}: non-finite"))
            }
            WRelation::SpecialLinear { a, b, .. } if a == 0.0 && b == 0.0 => {
                bad("special linear relation needs a^2 + b^2 != 0".into())
            }
            WRelation::Cubic { mu } | WRelation::Hyperbola { mu }
                if !(mu.is_finite() && mu != 0.0) =>
            {
                bad(format!("{self}: mu must be finite and nonzero"))
            }
            WRelation::ConstPrincipal { value, .. } if !value.is_finite() => {
                bad(format!("{self}: non-finite"))
            }
            _ => Ok(()),
        }
    }

    /// Signed value of `Phi(k_m, k_p)` on a record.
    pub fn residual(&self, rec: &CurvatureRecord) -> Result<f64> {
        let (km, kp) = (rec.k_m, rec.k_p);
        Ok(match *self {
            WRelation::Linear { p, q } => km - p * kp - q,
            WRelation::SpecialLinear { a, b, c } => a * rec.k_g + 2.0 * b * rec.h + c,
            WRelation::Cubic { mu } => km - mu * kp.powi(3),
            WRelation::Hyperbola { mu } => km * km - 2.0 * kp * km + mu,
            WRelation::ConstPrincipal {
                which: Principal::Meridian,
                value,
            } => km - value,
            WRelation::ConstPrincipal {
                which: Principal::Parallel,
                value,
            } => kp - value,
            WRelation::Generic { .. } => return Err(Error::GenericNotPointwise),
        })
    }

    /// The relation solved for `k_m = K'` with `k_p = K / x`.
    ///
    /// The hyperbola has two roots `k_m = k_p +- sqrt(k_p^2 - mu)`; the `+`
    /// root is returned, which carries the elasticoids for `mu < 0`. A
    /// constant parallel curvature gives `K' = K / x`, whose solutions
    /// `K = v x` all have `k_p = v`.
    pub fn reduce_to_ode(&self) -> Result<OdeField> {
        self.validate()?;
        Ok(match *self {
            WRelation::Linear { p, q } => Arc::new(move |x, k| p * k / x + q),
            WRelation::SpecialLinear { a, b, c } => {
                Arc::new(move |x, k| -(b * k + c * x) / (a * k + b * x))
            }
            WRelation::Cubic { mu } => Arc::new(move |x, k| mu * (k / x).powi(3)),
            WRelation::Hyperbola { mu } => Arc::new(move |x, k| {
                let kp = k / x;
                kp + (kp * kp - mu).sqrt()
            }),
            WRelation::ConstPrincipal {
                which: Principal::Meridian,
                value,
            } => Arc::new(move |_, _| value),
            WRelation::ConstPrincipal {
                which: Principal::Parallel,
                ..
            } => Arc::new(|x, k| k / x),
            WRelation::Generic { ref f } => f.clone(),
        })
    }
}

impl FromStr for WRelation {
    type Err = Error;
    /// `linear:p=..,q=..`, `special:a=..,b=..,c=..`, `cubic:mu=..`,
    /// `hyperbola:mu=..`, `const:meridian=..` or `const:parallel=..`.
    /// Missing `q` and `c` default to 0.
    fn from_str(s: &str) -> Result<Self> {
        let (name, p) = parse_tagged(s)?;
        let get0 = |k: &str| p.get(k).copied().unwrap_or(0.0);
        let r = match name.as_str() {
            "linear" => {
                check_keys(&p, &["p", "q"], "linear")?;
                WRelation::Linear {
                    p: require(&p, "p", "linear")?,
                    q: get0("q"),
                }
            }
            "special" | "special-linear" | "special_linear" => {
                check_keys(&p, &["a", "b", "c"], "special")?;
                WRelation::SpecialLinear {
                    a: get0("a"),
                    b: get0("b"),
                    c: get0("c"),
                }
            }
            "cubic" => {
                check_keys(&p, &["mu"], "cubic")?;
                WRelation::Cubic {
                    mu: require(&p, "mu", "cubic")?,
                }
            }
            "hyperbola" => {
                check_keys(&p, &["mu"], "hyperbola")?;
                WRelation::Hyperbola {
                    mu: require(&p, "mu", "hyperbola")?,
                }
            }
            "const" => {
                check_keys(&p, &["meridian", "parallel"], "const")?;
                match (p.get("meridian"), p.get("parallel")) {
                    (Some(&v), None) => WRelation::ConstPrincipal {
                        which: Principal::Meridian,
                        value: v,
                    },
                    (None, Some(&v)) => WRelation::ConstPrincipal {
                        which: Principal::Parallel,
                        value: v,
                    },
                    _ => {
                        return Err(Error::Parse(
                            "const needs exactly one of meridian=, parallel=".into(),
                        ))
                    }
                }
            }
            other => return Err(Error::Parse(format!("unknown relation '{other}'"))),
        };
        r.validate()?;
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::curvatures;
    use crate::momentum::catalog;

    fn rec(surface: &str, x: f64) -> CurvatureRecord {
        curvatures(&catalog(&surface.parse().unwrap()).unwrap(), x).unwrap()
    }

    #[test]
    fn residual_examples() {
        let r = WRelation::Cubic { mu: 16.0 };
        for x in [0.1, 0.7, 1.3, 1.9] {
            let v = r.residual(&rec("ellipsoid:a=2,b=1", x)).unwrap();
            assert!(v.abs() < 1e-10, "{x}: {v}");
        }
        let cat = rec("catenoid:a=1", 2.0);
        assert_eq!(
            WRelation::Linear { p: -1.0, q: 0.0 }
                .residual(&cat)
                .unwrap(),
            0.0
        );
        assert_eq!(
            WRelation::Linear { p: 1.0, q: 0.0 }.residual(&cat).unwrap(),
            -0.5
        );
        let g = WRelation::generic(|_, _| 0.0);
        assert!(matches!(g.residual(&cat), Err(Error::GenericNotPointwise)));
    }

    #[test]
    fn ode_reproduces_derivative() {
        // K' = F(x, K) on closed-form solutions
        let cases: [(&str, WRelation); 4] = [
            ("catenoid:a=1", WRelation::Linear { p: -1.0, q: 0.0 }),
            ("ellipsoid:a=2,b=1", WRelation::Cubic { mu: 16.0 }),
            ("elasticoid:a=1,k=0.5", WRelation::Hyperbola { mu: -2.0 }),
            (
                "torus:a=2,R=1",
                WRelation::ConstPrincipal {
                    which: Principal::Meridian,
                    value: 1.0,
                },
            ),
        ];
        for (s, r) in cases {
            let m = catalog(&s.parse().unwrap()).unwrap();
            let f = r.reduce_to_ode().unwrap();
            for x in m.interior_samples(20) {
                let d = m.deriv(x);
                assert!(
                    (f(x, m.eval(x)) - d).abs() <= 1e-12 * (1.0 + d.abs()),
                    "{s} at {x}"
                );
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "linear:p=-1,q=0",
            "special:a=1,b=0,c=-1",
            "cubic:mu=16",
            "hyperbola:mu=-2",
            "const:meridian=1",
        ] {
            let r: WRelation = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        let r: WRelation = "linear:p=0.5".parse().unwrap();
        assert_eq!(r.to_string(), "linear:p=0.5,q=0");
    }

    #[test]
    fn parse_rejects() {
        for s in [
            "linear:q=1",
            "linear:p=0",
            "cubic:mu=0",
            "special:c=1",
            "const:meridian=1,parallel=2",
            "const:",
            "quartic:mu=1",
            "cubic:mu=1,nu=2",
        ] {
            assert!(s.parse::<WRelation>().is_err(), "{s}");
        }
    }
}

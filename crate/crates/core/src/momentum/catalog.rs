use super::{Boundary, MomentumFn};
use crate::error::{Error, Result};
use crate::numerics::Interval;
use crate::parse::{check_keys, parse_tagged, require};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CatalogKind {
    HorizontalPlane,
    Cone,
    Sphere,
    Torus,
    Catenoid,
    Onducycloid,
    Pseudosphere,
    Antiparaboloid,
    Ellipsoid,
    OneSheetHyperboloid,
    TwoSheetsHyperboloid,
    Paraboloid,
    Elasticoid,
    DelaunayMomentum,
    DarbouxMomentum,
}

impl CatalogKind {
    pub const ALL: [CatalogKind; 15] = [
        CatalogKind::HorizontalPlane,
        CatalogKind::Cone,
        CatalogKind::Sphere,
        CatalogKind::Torus,
        CatalogKind::Catenoid,
        CatalogKind::Onducycloid,
        CatalogKind::Pseudosphere,
        CatalogKind::Antiparaboloid,
        CatalogKind::Ellipsoid,
        CatalogKind::OneSheetHyperboloid,
        CatalogKind::TwoSheetsHyperboloid,
        CatalogKind::Paraboloid,
        CatalogKind::Elasticoid,
        CatalogKind::DelaunayMomentum,
        CatalogKind::DarbouxMomentum,
    ];

    /// Name used on the command line.
    pub fn name(self) -> &'static str {
        use CatalogKind::*;
        match self {
            HorizontalPlane => "plane",
            Cone => "cone",
            Sphere => "sphere",
            Torus => "torus",
            Catenoid => "catenoid",
            Onducycloid => "onducycloid",
            Pseudosphere => "pseudosphere",
            Antiparaboloid => "antiparaboloid",
            Ellipsoid => "ellipsoid",
            OneSheetHyperboloid => "hyperboloid1",
            TwoSheetsHyperboloid => "hyperboloid2",
            Paraboloid => "paraboloid",
            Elasticoid => "elasticoid",
            DelaunayMomentum => "delaunay",
            DarbouxMomentum => "darboux",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        use CatalogKind::*;
        match self {
            HorizontalPlane => &[],
            Cone => &["theta0"],
            Sphere => &["R"],
            Torus => &["a", "R"],
            Catenoid | Pseudosphere | Paraboloid => &["a"],
            Onducycloid => &["R"],
            Antiparaboloid => &["c"],
            Ellipsoid | OneSheetHyperboloid | TwoSheetsHyperboloid => &["a", "b"],
            Elasticoid => &["a", "k"],
            DelaunayMomentum => &["H0", "c"],
            DarbouxMomentum => &["K0", "c"],
        }
    }

    /// The momentum formula, for listings.
    pub fn formula(self) -> &'static str {
        use CatalogKind::*;
        match self {
            HorizontalPlane => "K = 0",
            Cone => "K = sin(theta0)",
            Sphere => "K = x/R",
            Torus => "K = (x-a)/R",
            Catenoid => "K = a/x",
            Onducycloid => "K = sqrt(x)/sqrt(2R)",
            Pseudosphere => "K = sqrt(1 - x^2/a^2)",
            Antiparaboloid => "K = c/sqrt(x)",
            Ellipsoid => "K = b x/sqrt(a^4 - (a^2-b^2) x^2)",
            OneSheetHyperboloid => "K = b x/sqrt((a^2+b^2) x^2 - a^4)",
            TwoSheetsHyperboloid => "K = b x/sqrt(a^4 + (a^2+b^2) x^2)",
            Paraboloid => "K = x/sqrt(a^2 + x^2)",
            Elasticoid => "K = a x^2 - k",
            DelaunayMomentum => "K = H0 x + c/x",
            DarbouxMomentum => "K = sqrt(K0 x^2 + c)",
        }
    }
}

impl fmt::Display for CatalogKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CatalogKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        let alias = match s.as_str() {
            "horizontalplane" => "plane",
            "onesheethyperboloid" | "hyperboloid" => "hyperboloid1",
            "twosheetshyperboloid" => "hyperboloid2",
            "delaunaymomentum" => "delaunay",
            "darbouxmomentum" => "darboux",
            other => other,
        };
        CatalogKind::ALL
            .into_iter()
            .find(|k| k.name() == alias)
            .ok_or_else(|| Error::Parse(format!("unknown surface '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub kind: CatalogKind,
    pub params: BTreeMap<String, f64>,
    /// Use `-K` instead of the printed formula.
    pub negate: bool,
}

impl CatalogEntry {
    pub fn new(kind: CatalogKind, params: &[(&str, f64)]) -> Self {
        Self {
            kind,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            negate: false,
        }
    }

    pub fn negated(mut self) -> Self {
        self.negate = !self.negate;
        self
    }

    fn get(&self, key: &str) -> Result<f64> {
        let v = require(&self.params, key, self.kind.name())?;
        if !v.is_finite() {
            return Err(Error::BadParams(format!(
                "{}: {key} must be finite",
                self.kind
            )));
        }
        Ok(v)
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        let mut first = true;
        for (k, v) in &self.params {
            f.write_str(if first { ":" } else { "," })?;
            write!(f, "{k}={v}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for CatalogEntry {
    type Err = Error;
    /// `name:key=value,...`, e.g. `ellipsoid:a=2,b=1`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = parse_tagged(s)?;
        let kind: CatalogKind = name.parse()?;
        check_keys(&params, kind.param_names(), kind.name())?;
        Ok(Self {
            kind,
            params,
            negate: false,
        })
    }
}

fn positive(entry: &CatalogEntry, key: &str) -> Result<f64> {
    let v = entry.get(key)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::BadParams(format!(
            "{}: {key} > 0 required, got {v}",
            entry.kind
        )))
    }
}

fn open(lo: f64, hi: f64, what: &CatalogEntry) -> Result<Interval> {
    Interval::open(lo, hi).map_err(|_| Error::EmptyDomain(format!("{what}: no x > 0 with K^2 < 1")))
}

/// First interval between consecutive break points on which `|K| < 1`.
/// `breaks` are the positive roots of `K = +-1`; the kind of an interior
/// break is always `Turning`.
fn first_component(
    mut breaks: Vec<f64>,
    eval: &dyn Fn(f64) -> f64,
    entry: &CatalogEntry,
) -> Result<(Interval, Boundary, Boundary)> {
    breaks.retain(|b| *b > 0.0 && b.is_finite());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut pts = vec![0.0];
    pts.extend(breaks);
    pts.push(f64::INFINITY);
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = if hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            lo + lo.max(1.0)
        };
        let k = eval(mid);
        if k.is_finite() && k * k < 1.0 {
            let lk = if lo == 0.0 {
                Boundary::Axis
            } else {
                Boundary::Turning
            };
            let hk = if hi.is_finite() {
                Boundary::Turning
            } else {
                Boundary::Unbounded
            };
            return Ok((open(lo, hi, entry)?, lk, hk));
        }
    }
    Err(Error::EmptyDomain(format!(
        "{entry}: no x > 0 with K^2 < 1"
    )))
}

/// Positive real roots of `a x^2 + b x + c = 0`.
fn positive_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    // stable form of the quadratic formula
    let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sgn * disc.sqrt());
    let mut r = vec![];
    if q != 0.0 {
        r.push(q / a);
        r.push(c / q);
    } else {
        r.push(0.0);
    }
    r.into_iter().filter(|&x| x > 0.0).collect()
}

type Built = (
    Box<dyn Fn(f64) -> f64 + Send + Sync>,
    Box<dyn Fn(f64) -> f64 + Send + Sync>,
    Interval,
    Boundary,
    Boundary,
);

fn build(entry: &CatalogEntry) -> Result<Built> {
    use Boundary::*;
    use CatalogKind::*;
    let inf = f64::INFINITY;
    Ok(match entry.kind {
        HorizontalPlane => (
            Box::new(|_| 0.0),
            Box::new(|_| 0.0),
            open(0.0, inf, entry)?,
            Axis,
            Unbounded,
        ),
        Cone => {
            let t0 = entry.get("theta0")?;
            if !(t0.abs() < FRAC_PI_2) {
                return Err(Error::BadParams(format!(
                    "cone: |theta0| < pi/2 required, got {t0}"
                )));
            }
            let s = t0.sin();
            (
                Box::new(move |_| s),
                Box::new(|_| 0.0),
                open(0.0, inf, entry)?,
                Axis,
                Unbounded,
            )
        }
        Sphere => {
            let r = positive(entry, "R")?;
            (
                Box::new(move |x| x / r),
                Box::new(move |_| 1.0 / r),
                open(0.0, r, entry)?,
                Axis,
                Turning,
            )
        }
        Torus => {
            let r = positive(entry, "R")?;
            let a = entry.get("a")?;
            if a == 0.0 {
                return Err(Error::BadParams("torus: a != 0 required".into()));
            }
            if a + r <= 0.0 {
                return Err(Error::EmptyDomain(format!(
                    "{entry}: a + R <= 0 leaves no x > 0"
                )));
            }
            let lo = (a - r).max(0.0);
            let lk = if lo == 0.0 { Axis } else { Turning };
            (
                Box::new(move |x| (x - a) / r),
                Box::new(move |_| 1.0 / r),
                open(lo, a + r, entry)?,
                lk,
                Turning,
            )
        }
        Catenoid => {
            let a = positive(entry, "a")?;
            (
                Box::new(move |x| a / x),
                Box::new(move |x| -a / (x * x)),
                open(a, inf, entry)?,
                Turning,
                Unbounded,
            )
        }
        Onducycloid => {
            let r = positive(entry, "R")?;
            let s = (2.0 * r).sqrt();
            (
                Box::new(move |x: f64| x.sqrt() / s),
                Box::new(move |x: f64| 0.5 / (s * x.sqrt())),
                open(0.0, 2.0 * r, entry)?,
                Axis,
                Turning,
            )
        }
        Pseudosphere => {
            let a = positive(entry, "a")?;
            (
                Box::new(move |x: f64| (1.0 - (x / a).powi(2)).sqrt()),
                Box::new(move |x: f64| -x / (a * a * (1.0 - (x / a).powi(2)).sqrt())),
                open(0.0, a, entry)?,
                Axis,
                Cutoff,
            )
        }
        Antiparaboloid => {
            let c = positive(entry, "c")?;
            (
                Box::new(move |x: f64| c / x.sqrt()),
                Box::new(move |x: f64| -0.5 * c / (x * x.sqrt())),
                open(c * c, inf, entry)?,
                Turning,
                Unbounded,
            )
        }
        Ellipsoid => {
            let a = positive(entry, "a")?;
            let b = positive(entry, "b")?;
            let (a2, a4) = (a * a, a.powi(4));
            let d = move |x: f64| a4 - (a2 - b * b) * x * x;
            (
                Box::new(move |x| b * x / d(x).sqrt()),
                Box::new(move |x| b * a4 / d(x).powf(1.5)),
                open(0.0, a, entry)?,
                Axis,
                Turning,
            )
        }
        OneSheetHyperboloid => {
            let a = positive(entry, "a")?;
            let b = positive(entry, "b")?;
            let (a2, a4) = (a * a, a.powi(4));
            let d = move |x: f64| (a2 + b * b) * x * x - a4;
            (
                Box::new(move |x| b * x / d(x).sqrt()),
                Box::new(move |x| -b * a4 / d(x).powf(1.5)),
                open(a, inf, entry)?,
                Turning,
                Unbounded,
            )
        }
        TwoSheetsHyperboloid => {
            let a = positive(entry, "a")?;
            let b = positive(entry, "b")?;
            let (a2, a4) = (a * a, a.powi(4));
            let d = move |x: f64| a4 + (a2 + b * b) * x * x;
            (
                Box::new(move |x| b * x / d(x).sqrt()),
                Box::new(move |x| b * a4 / d(x).powf(1.5)),
                open(0.0, inf, entry)?,
                Axis,
                Unbounded,
            )
        }
        Paraboloid => {
            let a = positive(entry, "a")?;
            let a2 = a * a;
            (
                Box::new(move |x: f64| x / (a2 + x * x).sqrt()),
                Box::new(move |x: f64| a2 / (a2 + x * x).powf(1.5)),
                open(0.0, inf, entry)?,
                Axis,
                Unbounded,
            )
        }
        Elasticoid => {
            let a = positive(entry, "a")?;
            let k = entry.get("k")?;
            if !(k > -1.0) {
                return Err(Error::BadParams(format!(
                    "elasticoid: k > -1 required, got {k}"
                )));
            }
            let hi = ((k + 1.0) / a).sqrt();
            let (lo, lk) = if k > 1.0 {
                (((k - 1.0) / a).sqrt(), Turning)
            } else {
                (0.0, Axis)
            };
            (
                Box::new(move |x| a * x * x - k),
                Box::new(move |x| 2.0 * a * x),
                open(lo, hi, entry)?,
                lk,
                Turning,
            )
        }
        DelaunayMomentum => {
            let h0 = entry.get("H0")?;
            let c = entry.get("c")?;
            let eval = move |x: f64| h0 * x + c / x;
            // K = +-1  <=>  H0 x^2 -+ x + c = 0
            let mut breaks = positive_roots(h0, -1.0, c);
            breaks.extend(positive_roots(h0, 1.0, c));
            let (iv, lk, hk) = first_component(breaks, &eval, entry)?;
            (
                Box::new(eval),
                Box::new(move |x| h0 - c / (x * x)),
                iv,
                lk,
                hk,
            )
        }
        DarbouxMomentum => {
            let k0 = entry.get("K0")?;
            let c = entry.get("c")?;
            if k0 == 0.0 {
                return Err(Error::BadParams("darboux: K0 != 0 required".into()));
            }
            let (iv, lk, hk) = if k0 > 0.0 {
                if c >= 1.0 {
                    return Err(Error::EmptyDomain(format!(
                        "{entry}: K^2 >= c >= 1 everywhere"
                    )));
                }
                let hi = ((1.0 - c) / k0).sqrt();
                let (lo, lk) = if c < 0.0 {
                    ((-c / k0).sqrt(), Cutoff)
                } else {
                    (0.0, Axis)
                };
                (open(lo, hi, entry)?, lk, Turning)
            } else {
                if c <= 0.0 {
                    return Err(Error::EmptyDomain(format!("{entry}: K0 < 0 needs c > 0")));
                }
                let hi = (c / -k0).sqrt();
                let (lo, lk) = if c > 1.0 {
                    (((c - 1.0) / -k0).sqrt(), Turning)
                } else {
                    (0.0, Axis)
                };
                (open(lo, hi, entry)?, lk, Cutoff)
            };
            (
                Box::new(move |x: f64| (k0 * x * x + c).sqrt()),
                Box::new(move |x: f64| k0 * x / (k0 * x * x + c).sqrt()),
                iv,
                lk,
                hk,
            )
        }
    })
}

impl CatalogEntry {
    /// A representative member of each family, used for sampling and demos.
    pub fn example(kind: CatalogKind) -> CatalogEntry {
        use CatalogKind::*;
        let p: &[(&str, f64)] = match kind {
            HorizontalPlane => &[],
            Cone => &[("theta0", 0.4)],
            Sphere => &[("R", 1.5)],
            Torus => &[("a", 2.0), ("R", 1.0)],
            Catenoid => &[("a", 1.0)],
            Onducycloid => &[("R", 1.0)],
            Pseudosphere => &[("a", 1.0)],
            Antiparaboloid => &[("c", 1.0)],
            Ellipsoid => &[("a", 2.0), ("b", 1.0)],
            OneSheetHyperboloid => &[("a", 1.0), ("b", 1.0)],
            TwoSheetsHyperboloid => &[("a", 1.0), ("b", 2.0)],
            Paraboloid => &[("a", 1.0)],
            Elasticoid => &[("a", 1.0), ("k", 0.5)],
            DelaunayMomentum => &[("H0", 0.5), ("c", 0.1)],
            DarbouxMomentum => &[("K0", -1.0), ("c", 0.75)],
        };
        CatalogEntry::new(kind, p)
    }
}

/// Closed-form momentum of a catalog surface with its analytic derivative
/// and maximal open domain.
pub fn catalog(entry: &CatalogEntry) -> Result<MomentumFn> {
    check_keys(&entry.params, entry.kind.param_names(), entry.kind.name())?;
    let (eval, deriv, domain, lk, hk) = build(entry)?;
    let m = MomentumFn::new(eval, deriv, domain, (lk, hk), entry.to_string())?
        .with_params(entry.params.clone());
    Ok(if entry.negate { m.negated() } else { m })
}

//! Momenta with prescribed mean or Gauss curvature as functions of the
//! distance to the axis, and the classical special cases: minimal surfaces,
//! constant mean curvature roulettes and constant Gauss curvature profiles.

mod darboux;
mod delaunay;

pub use darboux::{cross_validate_darboux, darboux_profile, DarbouxFamily, DarbouxReport};
pub use delaunay::{catenary_residual, delaunay_residual, DelaunayParams};

use crate::error::{Error, Result};
use crate::momentum::{find_domain_near, Boundary, MomentumFn, RealFn};
use crate::numerics::{integrate_adaptive, Interval, Tolerance};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// A prescribed curvature `f(x)`.
#[derive(Clone)]
pub enum PrescribedFn {
    Const(f64),
    /// Coefficients in ascending order: `c0 + c1 x + c2 x^2 + ...`.
    Poly(Vec<f64>),
    Custom {
        f: RealFn,
        label: String,
    },
}

impl fmt::Debug for PrescribedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PrescribedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrescribedFn::Const(v) => write!(f, "const:{v}"),
            PrescribedFn::Poly(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            PrescribedFn::Custom { label, .. } => f.write_str(label),
        }
    }
}

impl FromStr for PrescribedFn {
    type Err = Error;
    /// `const:<v>` or `poly:<c0>,<c1>,...` (ascending powers).
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.trim().split_once(':').ok_or_else(|| {
            Error::Parse(format!("expected const:<v> or poly:<c0>,..., got '{s}'"))
        })?;
        let nums = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("'{t}' is not a number in '{s}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("non-finite coefficient in '{s}'")));
        }
        match name.trim().to_ascii_lowercase().as_str() {
            "const" if nums.len() == 1 => Ok(PrescribedFn::Const(nums[0])),
            "const" => Err(Error::Parse(format!("const takes one value, got '{rest}'"))),
            "poly" => Ok(PrescribedFn::Poly(nums)),
            other => Err(Error::Parse(format!("unknown function kind '{other}'"))),
        }
    }
}

impl PrescribedFn {
    pub fn custom(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Self {
        PrescribedFn::Custom {
            f: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PrescribedFn::Const(v) => *v,
            PrescribedFn::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
            PrescribedFn::Custom { f, .. } => f(x),
        }
    }

    /// `int_b^x t f(t) dt`, exact for constants and polynomials.
    pub fn moment_integral(&self, b: f64, x: f64) -> f64 {
        match self {
            PrescribedFn::Const(v) => 0.5 * v * (x - b) * (x + b),
            PrescribedFn::Poly(c) => c
                .iter()
                .enumerate()
                .map(|(k, &ck)| {
                    let p = k as i32 + 2;
                    ck * (x.powi(p) - b.powi(p)) / p as f64
                })
                .sum(),
            PrescribedFn::Custom { f, .. } => {
                integrate_adaptive(|t| t * f(t), b, x, &Tolerance::uniform(1e-13))
                    .unwrap_or(f64::NAN)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    MeanCurvature,
    GaussCurvature,
}

#[derive(Debug, Clone)]
pub struct PrescribedBuild {
    pub momentum: MomentumFn,
    /// The integration constant selecting a member of the family.
    pub constant: f64,
    pub source: Source,
    /// Lower limit of the moment integral.
    pub base_x: f64,
    /// End of the domain with `K = 0` while `K_G != 0`, where `k_m` blows up.
    pub breakdown: Option<f64>,
}

impl PrescribedBuild {
    /// `SignBreakdown` if the domain had to be truncated at a zero of `K`.
    pub fn check_regular(&self) -> Result<()> {
        match self.breakdown {
            Some(x) => Err(Error::SignBreakdown { x }),
            None => Ok(()),
        }
    }
}

fn half_line() -> Interval {
    Interval::open(0.0, f64::INFINITY).expect("valid interval")
}

fn check_base(base_x: f64, c: f64) -> Result<()> {
    if !(base_x >= 0.0 && base_x.is_finite()) || !c.is_finite() {
        return Err(Error::BadParams(format!(
            "need finite base_x >= 0 and c, got {base_x}, {c}"
        )));
    }
    Ok(())
}

/// `K(x) = (2 int_{base_x}^x t H(t) dt + c) / x` with `K' = 2H - K/x`.
///
/// The domain is the admissible component around `base_x` if `K` is
/// admissible there, otherwise the lowest one.
pub fn from_mean_curvature(h: &PrescribedFn, c: f64, base_x: f64) -> Result<PrescribedBuild> {
    check_base(base_x, c)?;
    let label = format!("H={h},c={c},base={base_x}");
    let (h1, h2) = (h.clone(), h.clone());
    let eval = move |x: f64| (2.0 * h1.moment_integral(base_x, x) + c) / x;
    let e2 = eval.clone();
    let (domain, lk, hk) = find_domain_near(
        &eval,
        &half_line(),
        &label,
        Some(base_x).filter(|&b| b > 0.0),
    )?;
    let deriv = move |x: f64| 2.0 * h2.eval(x) - e2(x) / x;
    let momentum = MomentumFn::new(eval, deriv, domain, (lk, hk), label)?;
    Ok(PrescribedBuild {
        momentum,
        constant: c,
        source: Source::MeanCurvature,
        base_x,
        breakdown: None,
    })
}

/// `K(x) = sign sqrt(2 int_{base_x}^x t K_G(t) dt + c)` with
/// `K' = x K_G / K`, on the admissible component where the radicand is
/// positive.
pub fn from_gauss_curvature(
    kg: &PrescribedFn,
    c: f64,
    base_x: f64,
    sign: i8,
) -> Result<PrescribedBuild> {
    check_base(base_x, c)?;
    let s = if sign < 0 { -1.0 } else { 1.0 };
    let label = format!(
        "KG={kg},c={c},base={base_x}{}",
        if s < 0.0 { ",negative" } else { "" }
    );
    let (k1, k2) = (kg.clone(), kg.clone());
    let eval = move |x: f64| {
        let rad = 2.0 * k1.moment_integral(base_x, x) + c;
        if rad >= 0.0 {
            s * rad.sqrt()
        } else {
            f64::NAN
        }
    };
    let e2 = eval.clone();
    let (domain, lk, hk) = find_domain_near(
        &eval,
        &half_line(),
        &label,
        Some(base_x).filter(|&b| b > 0.0),
    )?;
    let breakdown = [(domain.lo, lk), (domain.hi, hk)]
        .into_iter()
        .find(|&(x, kind)| {
            kind == Boundary::Cutoff
                && x > 0.0
                && x.is_finite()
                && e2(x).abs() <= 1e-6
                && kg.eval(x) != 0.0
        })
        .map(|(x, _)| x);
    let deriv = move |x: f64| x * k2.eval(x) / e2(x);
    let momentum = MomentumFn::new(eval, deriv, domain, (lk, hk), label)?;
    Ok(PrescribedBuild {
        momentum,
        constant: c,
        source: Source::GaussCurvature,
        base_x,
        breakdown,
    })
}

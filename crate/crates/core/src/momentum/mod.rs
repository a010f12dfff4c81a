//! The geometric linear momentum `K(x) = sin(theta)` of a generatrix, as a
//! function of the distance `x > 0` to the axis, with its derivative and
//! validity domain.

mod catalog;
mod domain;

pub use catalog::{catalog, CatalogEntry, CatalogKind};
pub(crate) use domain::find_domain_near;
pub use domain::{from_closed_form, from_expression};

use crate::error::{Error, Result};
use crate::numerics::Interval;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// What happens at an end of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `x -> 0`
    Axis,
    /// `K^2 -> 1`: the tangent becomes parallel to the axis
    Turning,
    /// the formula itself stops being defined (or a hint end was reached)
    Cutoff,
    /// `x -> infinity`
    Unbounded,
}

#[derive(Clone)]
pub struct MomentumFn {
    eval: RealFn,
    deriv: RealFn,
    pub domain: Interval,
    pub lo_kind: Boundary,
    pub hi_kind: Boundary,
    pub label: String,
    pub params: BTreeMap<String, f64>,
}

impl fmt::Debug for MomentumFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentumFn")
            .field("label", &self.label)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("lo_kind", &self.lo_kind)
            .field("hi_kind", &self.hi_kind)
            .finish()
    }
}

impl MomentumFn {
    /// Build from closures and an explicit domain. The domain is taken as
    /// given; use [`from_expression`] to have it computed.
    pub fn new(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: Interval,
        kinds: (Boundary, Boundary),
        label: impl Into<String>,
    ) -> Result<Self> {
        if domain.lo < 0.0 {
            return Err(Error::BadParams(format!(
                "momentum domain must lie in x >= 0, got lo = {}",
                domain.lo
            )));
        }
        Ok(Self {
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            domain,
            lo_kind: kinds.0,
            hi_kind: kinds.1,
            label: label.into(),
            params: BTreeMap::new(),
        })
    }

    pub fn with_params(mut self, params: BTreeMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        (self.deriv)(x)
    }

    pub fn eval_fn(&self) -> RealFn {
        self.eval.clone()
    }

    pub fn deriv_fn(&self) -> RealFn {
        self.deriv.clone()
    }

    /// The other orientation of the generatrix, `-K`.
    pub fn negated(&self) -> Self {
        let (e, d) = (self.eval.clone(), self.deriv.clone());
        Self {
            eval: Arc::new(move |x| -e(x)),
            deriv: Arc::new(move |x| -d(x)),
            label: format!("-{}", self.label),
            ..self.clone()
        }
    }

    pub fn in_domain(&self, x: f64) -> bool {
        self.domain.contains(x)
    }

    /// Bounded span used wherever the domain must be sampled: infinite upper
    /// ends are cut at `lo + 10 * max(1, lo)`.
    pub fn compact_span(&self) -> (f64, f64) {
        let lo = self.domain.lo;
        let hi = if self.domain.hi.is_finite() {
            self.domain.hi
        } else {
            lo + 10.0 * lo.max(1.0)
        };
        (lo, hi)
    }

    /// `n` equally spaced interior points of the compact span, excluding
    /// the ends.
    pub fn interior_samples(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.compact_span();
        (1..=n)
            .map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64)
            .collect()
    }
}

/// Homothety: `K_l(x) = K(x / l)`, domain scaled by `l`.
pub fn scale(m: &MomentumFn, lambda: f64) -> Result<MomentumFn> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::BadParams(format!(
            "scale factor must be positive, got {lambda}"
        )));
    }
    if lambda == 1.0 {
        return Ok(m.clone());
    }
    let (e, d) = (m.eval.clone(), m.deriv.clone());
    let mut params = m.params.clone();
    params.insert("scale".into(), lambda);
    Ok(MomentumFn {
        eval: Arc::new(move |x| e(x / lambda)),
        deriv: Arc::new(move |x| d(x / lambda) / lambda),
        domain: m.domain.scaled(lambda),
        lo_kind: m.lo_kind,
        hi_kind: m.hi_kind,
        label: format!("{}*{lambda}", m.label),
        params,
    })
}

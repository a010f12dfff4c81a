//! Numerical kernel: adaptive quadrature, adaptive explicit IVP integration,
//! bracketed root finding, the incomplete elliptic integral of the second
//! kind and central finite differences.
//!
//! Everything here is a pure function of its inputs.

mod elliptic;
mod ivp;
mod quad;
mod root;

pub use elliptic::elliptic_e_inc;
pub use ivp::{solve_ivp, Event, EventHit, IvpOptions, IvpSolution, StopReason, Trajectory};
pub use quad::integrate_adaptive;
pub use root::find_root;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("{routine} did not converge within {steps} steps")]
    NonConvergence { routine: &'static str, steps: usize },
    #[error("non-finite value encountered at x = {at}")]
    NonFinite { at: f64 },
    #[error("event {index} fired repeatedly near s = {s}")]
    EventStall { index: usize, s: f64 },
    #[error("root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("invalid interval ({lo}, {hi})")]
    BadInterval { lo: f64, hi: f64 },
    #[error("invalid tolerance: {0}")]
    BadTolerance(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// A real interval whose ends may be open or closed.
///
/// Infinite ends are always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(NumericsError::BadInterval { lo, hi });
        }
        if (lo.is_infinite() && !lo_open) || (hi.is_infinite() && !hi_open) {
            return Err(NumericsError::BadInterval { lo, hi });
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(NumericsError::BadInterval { lo, hi });
        }
        Ok(Self {
            lo,
            hi,
            lo_open,
            hi_open,
        })
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open {
            x > self.lo
        } else {
            x >= self.lo
        };
        let below = if self.hi_open {
            x < self.hi
        } else {
            x <= self.hi
        };
        above && below
    }

    /// Membership in the closure, with a relative slack for rounding.
    pub fn contains_closure(&self, x: f64, slack: f64) -> bool {
        let pad_lo = slack * self.lo.abs().max(1.0);
        let pad_hi = slack * self.hi.abs().max(1.0);
        x >= self.lo - pad_lo && x <= self.hi + pad_hi
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            lo: self.lo * lambda,
            hi: self.hi * lambda,
            ..*self
        }
    }
}

/// Absolute/relative accuracy request plus a step budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-10,
            max_steps: 1_000_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_steps: usize) -> Result<Self> {
        let floor = 4.0 * f64::EPSILON;
        if !(abs >= floor) || !(rel >= floor) {
            return Err(NumericsError::BadTolerance(format!(
                "abs = {abs}, rel = {rel} must both be >= {floor:e}"
            )));
        }
        if max_steps == 0 {
            return Err(NumericsError::BadTolerance(
                "max_steps must be positive".into(),
            ));
        }
        Ok(Self {
            abs,
            rel,
            max_steps,
        })
    }

    pub fn uniform(eps: f64) -> Self {
        Self::new(eps, eps, 1_000_000).expect("tolerance above machine epsilon")
    }
}

/// Central difference with step `cbrt(eps) * max(1, |x|)`.
pub fn fd_derivative<F: Fn(f64) -> f64>(f: F, x: f64) -> Result<f64> {
    let h0 = f64::EPSILON.cbrt() * x.abs().max(1.0);
    // make x +/- h exactly representable so the divisor is the true spacing
    let xp = x + h0;
    let xm = x - h0;
    let d = (f(xp) - f(xm)) / (xp - xm);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(NumericsError::NonFinite { at: x })
    }
}

/// Next representable double towards `target`.
pub(crate) fn step_toward(x: f64, target: f64) -> f64 {
    if x == target || x.is_nan() {
        return x;
    }
    if target > x {
        x.next_up()
    } else {
        x.next_down()
    }
}

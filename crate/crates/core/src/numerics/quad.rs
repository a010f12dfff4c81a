//! Globally adaptive Gauss-Kronrod (7, 15) quadrature.
//!
//! The interval is split at its midpoint and each half is mapped through
//! `x = a + u^2` (left) or `x = b - u^2` (right). Under that change of
//! variable an endpoint behaviour like `(x - a)^(-1/2)` becomes smooth, which
//! is exactly the blow-up of `1 / sqrt(1 - K^2)` at a turning point.

use super::{step_toward, NumericsError, Result, Tolerance};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Non-improving bisections after which a tiny segment counts as
/// roundoff-limited.
const STALL_GENERATIONS: u8 = 4;

/// Hard cap on bisections regardless of `tol.max_steps`.
const MAX_SUBDIVISIONS: usize = 20_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Left,
    Right,
}

struct Segment {
    side: Side,
    u0: f64,
    u1: f64,
    value: f64,
    error: f64,
    // error estimate is the roundoff floor; bisecting cannot reduce it
    at_floor: bool,
    // consecutive bisections of this lineage that did not reduce the error
    stalls: u8,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Mapped<'f, F> {
    f: &'f F,
    a: f64,
    b: f64,
}

impl<F: Fn(f64) -> f64> Mapped<'_, F> {
    fn eval(&self, side: Side, u: f64) -> Result<f64> {
        let (x, anchor, inward) = match side {
            Side::Left => (self.a + u * u, self.a, self.b),
            Side::Right => (self.b - u * u, self.b, self.a),
        };
        // keep off the endpoint itself, where f may be singular
        let mut x = if x == anchor {
            step_toward(x, inward)
        } else {
            x
        };
        let mut fx = (self.f)(x);
        // within a few ulps of a singular endpoint f may round to infinity;
        // back off geometrically, staying far below any quadrature node spacing
        let near = 1e-10 * anchor.abs().max(1.0);
        while !fx.is_finite() && (x - anchor).abs() < near {
            x = anchor + 2.0 * (x - anchor);
            fx = (self.f)(x);
        }
        // Jacobian from the offset actually represented: for u^2 below the
        // resolution of x this keeps 2 sqrt(x - a) f(x) exact when f has an
        // inverse-square-root singularity at a
        let g = 2.0 * (x - anchor).abs().sqrt() * fx;
        if g.is_finite() {
            Ok(g)
        } else {
            Err(NumericsError::NonFinite { at: x })
        }
    }

    fn kronrod(&self, side: Side, u0: f64, u1: f64) -> Result<(f64, f64, bool)> {
        let center = 0.5 * (u0 + u1);
        let half = 0.5 * (u1 - u0);
        let fc = self.eval(side, center)?;
        let mut res_k = fc * WGK[7];
        let mut res_g = fc * WG[3];
        let mut res_abs = res_k.abs();
        let mut fv1 = [0.0; 7];
        let mut fv2 = [0.0; 7];
        for j in 0..7 {
            let dx = half * XGK[j];
            let f1 = self.eval(side, center - dx)?;
            let f2 = self.eval(side, center + dx)?;
            fv1[j] = f1;
            fv2[j] = f2;
            res_k += WGK[j] * (f1 + f2);
            res_abs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                res_g += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = res_k * 0.5;
        let mut res_asc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
        }
        let value = res_k * half;
        let res_abs = res_abs * half.abs();
        let res_asc = res_asc * half.abs();
        let mut err = ((res_k - res_g) * half).abs();
        if res_asc != 0.0 && err != 0.0 {
            err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
        }
        let mut at_floor = false;
        if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            let floor = 50.0 * f64::EPSILON * res_abs;
            if floor >= err {
                err = floor;
                at_floor = true;
            }
        }
        Ok((value, err, at_floor))
    }
}

/// Integrate `f` over `[a, b]`.
///
/// Returns `I` with `|I - integral| <= max(tol.abs, tol.rel * |I|)` (as
/// estimated by the Kronrod/Gauss difference). Integrable endpoint
/// singularities of inverse-square-root type are removed by the
/// half-interval substitution described above. `a > b` integrates the
/// reversed interval and negates. At most `min(tol.max_steps, 20000)`
/// bisections are made.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::DomainError(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_adaptive(f, b, a, tol).map(|v| -v);
    }
    let mapped = Mapped { f: &f, a, b };
    let m = 0.5 * (a + b);
    let left_len = (m - a).sqrt();
    let right_len = (b - m).sqrt();

    let mut heap = BinaryHeap::new();
    // segments whose error is limited by rounding; summed but never refined
    let mut frozen: Vec<Segment> = Vec::new();
    for (side, len) in [(Side::Left, left_len), (Side::Right, right_len)] {
        let (value, error, at_floor) = mapped.kronrod(side, 0.0, len)?;
        heap.push(Segment {
            side,
            u0: 0.0,
            u1: len,
            value,
            error,
            at_floor,
            stalls: 0,
        });
    }
    // offsets from an end below which f is typically evaluated with heavy
    // cancellation (e.g. 1 - K^2 near a turning point)
    let near_end = 1e-6 * a.abs().max(b.abs());
    let mut total: f64 = heap.iter().map(|s| s.value).sum();
    let mut active_err: f64 = heap.iter().map(|s| s.error).sum();

    let budget = tol.max_steps.min(MAX_SUBDIVISIONS);
    let mut steps = 0usize;
    while active_err > tol.abs.max(tol.rel * total.abs()) {
        let Some(worst) = heap.pop() else { break };
        if worst.at_floor || worst.stalls >= STALL_GENERATIONS {
            active_err -= worst.error;
            frozen.push(worst);
            continue;
        }
        if steps >= budget {
            return Err(NumericsError::NonConvergence {
                routine: "integrate_adaptive",
                steps,
            });
        }
        let mid = 0.5 * (worst.u0 + worst.u1);
        if mid <= worst.u0 || mid >= worst.u1 {
            // cannot bisect further in double precision
            return Err(NumericsError::NonConvergence {
                routine: "integrate_adaptive",
                steps,
            });
        }
        let (v1, e1, f1) = mapped.kronrod(worst.side, worst.u0, mid)?;
        let (v2, e2, f2) = mapped.kronrod(worst.side, mid, worst.u1)?;
        // noise-dominated integrand near a singular end: tiny segments whose
        // error does not shrink under bisection
        let stalled = worst.u1 * worst.u1 <= near_end && e1 + e2 > 0.5 * worst.error;
        let stalls = if stalled { worst.stalls + 1 } else { 0 };
        total += v1 + v2 - worst.value;
        active_err += e1 + e2 - worst.error;
        for (u0, u1, value, error, at_floor) in
            [(worst.u0, mid, v1, e1, f1), (mid, worst.u1, v2, e2, f2)]
        {
            heap.push(Segment {
                side: worst.side,
                u0,
                u1,
                value,
                error,
                at_floor,
                stalls,
            });
        }
        steps += 1;
        // periodically resum to keep cancellation from drifting
        if steps.is_multiple_of(64) {
            total = heap.iter().chain(&frozen).map(|s| s.value).sum();
            active_err = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(heap.iter().chain(&frozen).map(|s| s.value).sum())
}

use super::OdeField;
use crate::error::{Error, Result};
use crate::momentum::{Boundary, MomentumFn};
use crate::numerics::{solve_ivp, Event, Interval, IvpOptions, StopReason, Tolerance, Trajectory};
use std::sync::Arc;

/// Nodes of one half-integration, ordered away from `x0`, with the kind of
/// the far end.
fn half(
    f: &OdeField,
    x0: f64,
    k0: f64,
    x_end: f64,
    tol: &Tolerance,
) -> Result<(Vec<(f64, f64, f64)>, Boundary)> {
    if x_end == x0 {
        return Ok((vec![(x0, k0, f(x0, k0))], Boundary::Cutoff));
    }
    let field = |x: f64, y: &[f64], dy: &mut [f64]| dy[0] = f(x, y[0]);
    let events = [Event::new(|_, y: &[f64]| 1.0 - y[0] * y[0], true)];
    let opts = IvpOptions {
        h_max: (x_end - x0).abs() / 64.0,
        h_init: None,
    };
    let sol = solve_ivp(field, x0, &[k0], x_end, tol, &events, &opts)?;
    let kind = match sol.stop {
        StopReason::TerminalEvent { .. } => Boundary::Turning,
        StopReason::Reached if x_end == 0.0 => Boundary::Axis,
        _ => Boundary::Cutoff,
    };
    let tr = &sol.trajectory;
    let nodes = (0..tr.len())
        .map(|i| (tr.s_values()[i], tr.state(i)[0], tr.deriv(i)[0]))
        .collect();
    Ok((nodes, kind))
}

const MAX_REFINE: usize = 40;

/// Bisect node intervals until the cubic Hermite interpolant agrees at
/// each midpoint with a fresh integration from the left node.
fn refine(
    f: &OdeField,
    nodes: Vec<(f64, f64, f64)>,
    tol: &Tolerance,
) -> Result<Vec<(f64, f64, f64)>> {
    let field = |x: f64, y: &[f64], dy: &mut [f64]| dy[0] = f(x, y[0]);
    let mut out = vec![nodes[0]];
    // stack of pending right ends, processed left to right
    let mut pending: Vec<((f64, f64, f64), usize)> =
        nodes[1..].iter().rev().map(|&n| (n, 0)).collect();
    while let Some((right, depth)) = pending.pop() {
        let left = *out.last().expect("nonempty");
        let mid = 0.5 * (left.0 + right.0);
        let mut pair = Trajectory::new(1);
        pair.push(left.0, &[left.1], &[left.2]);
        pair.push(right.0, &[right.1], &[right.2]);
        let interp = pair.eval(mid).map_or(f64::NAN, |v| v[0]);
        let exact = solve_ivp(
            field,
            left.0,
            &[left.1],
            mid,
            tol,
            &[],
            &IvpOptions::default(),
        )?;
        let ok = exact.stop == StopReason::Reached;
        let k_mid = exact.trajectory.state(exact.trajectory.len() - 1)[0];
        let scale = tol.abs + tol.rel * k_mid.abs();
        if !ok || depth >= MAX_REFINE || (interp - k_mid).abs() <= 10.0 * scale {
            out.push(right);
        } else {
            pending.push((right, depth + 1));
            pending.push(((mid, k_mid, f(mid, k_mid)), depth + 1));
        }
    }
    Ok(out)
}

/// Numerical solution of `K' = F(x, K)` through `(x0, K0)`, integrated in
/// both directions across `x_span` and stopped where `K^2` reaches 1 or
/// `F` stops being finite.
///
/// The result interpolates the integrator's nodes with cubic Hermite
/// polynomials; its derivative is `F(x, K(x))` on the interpolant.
pub fn solve_generic(
    f: OdeField,
    x0: f64,
    k0: f64,
    x_span: Interval,
    tol: &Tolerance,
) -> Result<MomentumFn> {
    if !x_span.is_bounded() || x_span.lo < 0.0 {
        return Err(Error::BadParams(format!(
            "x span must be bounded and in x >= 0, got ({}, {})",
            x_span.lo, x_span.hi
        )));
    }
    if !x_span.contains_closure(x0, 0.0) || x0 <= 0.0 {
        return Err(Error::OutOfDomain {
            x: x0,
            lo: x_span.lo,
            hi: x_span.hi,
        });
    }
    if !(k0 * k0 < 1.0) || !f(x0, k0).is_finite() {
        return Err(Error::ImmediateExit { x: x0 });
    }
    let (back, lk) = half(&f, x0, k0, x_span.lo, tol)?;
    let (fwd, hk) = half(&f, x0, k0, x_span.hi, tol)?;

    let nodes: Vec<_> = back
        .iter()
        .rev()
        .chain(fwd.iter().skip(1))
        .copied()
        .collect();
    let nodes = refine(&f, nodes, tol)?;
    let mut traj = Trajectory::new(1);
    for &(x, k, d) in &nodes {
        traj.push(x, &[k], &[d]);
    }
    let (lo, hi) = (traj.first_s(), traj.last_s());
    let domain = Interval::open(lo, hi).map_err(|_| Error::ImmediateExit { x: x0 })?;

    let traj = Arc::new(traj);
    let t2 = traj.clone();
    let eval = move |x: f64| traj.eval(x).map_or(f64::NAN, |v| v[0]);
    let f2 = f.clone();
    let deriv = move |x: f64| t2.eval(x).map_or(f64::NAN, |v| f2(x, v[0]));
    MomentumFn::new(
        eval,
        deriv,
        domain,
        (lk, hk),
        format!("generic(x0={x0},K0={k0})"),
    )
}

//! Dormand-Prince 5(4) integrator with cubic Hermite dense output and
//! zero-crossing events.

use super::{find_root, Interval, NumericsError, Result, Tolerance};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
const STALL_LIMIT: usize = 4;

/// Scalar event function `g(s, y)`; a sign change of `g` between accepted
/// steps is located and reported. Terminal events end the integration.
pub struct Event<'a> {
    pub g: Box<dyn Fn(f64, &[f64]) -> f64 + 'a>,
    pub terminal: bool,
}

impl<'a> Event<'a> {
    pub fn new(g: impl Fn(f64, &[f64]) -> f64 + 'a, terminal: bool) -> Self {
        Self {
            g: Box::new(g),
            terminal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvpOptions {
    /// Upper bound on |step|.
    pub h_max: f64,
    pub h_init: Option<f64>,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self {
            h_max: f64::INFINITY,
            h_init: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventHit {
    pub index: usize,
    pub s: f64,
    pub state: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    Reached,
    TerminalEvent {
        index: usize,
    },
    /// The field became non-finite (or the step collapsed) near `s`.
    Singular {
        s: f64,
    },
}

/// Accepted steps with states and derivatives, interpolated by cubic
/// Hermite polynomials between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    s: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl Trajectory {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            s: Vec::new(),
            y: Vec::new(),
            dy: Vec::new(),
        }
    }

    pub fn push(&mut self, s: f64, y: &[f64], dy: &[f64]) {
        debug_assert_eq!(y.len(), self.dim);
        self.s.push(s);
        self.y.extend_from_slice(y);
        self.dy.extend_from_slice(dy);
    }

    fn pop(&mut self) {
        self.s.pop();
        self.y.truncate(self.s.len() * self.dim);
        self.dy.truncate(self.s.len() * self.dim);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn s_values(&self) -> &[f64] {
        &self.s
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.y[i * self.dim..(i + 1) * self.dim]
    }

    pub fn deriv(&self, i: usize) -> &[f64] {
        &self.dy[i * self.dim..(i + 1) * self.dim]
    }

    pub fn first_s(&self) -> f64 {
        self.s[0]
    }

    pub fn last_s(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    /// Index `k` with `s` between nodes `k` and `k + 1`.
    fn locate(&self, s: f64) -> Option<usize> {
        let n = self.s.len();
        if n == 0 {
            return None;
        }
        let increasing = n < 2 || self.s[n - 1] >= self.s[0];
        let (lo, hi) = if increasing {
            (self.s[0], self.s[n - 1])
        } else {
            (self.s[n - 1], self.s[0])
        };
        if !(s >= lo && s <= hi) {
            return None;
        }
        if n == 1 {
            return Some(0);
        }
        let pos = if increasing {
            self.s.partition_point(|&v| v <= s)
        } else {
            self.s.partition_point(|&v| v >= s)
        };
        Some(pos.clamp(1, n - 1) - 1)
    }

    /// Dense output at `s`; `None` outside the integrated range. Nodes are
    /// returned exactly.
    pub fn eval(&self, s: f64) -> Option<Vec<f64>> {
        let k = self.locate(s)?;
        if self.s[k] == s || self.len() == 1 {
            return Some(self.state(k).to_vec());
        }
        if self.s[k + 1] == s {
            return Some(self.state(k + 1).to_vec());
        }
        let mut out = vec![0.0; self.dim];
        hermite(
            self.s[k],
            self.state(k),
            self.deriv(k),
            self.s[k + 1],
            self.state(k + 1),
            self.deriv(k + 1),
            s,
            &mut out,
        );
        Some(out)
    }

    /// Derivative of the dense output at `s`.
    pub fn eval_deriv(&self, s: f64) -> Option<Vec<f64>> {
        let k = self.locate(s)?;
        if self.len() == 1 {
            return Some(self.deriv(0).to_vec());
        }
        let mut out = vec![0.0; self.dim];
        hermite_deriv(
            self.s[k],
            self.state(k),
            self.deriv(k),
            self.s[k + 1],
            self.state(k + 1),
            self.deriv(k + 1),
            s,
            &mut out,
        );
        Some(out)
    }
}

#[allow(clippy::too_many_arguments)]
fn hermite(
    s0: f64,
    y0: &[f64],
    d0: &[f64],
    s1: f64,
    y1: &[f64],
    d1: &[f64],
    s: f64,
    out: &mut [f64],
) {
    let h = s1 - s0;
    let t = (s - s0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    for i in 0..out.len() {
        out[i] = h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i];
    }
}

#[allow(clippy::too_many_arguments)]
fn hermite_deriv(
    s0: f64,
    y0: &[f64],
    d0: &[f64],
    s1: f64,
    y1: &[f64],
    d1: &[f64],
    s: f64,
    out: &mut [f64],
) {
    let h = s1 - s0;
    let t = (s - s0) / h;
    let t2 = t * t;
    let g00 = (6.0 * t2 - 6.0 * t) / h;
    let g10 = 3.0 * t2 - 4.0 * t + 1.0;
    let g01 = (-6.0 * t2 + 6.0 * t) / h;
    let g11 = 3.0 * t2 - 2.0 * t;
    for i in 0..out.len() {
        out[i] = g00 * y0[i] + g10 * d0[i] + g01 * y1[i] + g11 * d1[i];
    }
}

#[derive(Debug, Clone)]
pub struct IvpSolution {
    pub trajectory: Trajectory,
    pub events: Vec<EventHit>,
    pub stop: StopReason,
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], tol: &Tolerance) -> f64 {
    let n = y.len() as f64;
    let sum: f64 = (0..y.len())
        .map(|i| {
            let sc = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Integrate `y' = field(s, y)` from `(s0, y0)` to `s_end` (either direction).
///
/// `field(s, y, dy)` writes the derivative into `dy`. Steps are accepted
/// when the embedded error estimate is within `tol`; at most
/// `tol.max_steps` steps are attempted. The returned trajectory starts at
/// `s0` and ends at `s_end` unless a terminal event or a singular field
/// stopped it first (see [`StopReason`]).
pub fn solve_ivp<F>(
    field: F,
    s0: f64,
    y0: &[f64],
    s_end: f64,
    tol: &Tolerance,
    events: &[Event<'_>],
    opts: &IvpOptions,
) -> Result<IvpSolution>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let mut traj = Trajectory::new(dim);
    let mut f0 = vec![0.0; dim];
    field(s0, y0, &mut f0);
    if !all_finite(y0) || !all_finite(&f0) {
        return Err(NumericsError::NonFinite { at: s0 });
    }
    traj.push(s0, y0, &f0);
    if s_end == s0 {
        return Ok(IvpSolution {
            trajectory: traj,
            events: Vec::new(),
            stop: StopReason::Reached,
        });
    }
    let dir = (s_end - s0).signum();
    let span = (s_end - s0).abs();
    let h_max = opts.h_max.min(span);

    let mut s = s0;
    let mut y = y0.to_vec();
    let mut f = f0;
    let mut h = match opts.h_init {
        Some(h) => h.abs(),
        None => initial_step(&field, s0, &y, &f, dir, tol),
    }
    .min(h_max);

    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(s, &y)).collect();
    let mut last_fire: Vec<Option<(f64, usize)>> = vec![None; events.len()];
    let mut hits = Vec::new();

    let mut k = vec![vec![0.0; dim]; 7];
    let mut y_new = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut rejected_last = false;

    for _attempt in 0..tol.max_steps {
        let h_min = 16.0 * f64::EPSILON * s.abs().max(span);
        let mut last = false;
        if h >= (s_end - s).abs() {
            h = (s_end - s).abs();
            last = true;
        }
        let hs = dir * h;
        let s_stage = if last { s_end } else { s + hs };
        let finite = dp_step(&field, s, &y, &f, hs, s_stage, &mut k, &mut y_new);
        if !finite {
            h *= 0.25;
            rejected_last = true;
            if h < h_min {
                return Ok(IvpSolution {
                    trajectory: traj,
                    events: hits,
                    stop: StopReason::Singular { s },
                });
            }
            continue;
        }
        for i in 0..dim {
            err[i] = hs
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
        }
        let en = error_norm(&y, &y_new, &err, tol);
        if en <= 1.0 {
            let s_new = if last { s_end } else { s + hs };
            let f_new = k[6].clone();
            traj.push(s_new, &y_new, &f_new);

            // events on (s, s_new]
            let mut fired: Vec<(usize, f64, Vec<f64>)> = Vec::new();
            let n = traj.len();
            for (idx, ev) in events.iter().enumerate() {
                let g_new = (ev.g)(s_new, &y_new);
                let gp = g_prev[idx];
                let crossed = gp != 0.0 && (g_new == 0.0 || g_new.signum() != gp.signum());
                if crossed {
                    let (sigma, state) = locate_event(&field, &traj, n - 2, ev, tol)?;
                    fired.push((idx, sigma, state));
                }
                g_prev[idx] = g_new;
            }
            fired.sort_by(|a, b| (dir * a.1).total_cmp(&(dir * b.1)));
            for (idx, sigma, state) in fired {
                match last_fire[idx] {
                    Some((ps, count)) if (sigma - ps).abs() <= tol.abs => {
                        if count + 1 >= STALL_LIMIT {
                            return Err(NumericsError::EventStall {
                                index: idx,
                                s: sigma,
                            });
                        }
                        last_fire[idx] = Some((sigma, count + 1));
                    }
                    _ => last_fire[idx] = Some((sigma, 0)),
                }
                hits.push(EventHit {
                    index: idx,
                    s: sigma,
                    state: state.clone(),
                });
                if events[idx].terminal {
                    // replace the step end by the event point
                    let mut d = vec![0.0; dim];
                    field(sigma, &state, &mut d);
                    if !all_finite(&d) {
                        d = traj.eval_deriv(sigma).expect("event inside last step");
                    }
                    traj.pop();
                    if traj.last_s() != sigma {
                        traj.push(sigma, &state, &d);
                    }
                    return Ok(IvpSolution {
                        trajectory: traj,
                        events: hits,
                        stop: StopReason::TerminalEvent { index: idx },
                    });
                }
            }

            if last {
                return Ok(IvpSolution {
                    trajectory: traj,
                    events: hits,
                    stop: StopReason::Reached,
                });
            }
            s = s_new;
            y.copy_from_slice(&y_new);
            f = f_new;
            let mut fac = if en == 0.0 {
                FAC_MAX
            } else {
                SAFETY * en.powf(-0.2)
            };
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if rejected_last {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(h_max);
            rejected_last = false;
        } else {
            let fac = (SAFETY * en.powf(-0.2)).clamp(FAC_MIN, 1.0);
            h *= fac;
            rejected_last = true;
            if h < h_min {
                return Ok(IvpSolution {
                    trajectory: traj,
                    events: hits,
                    stop: StopReason::Singular { s },
                });
            }
        }
    }
    Err(NumericsError::NonConvergence {
        routine: "solve_ivp",
        steps: tol.max_steps,
    })
}

/// One Dormand-Prince step of size `hs` from `(s, y)` with `f = field(s, y)`.
/// Fills the stages `k` (k[6] is the field at the new point) and `y_new`;
/// returns false if any stage was non-finite.
#[allow(clippy::too_many_arguments)]
fn dp_step<F>(
    field: &F,
    s: f64,
    y: &[f64],
    f: &[f64],
    hs: f64,
    s_new: f64,
    k: &mut [Vec<f64>],
    y_new: &mut [f64],
) -> bool
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y.len();
    let mut tmp = vec![0.0; dim];
    k[0].copy_from_slice(f);
    let stages: [(f64, &[f64]); 5] = [
        (C2, &[A21]),
        (C3, &[A31, A32]),
        (C4, &[A41, A42, A43]),
        (C5, &[A51, A52, A53, A54]),
        (1.0, &[A61, A62, A63, A64, A65]),
    ];
    for (stage, (c, a)) in stages.iter().enumerate() {
        for i in 0..dim {
            let mut acc = 0.0;
            for (j, aj) in a.iter().enumerate() {
                acc += aj * k[j][i];
            }
            tmp[i] = y[i] + hs * acc;
        }
        field(s + c * hs, &tmp, &mut k[stage + 1]);
        if !all_finite(&k[stage + 1]) {
            return false;
        }
    }
    for i in 0..dim {
        y_new[i] = y[i]
            + hs * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
    }
    field(s_new, y_new, &mut k[6]);
    all_finite(&k[6]) && all_finite(y_new)
}

/// Locate an event inside step `k -> k + 1`. The root is searched on exact
/// sub-steps from node `k`, which are as accurate as the step itself; the
/// Hermite interpolant is the fallback when a sub-step is non-finite.
fn locate_event<F>(
    field: &F,
    traj: &Trajectory,
    k: usize,
    ev: &Event<'_>,
    tol: &Tolerance,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let (sa, sb) = (traj.s_values()[k], traj.s_values()[k + 1]);
    let (lo, hi) = if sa < sb { (sa, sb) } else { (sb, sa) };
    if lo == hi {
        return Ok((hi, traj.state(k + 1).to_vec()));
    }
    let root_tol = Tolerance {
        abs: tol.abs.min(1e-12),
        rel: tol.rel,
        max_steps: 10_000,
    };
    let dim = traj.dim();
    let (y0, f0) = (traj.state(k), traj.deriv(k));
    let sub_step = |sig: f64| -> Option<Vec<f64>> {
        if sig == sa {
            return Some(y0.to_vec());
        }
        if sig == sb {
            return Some(traj.state(k + 1).to_vec());
        }
        let mut stages = vec![vec![0.0; dim]; 7];
        let mut y = vec![0.0; dim];
        dp_step(field, sa, y0, f0, sig - sa, sig, &mut stages, &mut y).then_some(y)
    };
    let exact = |sig: f64| sub_step(sig).map_or(f64::NAN, |y| (ev.g)(sig, &y));
    if let Ok(sigma) = find_root(exact, Interval::closed(lo, hi)?, &root_tol) {
        if let Some(state) = sub_step(sigma) {
            return Ok((sigma, state));
        }
    }
    let hermite = |sig: f64| {
        let y = traj.eval(sig).expect("inside step");
        (ev.g)(sig, &y)
    };
    let sigma = find_root(hermite, Interval::closed(lo, hi)?, &root_tol)?;
    let state = traj.eval(sigma).expect("inside step");
    Ok((sigma, state))
}

fn initial_step<F>(field: &F, s0: f64, y0: &[f64], f0: &[f64], dir: f64, tol: &Tolerance) -> f64
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let scale = |i: usize| tol.abs + tol.rel * y0[i].abs();
    let rms = |v: &dyn Fn(usize) -> f64| {
        ((0..dim).map(|i| v(i).powi(2)).sum::<f64>() / dim as f64).sqrt()
    };
    let d0 = rms(&|i| y0[i] / scale(i));
    let d1 = rms(&|i| f0[i] / scale(i));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1: Vec<f64> = (0..dim).map(|i| y0[i] + dir * h0 * f0[i]).collect();
    let mut f1 = vec![0.0; dim];
    field(s0 + dir * h0, &y1, &mut f1);
    if !all_finite(&f1) {
        return h0 * 1e-3;
    }
    let d2 = rms(&|i| (f1[i] - f0[i]) / scale(i)) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

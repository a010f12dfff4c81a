//! Revolution meshes `X(s, t) = (x(s) cos t, x(s) sin t, z(s))`, discrete
//! principal curvatures on them, and Wavefront OBJ output.

use crate::error::{Error, Result};
use crate::generatrix::GeneratrixCurve;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const MIN_THETA: usize = 8;

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn comb(c: [f64; 3], p: [V3; 3]) -> V3 {
    let mut out = [0.0; 3];
    for (ck, pk) in c.iter().zip(&p) {
        for d in 0..3 {
            out[d] += ck * pk[d];
        }
    }
    out
}

/// Structured grid, row `i` at arc sample `s[i]`, column `j` at
/// `theta_j = -pi + 2 pi j / n_theta`.
#[derive(Debug, Clone)]
pub struct RevolutionMesh {
    pub n_s: usize,
    pub n_theta: usize,
    /// Row-major, `points[i * n_theta + j]`.
    pub points: Vec<V3>,
    pub s: Vec<f64>,
    pub theta_closed: bool,
    pub source: GeneratrixCurve,
}

impl RevolutionMesh {
    pub fn point(&self, i: usize, j: usize) -> V3 {
        self.points[i * self.n_theta + j]
    }

    pub fn theta(&self, j: usize) -> f64 {
        -PI + 2.0 * PI * j as f64 / self.n_theta as f64
    }
}

/// Revolve the samples of `c` about the third axis.
pub fn revolve(c: &GeneratrixCurve, n_theta: usize) -> Result<RevolutionMesh> {
    if n_theta < MIN_THETA {
        return Err(Error::DegenerateGrid(format!(
            "need n_theta >= {MIN_THETA}, got {n_theta}"
        )));
    }
    if let Some((index, p)) = c.samples.iter().enumerate().find(|(_, p)| !(p.x > 0.0)) {
        return Err(Error::AxisTouch { index, x: p.x });
    }
    let trig: Vec<(f64, f64)> = (0..n_theta)
        .map(|j| (-PI + 2.0 * PI * j as f64 / n_theta as f64).sin_cos())
        .collect();
    let rows: Vec<Vec<V3>> = c
        .samples
        .par_iter()
        .map(|p| {
            trig.iter()
                .map(|&(sn, cs)| [p.x * cs, p.x * sn, p.z])
                .collect()
        })
        .collect();
    Ok(RevolutionMesh {
        n_s: c.samples.len(),
        n_theta,
        points: rows.concat(),
        s: c.samples.iter().map(|p| p.s).collect(),
        theta_closed: true,
        source: c.clone(),
    })
}

/// Per-vertex estimates, row-major like the mesh.
#[derive(Debug, Clone)]
pub struct MeshCurvature {
    pub n_s: usize,
    pub n_theta: usize,
    pub k_m: Vec<f64>,
    pub k_p: Vec<f64>,
    /// Rows estimated with one-sided differences.
    pub low_confidence: Vec<bool>,
}

impl MeshCurvature {
    pub fn at(&self, i: usize, j: usize) -> (f64, f64) {
        let k = i * self.n_theta + j;
        (self.k_m[k], self.k_p[k])
    }
}

/// Weights of the first and second derivative at `s[at]` from the three
/// nodes `s[i0..i0 + 3]`.
fn stencil(s: &[f64], i0: usize, at: usize) -> ([f64; 3], [f64; 3]) {
    let (a, b, c) = (s[i0], s[i0 + 1], s[i0 + 2]);
    let x = s[at];
    // derivatives of the Lagrange basis at x
    let d1 = [
        ((x - b) + (x - c)) / ((a - b) * (a - c)),
        ((x - a) + (x - c)) / ((b - a) * (b - c)),
        ((x - a) + (x - b)) / ((c - a) * (c - b)),
    ];
    let d2 = [
        2.0 / ((a - b) * (a - c)),
        2.0 / ((b - a) * (b - c)),
        2.0 / ((c - a) * (c - b)),
    ];
    (d1, d2)
}

/// Principal curvatures from `N = X_s x X_t / |X_s x X_t|`,
/// `k_m = X_ss . N / |X_s|^2` and `k_p = X_tt . N / |X_t|^2`, with
/// three-point differences (one-sided on the first and last rows).
pub fn mesh_principal_curvatures(mesh: &RevolutionMesh) -> Result<MeshCurvature> {
    let (ns, nt) = (mesh.n_s, mesh.n_theta);
    if ns < 5 || nt < MIN_THETA {
        return Err(Error::DegenerateGrid(format!(
            "need at least 5 x {MIN_THETA} vertices, got {ns} x {nt}"
        )));
    }
    if !mesh.theta_closed {
        return Err(Error::DegenerateGrid(
            "open theta grids are not supported".into(),
        ));
    }
    if mesh.s.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DegenerateGrid(
            "arc samples must be strictly increasing".into(),
        ));
    }
    let h = 2.0 * PI / nt as f64;
    let rows: Vec<Vec<(f64, f64)>> = (0..ns)
        .into_par_iter()
        .map(|i| {
            let i0 = i.clamp(1, ns - 2) - 1;
            let (d1, d2) = stencil(&mesh.s, i0, i);
            (0..nt)
                .map(|j| {
                    let col = |r: usize| mesh.point(r, j);
                    let p = [col(i0), col(i0 + 1), col(i0 + 2)];
                    let xs = comb(d1, p);
                    let xss = comb(d2, p);
                    let (jm, jp) = ((j + nt - 1) % nt, (j + 1) % nt);
                    let (pm, pc, pp) = (mesh.point(i, jm), mesh.point(i, j), mesh.point(i, jp));
                    let d = sub(pp, pm);
                    let xt = [d[0] / (2.0 * h), d[1] / (2.0 * h), d[2] / (2.0 * h)];
                    let xtt = comb([1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)], [pm, pc, pp]);
                    let n = cross(xs, xt);
                    let nn = dot(n, n).sqrt();
                    let n = [n[0] / nn, n[1] / nn, n[2] / nn];
                    (dot(xss, n) / dot(xs, xs), dot(xtt, n) / dot(xt, xt))
                })
                .collect()
        })
        .collect();
    let flat = rows.concat();
    Ok(MeshCurvature {
        n_s: ns,
        n_theta: nt,
        k_m: flat.iter().map(|p| p.0).collect(),
        k_p: flat.iter().map(|p| p.1).collect(),
        low_confidence: (0..ns).map(|i| i == 0 || i == ns - 1).collect(),
    })
}

/// Wavefront text: header comment, `v` lines in row-major order, then quad
/// faces (or two triangles per quad) with 1-based indices.
pub fn write_obj<W: Write>(mesh: &RevolutionMesh, mut w: W, triangulate: bool) -> Result<()> {
    let (ns, nt) = (mesh.n_s, mesh.n_theta);
    writeln!(
        w,
        "# surface of revolution {ns} x {nt}; the axis of revolution is the third coordinate"
    )?;
    for p in &mesh.points {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    let cols = if mesh.theta_closed { nt } else { nt - 1 };
    let idx = |i: usize, j: usize| i * nt + (j % nt) + 1;
    for i in 0..ns.saturating_sub(1) {
        for j in 0..cols {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            if triangulate {
                writeln!(w, "f {a} {b} {c}")?;
                writeln!(w, "f {a} {c} {d}")?;
            } else {
                writeln!(w, "f {a} {b} {c} {d}")?;
            }
        }
    }
    Ok(())
}

pub fn export_obj(mesh: &RevolutionMesh, path: impl AsRef<Path>, triangulate: bool) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_obj(mesh, &mut w, triangulate)?;
    w.flush()?;
    Ok(())
}

/// Vertex positions of an OBJ stream, in file order.
pub fn read_obj_vertices<R: BufRead>(r: R) -> Result<Vec<V3>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let mut it = line.split_whitespace();
        if it.next() != Some("v") {
            continue;
        }
        let mut v = [0.0; 3];
        for c in &mut v {
            *c = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad vertex on line {}", n + 1)))?;
        }
        out.push(v);
    }
    Ok(out)
}

pub fn read_obj_file(path: impl AsRef<Path>) -> Result<Vec<V3>> {
    read_obj_vertices(BufReader::new(File::open(path)?))
}

/// CSV `i,j,x,y,z,k_m_est,k_p_est`.
pub fn write_curvature_csv<W: Write>(
    mesh: &RevolutionMesh,
    k: &MeshCurvature,
    mut w: W,
) -> Result<()> {
    writeln!(w, "i,j,x,y,z,k_m_est,k_p_est")?;
    for i in 0..mesh.n_s {
        for j in 0..mesh.n_theta {
            let p = mesh.point(i, j);
            let (km, kp) = k.at(i, j);
            writeln!(
                w,
                "{i},{j},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p[0], p[1], p[2], km, kp
            )?;
        }
    }
    Ok(())
}

//! Command line front end.

mod verify;

pub use verify::{verify_surface, Check};

use crate::curvature::{self, wdiagram};
use crate::error::{Error, Result};
use crate::generatrix::{default_profile, GeneratrixCurve};
use crate::momentum::{catalog, CatalogEntry, CatalogKind, MomentumFn};
use crate::numerics::Tolerance;
use crate::prescribe::{from_gauss_curvature, from_mean_curvature, PrescribedFn};
use crate::surface::{export_obj, mesh_principal_curvatures, revolve, write_curvature_csv};
use crate::weingarten::{
    classify_cubic, solve_const_principal, solve_cubic, solve_hyperbola, solve_linear,
    solve_special_linear, sphere_branch, WRelation,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "rotweingarten",
    version,
    about = "Rotational surfaces from the momentum of their generatrix"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SurfaceArgs {
    /// Catalog entry, e.g. `ellipsoid:a=2,b=1`
    #[arg(long)]
    surface: String,
    /// Use the opposite orientation, `-K`
    #[arg(long)]
    negative: bool,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// Start abscissa (default: a turning end, else the middle)
    #[arg(long)]
    x0: Option<f64>,
    /// Arc length followed in each direction
    #[arg(long)]
    s_span: Option<f64>,
    /// Number of output samples
    #[arg(long, default_value_t = 400)]
    n: usize,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file (standard output if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a JSON report
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the catalog surfaces
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Generatrix samples `s,x,z,theta`
    #[command(allow_negative_numbers = true)]
    Reconstruct {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Curvature diagram `x,k_m,k_p,H,K_G`
    Wdiagram {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Solve a Weingarten relation such as `cubic:mu=1`
    #[command(allow_negative_numbers = true)]
    Solve {
        relation: String,
        /// Integration constant
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        /// Right-hand side of the implicit special linear solution
        #[arg(long, default_value_t = 0.0)]
        d: f64,
        /// Constant a > 0 of the hyperbola solutions
        #[arg(long, default_value_t = 1.0)]
        a_coef: f64,
        /// For the hyperbola, the constant solution instead of the elasticoid
        #[arg(long)]
        sphere_branch: bool,
        /// Opposite sign branch
        #[arg(long)]
        negative: bool,
        /// Emit generatrix samples instead of the curvature diagram
        #[arg(long)]
        reconstruct: bool,
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Momentum with prescribed mean or Gauss curvature
    #[command(allow_negative_numbers = true)]
    Prescribe {
        /// Mean curvature, `const:<v>` or `poly:<c0>,<c1>,...`
        #[arg(long = "H", conflicts_with = "kg", required_unless_present = "kg")]
        h: Option<String>,
        /// Gauss curvature, same syntax
        #[arg(long = "KG")]
        kg: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        /// Lower limit of the moment integral
        #[arg(long, default_value_t = 0.0)]
        base_x: f64,
        /// Negative square root branch (Gauss curvature only)
        #[arg(long)]
        negative: bool,
        #[arg(long)]
        reconstruct: bool,
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Wavefront OBJ mesh of the surface of revolution
    #[command(allow_negative_numbers = true)]
    Mesh {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, default_value_t = 200)]
        ns: usize,
        #[arg(long, default_value_t = 128)]
        ntheta: usize,
        #[arg(long)]
        triangulate: bool,
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long)]
        s_span: Option<f64>,
        /// Also write per-vertex curvature estimates to this CSV
        #[arg(long)]
        curvature_csv: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the oracle checks on a catalog surface
    Verify {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        json: bool,
    },
}

fn tol() -> Tolerance {
    Tolerance::uniform(1e-12)
}

fn surface_momentum(a: &SurfaceArgs) -> Result<MomentumFn> {
    let mut e: CatalogEntry = a.surface.parse()?;
    e.negate = a.negative;
    catalog(&e)
}

fn profile(m: &MomentumFn, p: &ProfileArgs) -> Result<GeneratrixCurve> {
    default_profile(m, p.x0, p.s_span, &tol())?.resample(p.n)
}

fn domain_json(m: &MomentumFn) -> Value {
    json!({
        "lo": m.domain.lo,
        "hi": if m.domain.hi.is_finite() { json!(m.domain.hi) } else { json!("inf") },
        "lo_kind": m.lo_kind,
        "hi_kind": m.hi_kind,
    })
}

#[derive(Debug, Serialize)]
struct Report {
    label: String,
    params: BTreeMap<String, f64>,
    domain: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
}

impl Report {
    fn new(m: &MomentumFn) -> Self {
        Self {
            label: m.label.clone(),
            params: m.params.clone(),
            domain: domain_json(m),
            classification: None,
            residuals: None,
            output: None,
        }
    }
}

/// Write `f`'s output to `path`, or to `out` when there is no path.
fn emit(
    path: Option<&Path>,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => f(out)?,
    }
    Ok(())
}

fn finish(report: Option<Report>, out: &mut dyn Write) -> Result<()> {
    if let Some(r) = report {
        serde_json::to_writer_pretty(&mut *out, &r).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(out)?;
    }
    Ok(())
}

/// Curve or diagram output shared by `solve` and `prescribe`.
fn momentum_output(
    m: &MomentumFn,
    reconstruct: bool,
    p: &ProfileArgs,
    o: &Output,
    out: &mut dyn Write,
) -> Result<()> {
    // with --json and no --out only the report is printed
    if o.json && o.out.is_none() {
        return Ok(());
    }
    if reconstruct {
        let c = profile(m, p)?;
        emit(o.out.as_deref(), out, |w| c.write_csv(w))
    } else {
        let d = wdiagram(m, p.n)?;
        emit(o.out.as_deref(), out, |w| curvature::write_csv(&d, w))
    }
}

fn max_residual(r: &WRelation, m: &MomentumFn) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in m.interior_samples(100) {
        worst = worst.max(r.residual(&curvature::curvatures(m, x)?)?.abs());
    }
    Ok(worst)
}

fn solve_relation(
    rel: &WRelation,
    c: f64,
    d: f64,
    a_coef: f64,
    sphere: bool,
    negative: bool,
) -> Result<(MomentumFn, Option<Value>)> {
    let flip = |m: MomentumFn| if negative { m.negated() } else { m };
    Ok(match *rel {
        WRelation::Linear { p, q } => (flip(solve_linear(p, q, c)?), None),
        WRelation::SpecialLinear { a, b, c: cc } => (
            solve_special_linear(a, b, cc, d, if negative { -1 } else { 1 })?,
            None,
        ),
        WRelation::Cubic { mu } => {
            let q = classify_cubic(mu, c)?;
            (
                flip(solve_cubic(mu, c)?),
                Some(serde_json::to_value(q).expect("serializable")),
            )
        }
        WRelation::Hyperbola { mu } if sphere => {
            let m = sphere_branch(mu)?;
            let cls = json!({"kind": "sphere", "R": 1.0 / mu.sqrt()});
            (flip(m), Some(cls))
        }
        WRelation::Hyperbola { mu } => {
            let m = solve_hyperbola(mu, a_coef)?;
            let cls = json!({"kind": "elasticoid", "a": a_coef, "k": -mu / (4.0 * a_coef)});
            (flip(m), Some(cls))
        }
        WRelation::ConstPrincipal { which, value } => {
            let s = solve_const_principal(which, value, c)?;
            let mut cls = json!({ "surface": s.momentum.label });
            if let Some(cyl) = s.cylinder {
                cls["cylinder_radius"] = json!(cyl.radius);
            }
            (flip(s.momentum), Some(cls))
        }
        WRelation::Generic { .. } => {
            return Err(Error::BadParams(
                "generic relations cannot be given on the command line".into(),
            ))
        }
    })
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Catalog { json } => {
            if json {
                let list: Vec<Value> = CatalogKind::ALL
                    .iter()
                    .map(|k| {
                        json!({
                            "name": k.name(),
                            "params": k.param_names(),
                            "formula": k.formula(),
                            "example": CatalogEntry::example(*k).to_string(),
                        })
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &list)
                    .map_err(|e| Error::Parse(e.to_string()))?;
                writeln!(out)?;
            } else {
                writeln!(out, "name,params,formula,example")?;
                for k in CatalogKind::ALL {
                    writeln!(
                        out,
                        "{},{},{},{}",
                        k.name(),
                        k.param_names().join(" "),
                        k.formula(),
                        CatalogEntry::example(k).to_string().replace(',', " ")
                    )?;
                }
            }
            Ok(())
        }
        Command::Reconstruct {
            surface,
            profile: p,
            output,
        } => {
            let m = surface_momentum(&surface)?;
            let c = profile(&m, &p)?;
            let mut report = output.json.then(|| Report::new(&m));
            if let Some(r) = report.as_mut() {
                let mut res = BTreeMap::new();
                res.insert("first_integral_drift".into(), c.first_integral_drift());
                res.insert("length".into(), c.length());
                r.residuals = Some(res);
                r.output = output.out.as_ref().map(|p| p.display().to_string());
            }
            if !(output.json && output.out.is_none()) {
                emit(output.out.as_deref(), out, |w| c.write_csv(w))?;
            }
            finish(report, out)
        }
        Command::Wdiagram { surface, n, output } => {
            let m = surface_momentum(&surface)?;
            let d = wdiagram(&m, n)?;
            if !(output.json && output.out.is_none()) {
                emit(output.out.as_deref(), out, |w| curvature::write_csv(&d, w))?;
            }
            let report = output.json.then(|| {
                let mut r = Report::new(&m);
                r.output = output.out.as_ref().map(|p| p.display().to_string());
                r
            });
            finish(report, out)
        }
        Command::Solve {
            relation,
            c,
            d,
            a_coef,
            sphere_branch,
            negative,
            reconstruct,
            profile: p,
            output,
        } => {
            let rel: WRelation = relation.parse()?;
            let (m, cls) = solve_relation(&rel, c, d, a_coef, sphere_branch, negative)?;
            momentum_output(&m, reconstruct, &p, &output, out)?;
            let report = if output.json {
                let mut r = Report::new(&m);
                r.classification = cls;
                let mut res = BTreeMap::new();
                // the relation is odd in K only for some families; report the solved branch as is
                if !negative {
                    res.insert("relation".into(), max_residual(&rel, &m)?);
                }
                r.residuals = Some(res);
                r.output = output.out.as_ref().map(|p| p.display().to_string());
                Some(r)
            } else {
                None
            };
            finish(report, out)
        }
        Command::Prescribe {
            h,
            kg,
            c,
            base_x,
            negative,
            reconstruct,
            profile: p,
            output,
        } => {
            let (b, f, mean) = match (h, kg) {
                (Some(h), None) => {
                    let f: PrescribedFn = h.parse()?;
                    (from_mean_curvature(&f, c, base_x)?, f, true)
                }
                (None, Some(k)) => {
                    let f: PrescribedFn = k.parse()?;
                    (
                        from_gauss_curvature(&f, c, base_x, if negative { -1 } else { 1 })?,
                        f,
                        false,
                    )
                }
                _ => return Err(Error::BadParams("give exactly one of --H and --KG".into())),
            };
            let m = &b.momentum;
            momentum_output(m, reconstruct, &p, &output, out)?;
            let report = if output.json {
                let mut r = Report::new(m);
                r.params.insert("c".into(), c);
                r.params.insert("base_x".into(), base_x);
                let mut worst: f64 = 0.0;
                for x in m.interior_samples(100) {
                    let rec = curvature::curvatures(m, x)?;
                    let got = if mean { rec.h } else { rec.k_g };
                    if got.is_finite() {
                        worst = worst.max((got - f.eval(x)).abs());
                    }
                }
                let mut res = BTreeMap::new();
                res.insert(if mean { "H" } else { "K_G" }.to_string(), worst);
                if let Some(x) = b.breakdown {
                    res.insert("breakdown_x".into(), x);
                }
                r.residuals = Some(res);
                r.output = output.out.as_ref().map(|p| p.display().to_string());
                Some(r)
            } else {
                None
            };
            finish(report, out)
        }
        Command::Mesh {
            surface,
            ns,
            ntheta,
            triangulate,
            x0,
            s_span,
            curvature_csv,
            out: path,
            json,
        } => {
            let m = surface_momentum(&surface)?;
            let c = default_profile(&m, x0, s_span, &tol())?.resample(ns)?;
            let mesh = revolve(&c, ntheta)?;
            export_obj(&mesh, &path, triangulate)?;
            if let Some(csv) = &curvature_csv {
                let k = mesh_principal_curvatures(&mesh)?;
                emit(Some(csv), out, |w| write_curvature_csv(&mesh, &k, w))?;
            }
            let report = json.then(|| {
                let mut r = Report::new(&m);
                r.output = Some(path.display().to_string());
                let mut res = BTreeMap::new();
                res.insert("vertices".into(), mesh.points.len() as f64);
                r.residuals = Some(res);
                r
            });
            finish(report, out)
        }
        Command::Verify { surface, json } => {
            let m = surface_momentum(&surface)?;
            let checks = verify_surface(&m)?;
            if json {
                let v = json!({
                    "label": m.label,
                    "params": m.params,
                    "domain": domain_json(&m),
                    "checks": checks,
                });
                serde_json::to_writer_pretty(&mut *out, &v)
                    .map_err(|e| Error::Parse(e.to_string()))?;
                writeln!(out)?;
            } else {
                for ch in &checks {
                    writeln!(
                        out,
                        "{} {:<18} {:.3e} (tolerance {:.1e})",
                        if ch.pass { "PASS" } else { "FAIL" },
                        ch.name,
                        ch.value,
                        ch.tolerance
                    )?;
                }
            }
            match checks.iter().find(|c| !c.pass) {
                Some(ch) => Err(Error::BadParams(format!(
                    "{}: check {} failed",
                    m.label, ch.name
                ))),
                None => Ok(()),
            }
        }
    }
}

/// Run the command line with `argv` (program name first), writing normal
/// output to `out` and diagnostics to standard error. Returns the exit
/// status: 0 on success, 1 for parameter and domain errors, 2 for numerical
/// non-convergence.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        // closed downstream pipe, e.g. `| head`
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let code = run_with(argv, &mut lock);
    let _ = lock.flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let mut argv = vec!["rotweingarten"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn catalog_lists_everything() {
        let (code, text) = run_capture(&["catalog"]);
        assert_eq!(code, 0);
        assert_eq!(text.lines().count(), 16);
        let (_, js) = run_capture(&["catalog", "--json"]);
        let v: Value = serde_json::from_str(&js).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 15);
    }

    #[test]
    fn solve_cubic_sphere() {
        let (code, text) = run_capture(&["solve", "cubic:mu=1", "--c", "0", "--json"]);
        assert_eq!(code, 0, "{text}");
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["classification"]["kind"], "sphere");
        assert_eq!(v["classification"]["R"], 1.0);
        assert!(v["residuals"]["relation"].as_f64().unwrap() < 1e-10);
    }

    #[test]
    fn solve_other_families() {
        for args in [
            vec!["solve", "linear:p=-1", "--c", "1", "--json"],
            vec!["solve", "special:a=1,b=0,c=-1", "--json"],
            vec!["solve", "hyperbola:mu=-2", "--json"],
            vec!["solve", "hyperbola:mu=1", "--sphere-branch", "--json"],
            vec!["solve", "const:meridian=1", "--c", "-2", "--json"],
            vec!["solve", "const:parallel=0.5", "--json"],
        ] {
            let (code, text) = run_capture(&args);
            assert_eq!(code, 0, "{args:?}: {text}");
            let v: Value = serde_json::from_str(&text).unwrap();
            assert!(
                v["residuals"]["relation"].as_f64().unwrap() < 1e-10,
                "{args:?}: {text}"
            );
        }
    }

    #[test]
    fn prescribe_catenary() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.csv");
        let p = path.to_str().unwrap();
        let (code, _) = run_capture(&[
            "prescribe",
            "--H",
            "const:0",
            "--c",
            "1",
            "--reconstruct",
            "--out",
            p,
        ]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("s,x,z,theta\n"));
        for line in text.lines().skip(1) {
            let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
            assert!((v[1] - v[2].cosh()).abs() < 1e-8, "{line}");
        }
    }

    #[test]
    fn error_codes() {
        assert_eq!(run_capture(&["wdiagram", "--surface", "sphere:R=-1"]).0, 1);
        assert_eq!(run_capture(&["wdiagram", "--surface", "blob"]).0, 1);
        assert_eq!(run_capture(&["solve", "cubic:mu=-1", "--c", "0.5"]).0, 1);
        assert_eq!(run_capture(&["frobnicate"]).0, 1);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn wdiagram_csv() {
        let (code, text) =
            run_capture(&["wdiagram", "--surface", "elasticoid:a=1,k=0.5", "--n", "10"]);
        assert_eq!(code, 0);
        assert_eq!(text.lines().count(), 11);
        assert!(text.starts_with("x,k_m,k_p,H,K_G"));
    }
}

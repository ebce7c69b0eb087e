//! Command-line frontend: loads domains, sequences and meshes, runs one
//! computation, and writes a JSON report, a CSV table or an SVG figure.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use convproj::domain::{ConvexCone, ConvexDomain, DomainSpec};
use convproj::group;
use convproj::hilbert;
use convproj::linalg::{self, Matrix, Vector};
use convproj::normalize::{self, RepSequence, SequenceOptions};
use convproj::plconvex::{self, LinkReading, SimplicialHypersurface};
use convproj::projgeom::{ProjPoint, ProjTransform};
use convproj::vinberg::{self, VolumeModel};

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    /// 0 on success, 1 on a computation error, 2 on a usage error.
    pub exit_code: i32,
    pub report_path: Option<PathBuf>,
    pub warnings: Vec<String>,
    /// One-line summary printed to stdout.
    pub summary: String,
    /// The full report (JSON text or CSV).
    pub report: String,
}

#[derive(Debug, Parser)]
#[command(name = "convproj", version, about = "Properly-convex projective geometry toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Global {
    /// Report destination; `.csv` selects CSV where a table exists.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for quadrature, perturbation and jitter randomness.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance override for the command's main test.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for internal parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// SVG figure destination (planar charts only).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Domain construction and duality.
    #[command(subcommand)]
    Domain(DomainCmd),
    /// Hilbert metric.
    #[command(subcommand)]
    Hilbert(HilbertCmd),
    /// Slice volumes, Θ and the characteristic surface.
    #[command(subcommand)]
    Vinberg(VinbergCmd),
    /// Moments, isotropic position, box estimates, sequences.
    #[command(subcommand)]
    Normalize(NormalizeCmd),
    /// Automorphisms, dynamics, orbits, fundamental domains.
    #[command(subcommand)]
    Group(GroupCmd),
    /// PL convexity certificates.
    #[command(subcommand)]
    Plconvex(PlCmd),
}

#[derive(Debug, Args)]
struct DomainArg {
    /// Domain JSON file.
    #[arg(long)]
    domain: PathBuf,
}

#[derive(Debug, Subcommand)]
enum DomainCmd {
    /// Certify proper convexity.
    Validate(DomainArg),
    /// Dual domain in the dual chart.
    Dual(DomainArg),
    /// Maximal flat pieces of the frontier.
    Flats(DomainArg),
}

#[derive(Debug, Subcommand)]
enum HilbertCmd {
    /// Hilbert distance between two points.
    Dist {
        #[command(flatten)]
        d: DomainArg,
        /// Chart coordinates, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Chart coordinates, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Points equally spaced in Hilbert arclength.
    Geodesic {
        #[command(flatten)]
        d: DomainArg,
        /// Chart coordinates, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Chart coordinates, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Number of geodesic steps.
        #[arg(long, default_value_t = 16)]
        k: usize,
    },
    /// Sampled thinness constant of a triangle.
    Delta {
        #[command(flatten)]
        d: DomainArg,
        /// Triangle vertex in chart coordinates.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Triangle vertex in chart coordinates.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Triangle vertex in chart coordinates.
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        /// Samples per side.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
enum VinbergCmd {
    /// Slice volume of a dual functional.
    Volume {
        #[command(flatten)]
        d: DomainArg,
        /// Functional coefficients.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        /// Use Monte Carlo with this many samples instead of the exact value.
        #[arg(long)]
        quadrature: Option<usize>,
    },
    /// Gradient of the slice volume.
    Grad {
        #[command(flatten)]
        d: DomainArg,
        /// Functional coefficients.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Image of a functional under Θ.
    Theta {
        #[command(flatten)]
        d: DomainArg,
        /// Functional coefficients.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Spherical center.
    Center(DomainArg),
    /// Characteristic surface point over a direction.
    Surface {
        #[command(flatten)]
        d: DomainArg,
        /// Homogeneous point of the cone.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
}

#[derive(Debug, Subcommand)]
enum NormalizeCmd {
    /// Volume, centroid and second moment.
    Moments(DomainArg),
    /// Isotropic position and box sandwich.
    Isotropic(DomainArg),
    /// Entrywise box estimate for a matrix.
    Boxcheck {
        /// Matrix rows separated by `;`, entries by `,`.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Box scale.
        #[arg(long)]
        k: f64,
    },
    /// Degeneration analysis of a representation sequence.
    Sequence {
        /// Sequence JSON file.
        #[arg(long)]
        seq: PathBuf,
    },
}

#[derive(Debug, Args)]
struct GensArg {
    /// Generator JSON file (a single-term sequence).
    #[arg(long)]
    gens: PathBuf,
}

#[derive(Debug, Subcommand)]
enum GroupCmd {
    /// Check that generators preserve the domain.
    Aut {
        #[command(flatten)]
        d: DomainArg,
        #[command(flatten)]
        g: GensArg,
    },
    /// Fixed points and translation length of a generator.
    Dynamics {
        #[command(flatten)]
        d: DomainArg,
        #[command(flatten)]
        g: GensArg,
        /// Index of the generator to classify.
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Orbit of a point under reduced words.
    Orbit {
        #[command(flatten)]
        g: GensArg,
        /// Homogeneous seed point.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Maximum word length.
        #[arg(long, default_value_t = 3)]
        length: usize,
        /// Domain used for the figure and margins.
        #[arg(long)]
        domain: Option<PathBuf>,
    },
    /// Dirichlet domain at a basepoint.
    Dirichlet {
        #[command(flatten)]
        d: DomainArg,
        #[command(flatten)]
        g: GensArg,
        /// Homogeneous basepoint in the cone.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Maximum word length.
        #[arg(long, default_value_t = 3)]
        length: usize,
    },
}

#[derive(Debug, Args)]
struct MeshArg {
    /// Mesh JSON file.
    #[arg(long)]
    mesh: PathBuf,
    /// Restrict star determinants to adjacent simplices.
    #[arg(long)]
    adjacent_only: bool,
}

impl MeshArg {
    fn reading(&self) -> LinkReading {
        if self.adjacent_only {
            LinkReading::AdjacentOnly
        } else {
            LinkReading::AllLink
        }
    }
}

#[derive(Debug, Subcommand)]
enum PlCmd {
    /// Radial section check.
    Check(MeshArg),
    /// Generic convexity certificate.
    Certify(MeshArg),
    /// Certified perturbation radius.
    Radius(MeshArg),
    /// Outward local convexity at a scaling factor.
    Outward {
        #[command(flatten)]
        m: MeshArg,
        /// Scaling factor, greater than 1.
        #[arg(long)]
        t: f64,
    },
    /// PL characteristic surface of a cone.
    Build {
        #[command(flatten)]
        d: DomainArg,
        /// Number of sampled directions.
        #[arg(long, default_value_t = 64)]
        budget: usize,
        /// Also write the mesh JSON here.
        #[arg(long)]
        mesh_out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Compute(convproj::Error),
}

impl From<convproj::Error> for Failure {
    fn from(e: convproj::Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// What a command produced before it is written out.
struct Report {
    summary: String,
    body: Value,
    csv: Option<String>,
    figure: Option<String>,
    warnings: Vec<String>,
}

impl Report {
    fn new(summary: impl Into<String>, body: Value) -> Self {
        Self { summary: summary.into(), body, csv: None, figure: None, warnings: Vec::new() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Parse errors are usage errors; geometric rejection is a computation error.
fn load_domain(path: &Path) -> Outcome<ConvexDomain> {
    let spec = DomainSpec::from_json(&read(path)?).map_err(|e| usage(e.to_string()))?;
    Ok(spec.build()?)
}

fn load_sequence(path: &Path) -> Outcome<RepSequence> {
    RepSequence::from_json(&read(path)?).map_err(|e| match e {
        convproj::Error::InvalidInput(m) => usage(m),
        other => Failure::Compute(other),
    })
}

fn load_generators(path: &Path) -> Outcome<Vec<ProjTransform>> {
    let seq = load_sequence(path)?;
    let term = seq.terms.first().ok_or_else(|| usage("generator file has no term"))?;
    Ok(term.iter().map(|m| ProjTransform::new(m.clone())).collect::<convproj::Result<_>>()?)
}

fn load_mesh(path: &Path) -> Outcome<SimplicialHypersurface> {
    SimplicialHypersurface::from_json(&read(path)?).map_err(|e| match e {
        convproj::Error::InvalidInput(m) => usage(m),
        other => Failure::Compute(other),
    })
}

fn parse_vector(s: &str) -> Outcome<Vector> {
    let xs = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| usage(format!("cannot parse vector '{s}'")))?;
    if xs.is_empty() || xs.iter().any(|x| !x.is_finite()) {
        return Err(usage(format!("vector '{s}' must be finite")));
    }
    Ok(linalg::vector(&xs))
}

fn parse_matrix(s: &str) -> Outcome<Matrix> {
    let rows = s
        .split(';')
        .map(|r| parse_vector(r).map(|v| v.iter().copied().collect::<Vec<_>>()))
        .collect::<Outcome<Vec<_>>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(usage("matrix must be square"));
    }
    Ok(linalg::matrix(&rows))
}

fn chart_point(omega: &ConvexDomain, s: &str) -> Outcome<Vector> {
    let x = parse_vector(s)?;
    if x.len() != omega.dim() {
        return Err(usage(format!("point '{s}' has dimension {} but the chart has {}", x.len(), omega.dim())));
    }
    Ok(x)
}

fn ambient_point(dim: usize, s: &str) -> Outcome<Vector> {
    let x = parse_vector(s)?;
    if x.len() != dim {
        return Err(usage(format!("point '{s}' must have {dim} homogeneous coordinates")));
    }
    Ok(x)
}

fn vec_json(v: &Vector) -> Value {
    json!(v.iter().copied().collect::<Vec<_>>())
}

fn mat_json(m: &Matrix) -> Value {
    json!(linalg::to_rows(m))
}

fn points_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r.iter().map(|x| format!("{x:.12e}"))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn coord_header(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

fn domain_report(omega: &ConvexDomain) -> Value {
    json!({
        "backend": omega.backend().name(),
        "dimension": omega.dim(),
        "spec": serde_json::to_value(omega.to_spec()).expect("serializable"),
    })
}

fn run_domain(cmd: &DomainCmd) -> Outcome<Report> {
    match cmd {
        DomainCmd::Validate(a) => {
            let omega = load_domain(&a.domain)?;
            let cert = omega.validate()?;
            let mut r = Report::new(
                format!("properly convex, margin {:.6}", cert.margin),
                json!({ "domain": domain_report(&omega), "certificate": cert }),
            );
            r.figure = svg::domain_figure(&omega, &[], &[]);
            Ok(r)
        }
        DomainCmd::Dual(a) => {
            let omega = load_domain(&a.domain)?;
            let dual = omega.dual_domain()?;
            let mut r = Report::new(format!("dual is a {} domain", dual.backend().name()), domain_report(&dual));
            r.figure = svg::domain_figure(&dual, &[], &[]);
            Ok(r)
        }
        DomainCmd::Flats(a) => {
            let omega = load_domain(&a.domain)?;
            let flats = omega.boundary_flats();
            Ok(Report::new(format!("{} flats", flats.len()), json!({ "flats": flats })))
        }
    }
}

fn run_hilbert(cmd: &HilbertCmd, tol: Option<f64>) -> Outcome<Report> {
    match cmd {
        HilbertCmd::Dist { d, x, y } => {
            let omega = load_domain(&d.domain)?;
            let (x, y) = (chart_point(&omega, x)?, chart_point(&omega, y)?);
            let dist = hilbert::distance_chart(&omega, &x, &y)?;
            let mut r = Report::new(format!("{dist:.6}"), json!({ "distance": dist, "x": vec_json(&x), "y": vec_json(&y) }));
            r.figure = svg::domain_figure(&omega, &[x, y], &[]);
            Ok(r)
        }
        HilbertCmd::Geodesic { d, x, y, k } => {
            let omega = load_domain(&d.domain)?;
            let (x, y) = (chart_point(&omega, x)?, chart_point(&omega, y)?);
            let chart = omega.chart();
            let pts = hilbert::geodesic(&omega, &chart.point(&x), &chart.point(&y), *k)?;
            let coords = pts.iter().map(|p| omega.inside_coords(p)).collect::<convproj::Result<Vec<_>>>()?;
            let rows: Vec<Vec<f64>> = coords.iter().map(|c| c.iter().copied().collect()).collect();
            let header = coord_header(omega.dim());
            let mut r = Report::new(
                format!("{} geodesic points", coords.len()),
                json!({ "points": rows, "length": hilbert::distance_chart(&omega, &x, &y)? }),
            );
            r.csv = Some(points_csv(&header.iter().map(|s| s.as_str()).collect::<Vec<_>>(), &rows));
            r.figure = svg::domain_figure(&omega, &coords, std::slice::from_ref(&coords));
            Ok(r)
        }
        HilbertCmd::Delta { d, a, b, c, samples } => {
            let omega = load_domain(&d.domain)?;
            let chart = omega.chart();
            let pts = [a, b, c].map(|s| chart_point(&omega, s).map(|x| chart.point(&x)));
            let [pa, pb, pc] = pts;
            let (pa, pb, pc) = (pa?, pb?, pc?);
            let res = hilbert::thin_triangle_delta(&omega, [&pa, &pb, &pc], *samples)?;
            let mut r = Report::new(format!("delta {:.6}", res.delta), json!({ "delta": res, "samples": samples }));
            if let Some(t) = tol {
                if res.delta > t {
                    r.warnings.push(format!("delta {:.6} exceeds {t}", res.delta));
                }
            }
            Ok(r)
        }
    }
}

fn cone_of(path: &Path) -> Outcome<(ConvexDomain, VolumeModel)> {
    let omega = load_domain(path)?;
    let model = VolumeModel::new(&ConvexCone::new(omega.clone()))?;
    Ok((omega, model))
}

fn run_vinberg(cmd: &VinbergCmd, seed: u64) -> Outcome<Report> {
    match cmd {
        VinbergCmd::Volume { d, v, quadrature } => {
            let (omega, model) = cone_of(&d.domain)?;
            let v = ambient_point(omega.dim() + 1, v)?;
            let res = match quadrature {
                Some(n) => model.volume_quadrature(&v, *n, seed)?,
                None => model.volume(&v)?,
            };
            Ok(Report::new(format!("{:.9}", res.value), json!({ "volume": res })))
        }
        VinbergCmd::Grad { d, v } => {
            let (omega, model) = cone_of(&d.domain)?;
            let v = ambient_point(omega.dim() + 1, v)?;
            let e = model.evaluate(&v)?;
            Ok(Report::new(
                format!("|grad| {:.9}", e.gradient.norm()),
                json!({ "value": e.value, "gradient": vec_json(&e.gradient), "hessian": mat_json(&e.hessian), "centroid": vec_json(&e.centroid()) }),
            ))
        }
        VinbergCmd::Theta { d, v } => {
            let (omega, model) = cone_of(&d.domain)?;
            let v = ambient_point(omega.dim() + 1, v)?;
            let p = model.theta(&v)?;
            let back = model.theta_inverse(&p)?;
            Ok(Report::new(
                "theta computed",
                json!({ "theta": p, "chart": vec_json(&omega.inside_coords(&p)?), "theta_inverse": vec_json(&back) }),
            ))
        }
        VinbergCmd::Center(a) => {
            let omega = load_domain(&a.domain)?;
            let sc = vinberg::spherical_center(&omega)?;
            let chart = vec_json(&omega.inside_coords(&sc.center)?);
            Ok(Report::new(format!("center after {} iterations", sc.iterations), json!({ "center": sc, "chart": chart })))
        }
        VinbergCmd::Surface { d, q } => {
            let (omega, model) = cone_of(&d.domain)?;
            let q = ambient_point(omega.dim() + 1, q)?;
            let p = model.characteristic_point(&q)?;
            Ok(Report::new(format!("radius {:.9}", p.norm()), json!({ "point": vec_json(&p), "radius": p.norm() })))
        }
    }
}

fn run_normalize(cmd: &NormalizeCmd, tol: Option<f64>) -> Outcome<Report> {
    match cmd {
        NormalizeCmd::Moments(a) => {
            let omega = load_domain(&a.domain)?;
            let m = normalize::moments(&omega)?;
            Ok(Report::new(format!("volume {:.9}", m.volume), json!({ "moments": m })))
        }
        NormalizeCmd::Isotropic(a) => {
            let omega = load_domain(&a.domain)?;
            let iso = normalize::isotropic_normalize(&omega)?;
            let mut r = Report::new(
                format!("K = {:.6}", iso.sandwich.outer_k),
                json!({
                    "rotation": mat_json(&iso.rotation),
                    "scale": vec_json(&iso.scale),
                    "affine": mat_json(&iso.affine),
                    "sandwich": iso.sandwich,
                    "moments": iso.moments,
                    "domain": domain_report(&iso.domain),
                }),
            );
            r.figure = svg::domain_figure(&iso.domain, &[], &[]);
            Ok(r)
        }
        NormalizeCmd::Boxcheck { matrix, k } => {
            let a = parse_matrix(matrix)?;
            let res = normalize::box_bound_check(&a, *k).map_err(|e| usage(e.to_string()))?;
            let summary = format!("hypothesis {}, bound {}", res.hypothesis, if res.holds { "holds" } else { "fails" });
            Ok(Report::new(summary, json!({ "boxcheck": res })))
        }
        NormalizeCmd::Sequence { seq } => {
            let seq = load_sequence(seq)?;
            let mut opts = SequenceOptions::default();
            if let Some(t) = tol {
                opts.slope_threshold = t;
            }
            let rep = normalize::analyze_sequence(&seq, &opts)?;
            let mut r = Report::new(format!("{} (slope {:.4})", rep.verdict, rep.slope), json!({ "report": rep }));
            r.csv = Some(rep.to_csv());
            if !rep.corner_invariant {
                r.warnings.push("corner entry changed under conjugation".into());
            }
            Ok(r)
        }
    }
}

fn run_group(cmd: &GroupCmd, tol: Option<f64>) -> Outcome<Report> {
    match cmd {
        GroupCmd::Aut { d, g } => {
            let omega = load_domain(&d.domain)?;
            let gens = load_generators(&g.gens)?;
            let t = tol.unwrap_or(1e-9);
            let checks = gens.iter().map(|a| group::is_automorphism(&omega, a, t)).collect::<convproj::Result<Vec<_>>>()?;
            let all = checks.iter().all(|c| c.is_automorphism);
            Ok(Report::new(
                format!("{} of {} generators preserve the domain", checks.iter().filter(|c| c.is_automorphism).count(), checks.len()),
                json!({ "automorphism": all, "checks": checks }),
            ))
        }
        GroupCmd::Dynamics { d, g, index } => {
            let omega = load_domain(&d.domain)?;
            let gens = load_generators(&g.gens)?;
            let a = gens.get(*index).ok_or_else(|| usage(format!("no generator {index}")))?;
            let h = group::fixed_point_dynamics(&omega, a)?;
            let steps = group::convergence_steps(&omega, a, omega.interior_point(), h.a_plus.coords(), 1e-6, 10_000);
            let mut r = Report::new(
                format!("translation length {:.9}", h.translation_length),
                json!({
                    "a_plus": h.a_plus,
                    "a_minus": h.a_minus,
                    "axis": [vec_json(&h.axis.chart_minus), vec_json(&h.axis.chart_plus)],
                    "translation_length": h.translation_length,
                    "spectral_length": h.spectral_length,
                    "eigenvalue_gap": h.eigenvalue_gap,
                    "power_residual": h.power_residual,
                    "convergence_steps": steps,
                }),
            );
            r.figure = svg::domain_figure(&omega, &[], &[vec![h.axis.chart_minus.clone(), h.axis.chart_plus.clone()]]);
            Ok(r)
        }
        GroupCmd::Orbit { g, point, length, domain } => {
            let gens = load_generators(&g.gens)?;
            let d = gens.first().map(|a| a.dim()).ok_or_else(|| usage("no generators"))?;
            let seed = ProjPoint::new(ambient_point(d, point)?)?;
            let pts = group::orbit(&gens, &seed, *length)?;
            let rows: Vec<Vec<f64>> = pts.iter().map(|p| p.point.coords().iter().copied().collect()).collect();
            let mut r = Report::new(
                format!("{} orbit points", pts.len()),
                json!({ "points": pts.iter().map(|p| json!({ "word": p.word, "point": p.point })).collect::<Vec<_>>() }),
            );
            r.csv = Some(points_csv(&coord_header(d).iter().map(|s| s.as_str()).collect::<Vec<_>>(), &rows));
            if let Some(path) = domain {
                let omega = load_domain(path)?;
                let coords: Vec<Vector> = pts.iter().filter_map(|p| omega.chart().to_chart(&p.point).ok()).collect();
                r.figure = svg::domain_figure(&omega, &coords, &[]);
            }
            Ok(r)
        }
        GroupCmd::Dirichlet { d, g, x, length } => {
            let omega = load_domain(&d.domain)?;
            let gens = load_generators(&g.gens)?;
            let x = ambient_point(omega.dim() + 1, x)?;
            let q = group::dirichlet_domain(&ConvexCone::new(omega), &gens, &x, *length)?;
            let mut r = Report::new(
                format!("{} paired facets{}", q.facets.len(), if q.stable { "" } else { " (unstable)" }),
                json!({
                    "functional": q.functional,
                    "basepoint": vec_json(&q.basepoint),
                    "facets": q.facets,
                    "stable": q.stable,
                    "region": q.region.as_ref().map(domain_report),
                    "slice": domain_report(&q.slice),
                }),
            );
            r.warnings = q.warnings.clone();
            if let Some(region) = &q.region {
                r.figure = svg::domain_figure(&q.slice, std::slice::from_ref(&q.basepoint), &[svg::outline(region)]);
            }
            Ok(r)
        }
    }
}

fn run_pl(cmd: &PlCmd, seed: u64) -> Outcome<Report> {
    match cmd {
        PlCmd::Check(m) => {
            let s = load_mesh(&m.mesh)?;
            let res = plconvex::radial_section_check(&s)?;
            Ok(Report::new(format!("radial section {}", res.radial_section), json!({ "radial": res })))
        }
        PlCmd::Certify(m) => {
            let s = load_mesh(&m.mesh)?;
            let cert = plconvex::certify_generic_convex(&s, m.reading())?;
            let summary = if cert.certified {
                format!("certified, margin {:.6e}", cert.margin)
            } else {
                format!("{} violations", cert.violations.len())
            };
            Ok(Report::new(summary, json!({ "certificate": cert })))
        }
        PlCmd::Radius(m) => {
            let s = load_mesh(&m.mesh)?;
            let rep = plconvex::perturbation_radius(&s, m.reading(), seed)?;
            Ok(Report::new(format!("epsilon {:.6e}, {}/{} passed", rep.epsilon, rep.passed, rep.trials), json!({ "perturbation": rep })))
        }
        PlCmd::Outward { m, t } => {
            let s = load_mesh(&m.mesh)?;
            let res = plconvex::outward_check(&s, *t)?;
            Ok(Report::new(format!("outward {}", res.outward), json!({ "outward": res })))
        }
        PlCmd::Build { d, budget, mesh_out } => {
            let omega = load_domain(&d.domain)?;
            let pl = plconvex::pl_characteristic_surface(&ConvexCone::new(omega.clone()), *budget, seed)?;
            let mesh = pl.surface.to_spec();
            if let Some(path) = mesh_out {
                let text = serde_json::to_string_pretty(&mesh).expect("serializable");
                fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            let mut r = Report::new(
                format!("{} simplices, deviation {:.3e}", mesh.simplices.len(), pl.deviation),
                json!({ "mesh": mesh, "certificate": pl.certificate, "deviation": pl.deviation, "jitter_rounds": pl.jitter_rounds }),
            );
            if omega.dim() <= 2 {
                let chart = omega.chart();
                let lines: Vec<Vec<Vector>> = pl
                    .surface
                    .simplices()
                    .iter()
                    .filter_map(|t| {
                        let mut c: Vec<Vector> = t.iter().filter_map(|&i| chart.coords_of(&pl.surface.vertices()[i]).ok()).collect();
                        c.push(c.first()?.clone());
                        Some(c)
                    })
                    .collect();
                r.figure = svg::domain_figure(&omega, &[], &lines);
            }
            Ok(r)
        }
    }
}

fn run(cli: &Cli) -> Outcome<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Domain(c) => run_domain(c),
        Command::Hilbert(c) => run_hilbert(c, g.tol),
        Command::Vinberg(c) => run_vinberg(c, g.seed),
        Command::Normalize(c) => run_normalize(c, g.tol),
        Command::Group(c) => run_group(c, g.tol),
        Command::Plconvex(c) => run_pl(c, g.seed),
    }
}

fn command_name(argv: &[String]) -> String {
    argv.iter().take_while(|a| !a.starts_with('-')).take(2).cloned().collect::<Vec<_>>().join(" ")
}

fn write_out(path: &Path, text: &str) -> std::result::Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// `dispatch`: parses `argv` (without the program name), runs the command
/// and writes its report.
pub fn dispatch<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("convproj".to_string()).chain(argv.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return CommandResult { exit_code: code, report_path: None, warnings: vec![], summary: e.to_string(), report: String::new() };
        }
    };
    let name = command_name(&argv);
    let outcome = match cli.global.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(usage(format!("cannot start {n} threads: {e}"))),
        },
        None => run(&cli),
    };
    let out = cli.global.out.clone();
    let wants_csv = out.as_ref().and_then(|p| p.extension()).is_some_and(|e| e == "csv");
    let (exit_code, summary, report, warnings, figure) = match outcome {
        Ok(r) => {
            let text = match (&r.csv, wants_csv) {
                (Some(csv), true) => csv.clone(),
                _ => {
                    let body = json!({ "command": name, "status": "ok", "result": r.body, "warnings": r.warnings });
                    serde_json::to_string_pretty(&body).expect("serializable")
                }
            };
            let mut warnings = r.warnings;
            if wants_csv && r.csv.is_none() {
                warnings.push("no table for this command; wrote JSON".into());
            }
            (0, r.summary, text, warnings, r.figure)
        }
        Err(f) => {
            let (code, kind, message, witness) = match f {
                Failure::Usage(m) => (2, "usage".to_string(), m, None),
                Failure::Compute(e) => {
                    let witness = match &e {
                        convproj::Error::NotProperlyConvex { witness, .. } => Some(json!(witness)),
                        _ => None,
                    };
                    (1, e.code().to_string(), e.to_string(), witness)
                }
            };
            let mut error = json!({ "code": kind, "message": message });
            if let Some(w) = witness {
                error["witness"] = w;
            }
            let body = json!({ "command": name, "status": "error", "error": error });
            (code, format!("error [{kind}]: {message}"), serde_json::to_string_pretty(&body).expect("serializable"), vec![], None)
        }
    };
    let mut warnings = warnings;
    let mut exit_code = exit_code;
    let mut summary = summary;
    if let Some(path) = &out {
        if let Err(e) = write_out(path, &report) {
            exit_code = 2;
            summary = e;
        }
    }
    if let Some(path) = &cli.global.svg {
        match figure {
            Some(f) => {
                if let Err(e) = write_out(path, &f) {
                    warnings.push(e);
                }
            }
            None => warnings.push("no figure: figures are drawn for planar charts only".into()),
        }
    }
    CommandResult { exit_code, report_path: out, warnings, summary, report }
}

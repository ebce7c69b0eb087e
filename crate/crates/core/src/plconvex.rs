//! Convexity certificates for simplicial hypersurfaces in cones: radial
//! sections, the vertex-star determinant test, perturbation radii,
//! outwardness, the log-contour function and PL approximations of the
//! characteristic hypersurface.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{combinations, ConvexCone};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::vinberg::VolumeModel;

/// A simplicial complex of `n`-simplices (each `n+1` vertices) in
/// `R^{n+1}∖{0}`. Simplices are stored oriented so that the determinant of
/// their vertex matrix is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialHypersurface {
    vertices: Vec<Vector>,
    simplices: Vec<Vec<usize>>,
    /// Each sorted `(n−1)`-face with the simplices containing it.
    adjacency: BTreeMap<Vec<usize>, Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshSpec {
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
}

fn det_columns(cols: &[Vector]) -> f64 {
    linalg::det(&linalg::columns(cols))
}

fn column_scale(cols: &[Vector]) -> f64 {
    cols.iter().map(|c| c.norm()).product()
}

impl SimplicialHypersurface {
    pub fn new(vertices: Vec<Vector>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let d = vertices.first().map(|v| v.len()).unwrap_or(0);
        if d < 2 || simplices.is_empty() {
            return Err(invalid("mesh needs vertices in R^{n+1} with n ≥ 1 and at least one simplex"));
        }
        if vertices.iter().any(|v| v.len() != d || v.iter().any(|x| !x.is_finite()) || v.norm() == 0.0) {
            return Err(invalid("mesh vertices must be finite, nonzero and of equal dimension"));
        }
        let scale = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut oriented = Vec::with_capacity(simplices.len());
        for s in &simplices {
            if s.len() != d || s.iter().any(|&i| i >= vertices.len()) {
                return Err(invalid("mesh simplex has wrong arity or index"));
            }
            let edges: Vec<Vector> = s[1..].iter().map(|&i| &vertices[i] - &vertices[s[0]]).collect();
            let m = Matrix::from_fn(d, d - 1, |r, c| edges[c][r]);
            let smin = m.svd(false, false).singular_values.min();
            if !(smin > 1e-10 * scale) {
                return Err(Error::DegenerateDomain(format!("mesh simplex {s:?} is degenerate")));
            }
            let cols: Vec<Vector> = s.iter().map(|&i| vertices[i].clone()).collect();
            let mut s = s.clone();
            if det_columns(&cols) > 0.0 {
                s.swap(0, 1);
            }
            oriented.push(s);
        }
        let mut adjacency: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (k, s) in oriented.iter().enumerate() {
            for skip in 0..d {
                let mut f: Vec<usize> = s.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, &i)| i).collect();
                f.sort_unstable();
                adjacency.entry(f).or_default().push(k);
            }
        }
        if adjacency.values().any(|v| v.len() > 2) {
            return Err(invalid("mesh is not a combinatorial manifold"));
        }
        Ok(Self { vertices, simplices: oriented, adjacency })
    }

    pub fn from_spec(spec: &MeshSpec) -> Result<Self> {
        Self::new(spec.vertices.iter().map(|v| linalg::vector(v)).collect(), spec.simplices.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: MeshSpec = serde_json::from_str(text).map_err(|e| invalid(format!("malformed mesh file: {e}")))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> MeshSpec {
        MeshSpec {
            vertices: self.vertices.iter().map(|v| v.iter().copied().collect()).collect(),
            simplices: self.simplices.clone(),
        }
    }

    /// Ambient dimension `n+1`.
    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn is_closed(&self) -> bool {
        self.adjacency.values().all(|v| v.len() == 2)
    }

    pub fn boundary_vertices(&self) -> BTreeSet<usize> {
        self.adjacency.iter().filter(|(_, s)| s.len() == 1).flat_map(|(f, _)| f.iter().copied()).collect()
    }

    /// Pairs of simplices sharing an `(n−1)`-face.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        self.adjacency.values().filter(|v| v.len() == 2).map(|v| (v[0], v[1])).collect()
    }

    /// The same complex with every vertex mapped by `a`.
    pub fn map_vertices(&self, a: &Matrix) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| a * v).collect(), self.simplices.clone())
    }

    pub fn with_vertices(&self, vertices: Vec<Vector>) -> Result<Self> {
        Self::new(vertices, self.simplices.clone())
    }

    fn simplex_columns(&self, k: usize) -> Vec<Vector> {
        self.simplices[k].iter().map(|&i| self.vertices[i].clone()).collect()
    }

    /// Coefficients of `w` in the vertex basis of simplex `k`.
    fn cone_coefficients(&self, k: usize, w: &Vector) -> Option<Vector> {
        linalg::columns(&self.simplex_columns(k)).lu().solve(w)
    }

    /// Simplex whose cone contains `w`, with `α(w)` for the linear
    /// functional equal to 1 on that simplex.
    fn locate(&self, w: &Vector) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for k in 0..self.simplices.len() {
            if let Some(c) = self.cone_coefficients(k, w) {
                let worst = c.min() / c.amax().max(f64::MIN_POSITIVE);
                if worst >= -1e-12 && best.is_none_or(|b| worst > b.2) {
                    best = Some((k, c.sum(), worst));
                }
            }
        }
        best.map(|(k, a, _)| (k, a))
    }

    /// PL radial function: distance from 0 to `|S|` along the unit vector
    /// `u`, if the ray meets `|S|`.
    pub fn radial_function(&self, u: &Vector) -> Option<f64> {
        let u = u.normalize();
        self.locate(&u).filter(|(_, a)| *a > 0.0).map(|(_, a)| 1.0 / a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialCheck {
    pub radial_section: bool,
    /// Pairs of simplices whose cones overlap at a sample ray.
    pub overlaps: Vec<(usize, usize)>,
    pub samples: usize,
}

/// `radial_section_check`: each simplex must be transverse to the rays
/// (origin off its affine hull), and sample rays through every simplex
/// must meet no other simplex's open cone.
pub fn radial_section_check(s: &SimplicialHypersurface) -> Result<RadialCheck> {
    let bad: Vec<usize> = (0..s.simplices.len())
        .filter(|&k| {
            let cols = s.simplex_columns(k);
            det_columns(&cols).abs() <= 1e-12 * column_scale(&cols)
        })
        .collect();
    if !bad.is_empty() {
        return Err(Error::TransversalityFailure { simplices: bad });
    }
    let d = s.ambient_dim();
    let samples: Vec<(usize, Vector)> = (0..s.simplices.len())
        .flat_map(|k| {
            let cols = s.simplex_columns(k);
            let bary = cols.iter().fold(Vector::zeros(d), |acc, c| acc + c) / d as f64;
            let mut pts = vec![(k, bary.clone())];
            pts.extend(cols.iter().map(|c| (k, (&bary + c) * 0.5)));
            pts
        })
        .collect();
    let mut overlaps: Vec<(usize, usize)> = samples
        .par_iter()
        .flat_map_iter(|(k, w)| {
            (0..s.simplices.len())
                .filter(move |j| j != k)
                .filter(move |&j| {
                    s.cone_coefficients(j, w)
                        .is_some_and(|c| c.min() > 1e-9 * c.amax())
                })
                .map(move |j| ((*k).min(j), (*k).max(j)))
        })
        .collect();
    overlaps.sort_unstable();
    overlaps.dedup();
    Ok(RadialCheck { radial_section: overlaps.is_empty(), overlaps, samples: samples.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexConvexity {
    /// Common sign of the star determinants, or 0 if they disagree.
    pub sign: i8,
    /// Smallest `|det|`.
    pub margin: f64,
}

/// Which link vertices enter the star determinants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LinkReading {
    /// Every link vertex not in the simplex.
    #[default]
    AllLink,
    /// Only the opposite vertices of simplices sharing a face.
    AdjacentOnly,
}

fn star_determinants(s: &SimplicialHypersurface, v: usize, reading: LinkReading) -> Result<Vec<f64>> {
    let star: Vec<usize> = (0..s.simplices.len()).filter(|&k| s.simplices[k].contains(&v)).collect();
    let mut out = Vec::new();
    for &k in &star {
        let sigma = &s.simplices[k];
        let candidates: Vec<(usize, usize)> = match reading {
            LinkReading::AllLink => star
                .iter()
                .flat_map(|&t| s.simplices[t].iter().map(move |&u| (u, t)))
                .filter(|(u, _)| !sigma.contains(u))
                .collect(),
            LinkReading::AdjacentOnly => star
                .iter()
                .filter(|&&t| t != k && s.simplices[t].iter().filter(|u| sigma.contains(u)).count() == sigma.len() - 1)
                .flat_map(|&t| s.simplices[t].iter().map(move |&u| (u, t)))
                .filter(|(u, _)| !sigma.contains(u))
                .collect(),
        };
        let mut seen = BTreeSet::new();
        for (u, t) in candidates {
            if !seen.insert(u) {
                continue;
            }
            let cols: Vec<Vector> = sigma.iter().map(|&i| &s.vertices[i] - &s.vertices[u]).collect();
            let det = det_columns(&cols);
            if det.abs() <= 1e-12 * column_scale(&cols) {
                return Err(Error::Coplanarity(k, t));
            }
            out.push(det);
        }
    }
    Ok(out)
}

/// `vertex_convexity` at an interior vertex.
pub fn vertex_convexity(s: &SimplicialHypersurface, v: usize, reading: LinkReading) -> Result<VertexConvexity> {
    if v >= s.vertices.len() || s.boundary_vertices().contains(&v) || !s.simplices.iter().any(|t| t.contains(&v)) {
        return Err(invalid("vertex is not interior to the complex"));
    }
    let dets = star_determinants(s, v, reading)?;
    let margin = dets.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
    let sign = if dets.iter().all(|&d| d > 0.0) {
        1
    } else if dets.iter().all(|&d| d < 0.0) {
        -1
    } else {
        0
    };
    Ok(VertexConvexity { sign, margin })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// `vertex`, `orientation` or `coplanar`.
    pub kind: String,
    pub vertex: Option<usize>,
    pub simplices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub certified: bool,
    pub sign: i8,
    /// Smallest star determinant over all interior vertices.
    pub margin: f64,
    pub interior_vertices: usize,
    pub reading: LinkReading,
    pub violations: Vec<Violation>,
}

/// `certify_generic_convex`. Open complexes must be convex away from the
/// origin (sign +1, the side of the region above the surface); closed
/// complexes must bound a convex region around the origin (sign −1).
pub fn certify_generic_convex(s: &SimplicialHypersurface, reading: LinkReading) -> Result<Certificate> {
    radial_section_check(s)?;
    let expected: i8 = if s.is_closed() { -1 } else { 1 };
    let boundary = s.boundary_vertices();
    let interior: Vec<usize> = (0..s.vertices.len())
        .filter(|v| !boundary.contains(v) && s.simplices.iter().any(|t| t.contains(v)))
        .collect();
    let results: Vec<(usize, Result<VertexConvexity>)> =
        interior.par_iter().map(|&v| (v, vertex_convexity(s, v, reading))).collect();
    let mut violations = Vec::new();
    let mut margin = f64::INFINITY;
    for (v, r) in results {
        match r {
            Ok(vc) => {
                margin = margin.min(vc.margin);
                if vc.sign == 0 {
                    violations.push(Violation { kind: "vertex".into(), vertex: Some(v), simplices: vec![] });
                } else if vc.sign != expected {
                    violations.push(Violation { kind: "orientation".into(), vertex: Some(v), simplices: vec![] });
                }
            }
            Err(Error::Coplanarity(a, b)) => {
                violations.push(Violation { kind: "coplanar".into(), vertex: Some(v), simplices: vec![a, b] })
            }
            Err(e) => return Err(e),
        }
    }
    for (a, b) in s.adjacent_pairs() {
        let u = *s.simplices[b].iter().find(|u| !s.simplices[a].contains(u)).expect("adjacent");
        let cols: Vec<Vector> = s.simplices[a].iter().map(|&i| &s.vertices[i] - &s.vertices[u]).collect();
        if det_columns(&cols).abs() <= 1e-12 * column_scale(&cols)
            && !violations.iter().any(|x| x.kind == "coplanar" && x.simplices.contains(&a) && x.simplices.contains(&b))
        {
            violations.push(Violation { kind: "coplanar".into(), vertex: None, simplices: vec![a, b] });
        }
    }
    Ok(Certificate {
        certified: violations.is_empty(),
        sign: expected,
        margin: if interior.is_empty() { f64::INFINITY } else { margin },
        interior_vertices: interior.len(),
        reading,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub epsilon: f64,
    pub margin: f64,
    pub lipschitz: f64,
    pub trials: usize,
    pub passed: usize,
    /// Whether any of the trials at `10ε` failed certification.
    pub fails_at_ten: bool,
}

/// Every star determinant as its column norms.
fn determinant_columns(s: &SimplicialHypersurface, reading: LinkReading) -> Vec<Vec<f64>> {
    let boundary = s.boundary_vertices();
    let mut out = Vec::new();
    for v in 0..s.vertices.len() {
        if boundary.contains(&v) {
            continue;
        }
        let star: Vec<usize> = (0..s.simplices.len()).filter(|&k| s.simplices[k].contains(&v)).collect();
        for &k in &star {
            let sigma = &s.simplices[k];
            let link: BTreeSet<usize> = star
                .iter()
                .filter(|&&t| {
                    reading == LinkReading::AllLink
                        || s.simplices[t].iter().filter(|u| sigma.contains(u)).count() == sigma.len() - 1
                })
                .flat_map(|&t| s.simplices[t].iter().copied())
                .filter(|u| !sigma.contains(u))
                .collect();
            for u in link {
                out.push(sigma.iter().map(|&i| (&s.vertices[i] - &s.vertices[u]).norm()).collect());
            }
        }
    }
    out
}

/// Largest change of any star determinant when every vertex moves by at
/// most `eps`: columns move by at most `2ε`, so by multilinearity and
/// Hadamard's inequality the change is at most `∏(aⱼ+2ε) − ∏aⱼ`.
fn determinant_drift(cols: &[Vec<f64>], eps: f64) -> f64 {
    cols.iter()
        .map(|c| c.iter().map(|a| a + 2.0 * eps).product::<f64>() - c.iter().product::<f64>())
        .fold(0.0, f64::max)
}

fn perturb(s: &SimplicialHypersurface, rng: &mut ChaCha8Rng, size: f64) -> Result<SimplicialHypersurface> {
    let d = s.ambient_dim();
    let vs = s
        .vertices
        .iter()
        .map(|v| {
            let dir = loop {
                let g = Vector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
                let n = g.norm();
                if n > 1e-3 && n <= 1.0 {
                    break g / n;
                }
            };
            v + dir * size
        })
        .collect();
    s.with_vertices(vs)
}

fn passes(s: Result<SimplicialHypersurface>, reading: LinkReading) -> bool {
    s.and_then(|p| certify_generic_convex(&p, reading)).is_ok_and(|c| c.certified)
}

/// `perturbation_radius`: `ε = m*/(2B)` with `B` the first-order Lipschitz
/// bound `Σᵢ 2∏_{j≠i}‖cⱼ‖` maximized over determinants, halved until the
/// exact drift bound at `ε` stays below `m*`; then re-certified after 100
/// random displacements of size `0.9ε`.
pub fn perturbation_radius(s: &SimplicialHypersurface, reading: LinkReading, seed: u64) -> Result<PerturbationReport> {
    let cert = certify_generic_convex(s, reading)?;
    if !cert.certified {
        return Err(Error::NotCertified(format!("{} violations", cert.violations.len())));
    }
    let cols = determinant_columns(s, reading);
    if cols.is_empty() {
        return Err(Error::NotCertified("no interior vertices".into()));
    }
    let lipschitz = cols
        .iter()
        .map(|c| {
            (0..c.len())
                .map(|i| 2.0 * c.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, a)| a).product::<f64>())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    let margin = cert.margin;
    let mut epsilon = margin / (2.0 * lipschitz);
    while determinant_drift(&cols, epsilon) >= margin {
        epsilon *= 0.5;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = 100;
    let passed = (0..trials).filter(|_| passes(perturb(s, &mut rng, 0.9 * epsilon), reading)).count();
    let fails_at_ten = (0..20).any(|_| !passes(perturb(s, &mut rng, 10.0 * epsilon), reading));
    Ok(PerturbationReport { epsilon, margin, lipschitz, trials, passed, fails_at_ten })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutwardCheck {
    pub outward: bool,
    /// Smallest `t‖v‖ − ρ(v/‖v‖)` relative to `‖v‖`.
    pub min_margin: f64,
}

/// `outward_check`: every scaled vertex `t·v` lies strictly beyond `|S|`
/// along its ray.
pub fn outward_check(s: &SimplicialHypersurface, t: f64) -> Result<OutwardCheck> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("scale must be positive"));
    }
    radial_section_check(s)?;
    let mut min_margin = f64::INFINITY;
    for v in &s.vertices {
        let r = s
            .radial_function(v)
            .ok_or_else(|| invalid("vertex ray misses the complex"))?;
        min_margin = min_margin.min((t * v.norm() - r) / v.norm());
    }
    Ok(OutwardCheck { outward: min_margin > 1e-12, min_margin })
}

/// `log_contour_value`: `h(x) = −log α(x)` where `x/α(x) ∈ |S|`.
pub fn log_contour_value(s: &SimplicialHypersurface, x: &Vector) -> Result<f64> {
    if x.len() != s.ambient_dim() {
        return Err(invalid("point dimension does not match the complex"));
    }
    match s.locate(x) {
        Some((_, a)) if a > 0.0 => Ok(-a.ln()),
        _ => Err(invalid("point is outside the cone over the complex")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlSurface {
    pub surface: SimplicialHypersurface,
    pub certificate: Certificate,
    /// Largest relative radial gap to the exact surface at simplex
    /// barycenters and edge midpoints.
    pub deviation: f64,
    pub jitter_rounds: usize,
}

const OUTER_FRACTION: f64 = 0.85;
const MAX_JITTER_ROUNDS: usize = 12;

/// Chart sample points, with a triangulation when the chart is planar.
type ChartSamples = (Vec<Vector>, Option<Vec<[usize; 3]>>);

fn chart_samples(cone: &ConvexCone, budget: usize) -> Result<ChartSamples> {
    let omega = &cone.domain;
    let n = omega.dim();
    let c = omega.interior_point().clone();
    match n {
        1 => {
            if budget < 2 {
                return Err(Error::ApproximationFailure("budget below two directions".into()));
            }
            let right = omega.ray_exit(&c, &linalg::vector(&[1.0]));
            let left = omega.ray_exit(&c, &linalg::vector(&[-1.0]));
            let pts = (0..budget)
                .map(|i| {
                    let s = -1.0 + 2.0 * i as f64 / (budget - 1) as f64;
                    let r = if s < 0.0 { left } else { right };
                    linalg::vector(&[c[0] + OUTER_FRACTION * s * r])
                })
                .collect();
            Ok((pts, None))
        }
        2 => {
            let mut rings = 0;
            while 3 * (rings + 1) * (rings + 2) < budget {
                rings += 1;
            }
            if rings == 0 {
                return Err(Error::ApproximationFailure(format!("budget {budget} is too coarse for a ring triangulation")));
            }
            let mut pts = vec![c.clone()];
            let mut ring_idx: Vec<Vec<(usize, f64)>> = vec![vec![(0, 0.0)]];
            for j in 1..=rings {
                let m = 6 * j;
                let off = if j % 2 == 0 { 0.5 } else { 0.0 };
                let f = OUTER_FRACTION * j as f64 / rings as f64;
                let mut ring = Vec::with_capacity(m);
                for k in 0..m {
                    let th = 2.0 * std::f64::consts::PI * (k as f64 + off) / m as f64;
                    let u = linalg::vector(&[th.cos(), th.sin()]);
                    ring.push((pts.len(), th));
                    pts.push(&c + &u * (f * omega.ray_exit(&c, &u)));
                }
                ring_idx.push(ring);
            }
            let mut tris = Vec::new();
            for j in 1..=rings {
                let outer = &ring_idx[j];
                if j == 1 {
                    for k in 0..outer.len() {
                        tris.push([0, outer[k].0, outer[(k + 1) % outer.len()].0]);
                    }
                    continue;
                }
                let inner = &ring_idx[j - 1];
                let (ma, mb) = (inner.len(), outer.len());
                let ang = |r: &Vec<(usize, f64)>, i: usize, m: usize| r[i % m].1 + if i >= m { 2.0 * std::f64::consts::PI } else { 0.0 };
                let (mut i, mut o) = (0, 0);
                while i < ma || o < mb {
                    if o < mb && (i == ma || ang(outer, o + 1, mb) <= ang(inner, i + 1, ma)) {
                        tris.push([inner[i % ma].0, outer[o % mb].0, outer[(o + 1) % mb].0]);
                        o += 1;
                    } else {
                        tris.push([inner[i % ma].0, outer[o % mb].0, inner[(i + 1) % ma].0]);
                        i += 1;
                    }
                }
            }
            Ok((pts, Some(tris)))
        }
        _ => {
            let mut dirs: Vec<Vector> = Vec::new();
            for i in 0..n {
                for s in [1.0, -1.0] {
                    let mut e = Vector::zeros(n);
                    e[i] = s;
                    dirs.push(e);
                }
            }
            for mask in 0..1usize << n {
                dirs.push(Vector::from_fn(n, |i, _| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).normalize());
            }
            let rings = (budget.saturating_sub(1)) / dirs.len();
            if rings == 0 {
                return Err(Error::ApproximationFailure(format!("budget {budget} is too coarse in dimension {n}")));
            }
            let mut pts = vec![c.clone()];
            for j in 1..=rings {
                let f = OUTER_FRACTION * j as f64 / rings as f64;
                for u in &dirs {
                    pts.push(&c + u * (f * omega.ray_exit(&c, u)));
                }
            }
            Ok((pts, None))
        }
    }
}

/// Linear functional equal to 1 on the points of `tri`.
fn unit_functional(points: &[Vector], tri: &[usize]) -> Option<Vector> {
    let cols: Vec<Vector> = tri.iter().map(|&i| points[i].clone()).collect();
    linalg::columns(&cols).transpose().lu().solve(&Vector::from_element(tri.len(), 1.0))
}

fn orient2(chart: &[Vector], a: usize, b: usize, c: usize) -> f64 {
    let (p, q, r) = (&chart[a], &chart[b], &chart[c]);
    (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
}

/// Lawson flips toward the triangulation whose lift is convex away from the
/// origin.
fn lawson(chart: &[Vector], lifted: &[Vector], tris: &mut [[usize; 3]]) {
    for t in tris.iter_mut() {
        if orient2(chart, t[0], t[1], t[2]) < 0.0 {
            t.swap(1, 2);
        }
    }
    for _ in 0..100 * tris.len() {
        let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (k, t) in tris.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_default().push(k);
            }
        }
        let mut flipped = false;
        for ((a, b), ts) in edges {
            if ts.len() != 2 {
                continue;
            }
            let (t1, t2) = (tris[ts[0]], tris[ts[1]]);
            let c = *t1.iter().find(|&&x| x != a && x != b).expect("triangle");
            let d = *t2.iter().find(|&&x| x != a && x != b).expect("triangle");
            let Some(alpha) = unit_functional(lifted, &t1) else { continue };
            if alpha.dot(&lifted[d]) >= 1.0 - 1e-12 {
                continue;
            }
            let n1 = [c, a, d];
            let n2 = [c, d, b];
            let fix = |t: [usize; 3]| if orient2(chart, t[0], t[1], t[2]) < 0.0 { [t[0], t[2], t[1]] } else { t };
            let (n1, n2) = (fix(n1), fix(n2));
            let area = |t: [usize; 3]| orient2(chart, t[0], t[1], t[2]);
            let quad_convex = orient2(chart, c, d, a).signum() != orient2(chart, c, d, b).signum()
                && orient2(chart, c, d, a) != 0.0
                && orient2(chart, c, d, b) != 0.0;
            if !quad_convex || area(n1) <= 0.0 || area(n2) <= 0.0 {
                continue;
            }
            tris[ts[0]] = n1;
            tris[ts[1]] = n2;
            flipped = true;
            break;
        }
        if !flipped {
            return;
        }
    }
}

/// Faces of the hull of `lifted` that face the origin: `(n+1)`-subsets
/// whose unit functional is at least 1 on every point.
fn lower_hull(lifted: &[Vector]) -> Vec<Vec<usize>> {
    let d = lifted[0].len();
    let mut faces = Vec::new();
    combinations(lifted.len(), d, |idx| {
        if let Some(alpha) = unit_functional(lifted, idx) {
            if alpha.iter().all(|x| x.is_finite())
                && lifted.iter().all(|p| alpha.dot(p) >= 1.0 - 1e-12)
            {
                faces.push(idx.to_vec());
            }
        }
    });
    faces
}

/// `pl_characteristic_surface`: chart samples lifted onto the
/// characteristic hypersurface, triangulated by the direction-set
/// combinatorics, with radii jittered on coplanarity until certified.
pub fn pl_characteristic_surface(cone: &ConvexCone, budget: usize, seed: u64) -> Result<PlSurface> {
    let model = VolumeModel::new(cone)?;
    let chart = cone.domain.chart().clone();
    let (samples, initial) = chart_samples(cone, budget)?;
    let base: Vec<Vector> = samples
        .par_iter()
        .map(|x| model.characteristic_point(&chart.lift(x)))
        .collect::<Result<_>>()?;
    let n = cone.domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lifted = base.clone();
    let mut last = String::new();
    for round in 0..=MAX_JITTER_ROUNDS {
        if round > 0 {
            let eta = 1e-7 * 2f64.powi(round as i32 - 1);
            lifted = base.iter().map(|p| p * (1.0 + eta * rng.gen_range(-1.0..1.0))).collect();
        }
        let simplices: Vec<Vec<usize>> = match n {
            1 => (0..lifted.len() - 1).map(|i| vec![i, i + 1]).collect(),
            2 => {
                let mut tris = initial.clone().expect("ring triangulation");
                lawson(&samples, &lifted, &mut tris);
                tris.into_iter().map(|t| t.to_vec()).collect()
            }
            _ => lower_hull(&lifted),
        };
        let surface = match SimplicialHypersurface::new(lifted.clone(), simplices) {
            Ok(s) => s,
            Err(e) => {
                last = e.to_string();
                continue;
            }
        };
        match certify_generic_convex(&surface, LinkReading::AllLink) {
            Ok(cert) if cert.certified => {
                let deviation = radial_deviation(&model, &surface)?;
                return Ok(PlSurface { surface, certificate: cert, deviation, jitter_rounds: round });
            }
            Ok(cert) => last = format!("{} violations, first {:?}", cert.violations.len(), cert.violations.first()),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::ApproximationFailure(format!(
        "not certified after {MAX_JITTER_ROUNDS} jitter rounds: {last}"
    )))
}

fn radial_deviation(model: &VolumeModel, s: &SimplicialHypersurface) -> Result<f64> {
    let d = s.ambient_dim();
    let mut probes = Vec::new();
    for t in s.simplices() {
        let cols: Vec<&Vector> = t.iter().map(|&i| &s.vertices()[i]).collect();
        probes.push(cols.iter().fold(Vector::zeros(d), |a, c| a + *c) / d as f64);
        for i in 0..d {
            for j in i + 1..d {
                probes.push((cols[i] + cols[j]) * 0.5);
            }
        }
    }
    let gaps: Vec<f64> = probes
        .par_iter()
        .map(|w| {
            let u = w.normalize();
            let exact = model.characteristic_point(&u)?.norm();
            let pl = s.radial_function(&u).ok_or_else(|| invalid("probe ray misses the surface"))?;
            Ok((pl - exact).abs() / exact)
        })
        .collect::<Result<_>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ConvexDomain;
    use crate::linalg::vector;

    fn polyline(pts: &[[f64; 2]]) -> SimplicialHypersurface {
        let vs = pts.iter().map(|p| vector(p)).collect();
        let simplices = (0..pts.len() - 1).map(|i| vec![i, i + 1]).collect();
        SimplicialHypersurface::new(vs, simplices).unwrap()
    }

    fn vee() -> SimplicialHypersurface {
        polyline(&[[-1.0, 2.0], [0.0, 1.0], [1.0, 2.0]])
    }

    fn octahedron(r: f64) -> SimplicialHypersurface {
        let mut vs = Vec::new();
        for i in 0..3 {
            for s in [r, -r] {
                let mut e = Vector::zeros(3);
                e[i] = s;
                vs.push(e);
            }
        }
        let mut simplices = Vec::new();
        for a in [0, 1] {
            for b in [2, 3] {
                for c in [4, 5] {
                    simplices.push(vec![a, b, c]);
                }
            }
        }
        SimplicialHypersurface::new(vs, simplices).unwrap()
    }

    #[test]
    fn vee_star_determinants() {
        let s = vee();
        let cols = [vector(&[-2.0, 0.0]), vector(&[-1.0, -1.0])];
        assert_eq!(det_columns(&cols), 2.0);
        let vc = vertex_convexity(&s, 1, LinkReading::AllLink).unwrap();
        assert_eq!(vc.sign, 1);
        assert!((vc.margin - 2.0).abs() < 1e-14);
        assert!(radial_section_check(&s).unwrap().radial_section);
        assert!(certify_generic_convex(&s, LinkReading::AllLink).unwrap().certified);
    }

    #[test]
    fn radial_segment_fails_transversality() {
        let s = polyline(&[[0.0, 1.0], [1.0, 1.0], [2.0, 2.0]]);
        assert!(matches!(radial_section_check(&s), Err(Error::TransversalityFailure { .. })));
    }

    #[test]
    fn dented_polyline_is_rejected() {
        let s = polyline(&[[-2.0, 3.0], [-1.0, 2.0], [0.0, 2.5], [1.0, 2.0], [2.0, 3.0]]);
        let cert = certify_generic_convex(&s, LinkReading::AllLink).unwrap();
        assert!(!cert.certified);
        assert!(cert.violations.iter().any(|v| v.vertex == Some(2)));
    }

    #[test]
    fn octahedron_is_closed_and_convex() {
        let s = octahedron(1.0);
        assert!(s.is_closed());
        assert!(radial_section_check(&s).unwrap().radial_section);
        let cert = certify_generic_convex(&s, LinkReading::AllLink).unwrap();
        assert!(cert.certified && cert.sign == -1);
        assert!(outward_check(&s, 2.0).unwrap().outward);
        assert!(!outward_check(&s, 1.0).unwrap().outward);
    }

    #[test]
    fn vee_outward_and_contour() {
        let s = vee();
        assert!(outward_check(&s, 1.5).unwrap().outward);
        assert!(!outward_check(&s, 1.0).unwrap().outward);
        let x0 = vector(&[0.5, 1.5]);
        assert!(log_contour_value(&s, &x0).unwrap().abs() < 1e-15);
        let e = std::f64::consts::E;
        assert!((log_contour_value(&s, &(&x0 * e)).unwrap() + 1.0).abs() < 1e-14);
        assert!(log_contour_value(&s, &vector(&[1.0, -1.0])).is_err());
    }

    #[test]
    fn vee_perturbation_radius_scales() {
        let s = vee();
        let r1 = perturbation_radius(&s, LinkReading::AllLink, 7).unwrap();
        assert!(r1.epsilon > 0.0 && r1.passed == r1.trials);
        let s2 = s.map_vertices(&(Matrix::identity(2, 2) * 2.0)).unwrap();
        let r2 = perturbation_radius(&s2, LinkReading::AllLink, 7).unwrap();
        assert!((r2.epsilon / r1.epsilon - 2.0).abs() < 1e-12);
    }

    #[test]
    fn flat_pair_is_coplanar() {
        let vs = vec![
            vector(&[0.0, 0.0, 1.0]),
            vector(&[1.0, 0.0, 1.0]),
            vector(&[0.0, 1.0, 1.0]),
            vector(&[1.0, 1.0, 1.0]),
        ];
        let s = SimplicialHypersurface::new(vs, vec![vec![0, 1, 2], vec![1, 3, 2]]).unwrap();
        let cert = certify_generic_convex(&s, LinkReading::AllLink).unwrap();
        assert!(cert.violations.iter().any(|v| v.kind == "coplanar"));
        assert!(perturbation_radius(&s, LinkReading::AllLink, 1).is_err());
    }

    #[test]
    fn orthant_polyline_on_hyperbola() {
        let cone = ConvexCone::new(ConvexDomain::orthant(1));
        let pl = pl_characteristic_surface(&cone, 16, 0).unwrap();
        assert_eq!(pl.surface.vertices().len(), 16);
        for v in pl.surface.vertices() {
            assert!((v[0] * v[1] - 0.5).abs() < 1e-8);
        }
        assert!(pl.certificate.certified);
    }

    #[test]
    fn round_cone_surface_certifies() {
        let cone = ConvexCone::new(ConvexDomain::unit_disk());
        let coarse = pl_characteristic_surface(&cone, 64, 0).unwrap();
        let fine = pl_characteristic_surface(&cone, 128, 0).unwrap();
        assert!(coarse.certificate.certified && fine.certificate.certified);
        assert!(fine.deviation < coarse.deviation);
        assert!(pl_characteristic_surface(&cone, 2, 0).is_err());
    }
}

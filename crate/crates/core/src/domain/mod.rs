//! Properly-convex domains in affine charts, with polytope, ellipsoid and
//! radial-graph backends.
//!
//! A domain is stored in chart coordinates together with the chart. The cone
//! over the domain is the set of homogeneous vectors `X` with `⟨H∞,X⟩ > 0`
//! whose chart coordinates lie in the domain.

mod ellipsoid;
mod json;
mod polytope;
mod radial;

pub use ellipsoid::Ellipsoid;
pub use json::{BackendSpec, DomainSpec, HalfspaceSpec};
pub use polytope::{Facet, Polytope};
pub use radial::RadialGraph;

pub(crate) use polytope::{affine_rank, combinations};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::projgeom::{dual_apply, AffineChart, DualFunctional, ProjPoint, ProjTransform};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    HPoly(Polytope),
    VPoly(Polytope),
    Ellipsoid(Ellipsoid),
    RadialGraph(RadialGraph),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::HPoly(_) => "hpoly",
            Backend::VPoly(_) => "vpoly",
            Backend::Ellipsoid(_) => "ellipsoid",
            Backend::RadialGraph(_) => "radialgraph",
        }
    }
}

/// A properly-convex open set in an affine chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDomain {
    chart: AffineChart,
    backend: Backend,
    interior: Vector,
}

/// The cone over a domain; a thin wrapper kept for readability of cone-level
/// APIs.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCone {
    pub domain: ConvexDomain,
}

impl ConvexCone {
    pub fn new(domain: ConvexDomain) -> Self {
        Self { domain }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Whether the homogeneous vector `v` lies in the open cone.
    pub fn contains(&self, v: &Vector) -> bool {
        self.domain.cone_margin(v) > 0.0
    }

    pub fn dual(&self) -> Result<ConvexCone> {
        Ok(ConvexCone::new(self.domain.dual_domain()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Containment {
    pub location: Location,
    /// Positive inside, negative outside.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProperConvexityCertificate {
    /// A hyperplane whose kernel misses the closure.
    pub hyperplane: DualFunctional,
    /// Reciprocal of the bounding radius in the chart of `hyperplane`.
    pub margin: f64,
    pub bounding_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chord {
    pub a_minus: ProjPoint,
    pub a_plus: ProjPoint,
    /// Chart coordinates of the endpoints.
    pub chart_minus: Vector,
    pub chart_plus: Vector,
}

/// A maximal flat piece of the frontier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flat {
    /// Chart coordinates of the piece's vertices.
    pub vertices: Vec<Vec<f64>>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl ConvexDomain {
    fn assemble(chart: AffineChart, backend: Backend, interior: Option<Vector>) -> Result<Self> {
        let mut d = Self { chart, interior: Vector::zeros(0), backend };
        let default = match &d.backend {
            Backend::HPoly(p) | Backend::VPoly(p) => p.vertex_centroid(),
            Backend::Ellipsoid(e) => e.center.clone(),
            Backend::RadialGraph(g) => g.center.clone(),
        };
        d.interior = match interior {
            Some(x) if d.margin(&x) > 0.0 => x,
            _ => default,
        };
        if d.margin(&d.interior) <= 0.0 {
            return Err(Error::DegenerateDomain("no interior point".into()));
        }
        Ok(d)
    }

    fn check_chart(chart: &AffineChart, n: usize) -> Result<()> {
        if chart.dim() != n {
            return Err(invalid("chart dimension does not match backend data"));
        }
        Ok(())
    }

    /// `{x : normal_i·x < offset_i}` in `chart`.
    pub fn from_halfspaces(chart: AffineChart, halfspaces: &[(Vector, f64)]) -> Result<Self> {
        let n = chart.dim();
        let p = Polytope::from_halfspaces(n, halfspaces)?;
        Self::assemble(chart, Backend::HPoly(p), None)
    }

    /// Interior of the convex hull of `vertices` in `chart`.
    pub fn from_vertices(chart: AffineChart, vertices: &[Vector]) -> Result<Self> {
        let n = chart.dim();
        let p = Polytope::from_vertices(n, vertices)?;
        Self::assemble(chart, Backend::VPoly(p), None)
    }

    pub fn ellipsoid(chart: AffineChart, center: Vector, shape: Matrix) -> Result<Self> {
        Self::check_chart(&chart, center.len())?;
        Self::assemble(chart, Backend::Ellipsoid(Ellipsoid::new(center, shape)?), None)
    }

    pub fn radial_graph(
        chart: AffineChart,
        center: Vector,
        directions: Vec<Vector>,
        radii: Vec<f64>,
        simplices: Vec<Vec<usize>>,
    ) -> Result<Self> {
        Self::check_chart(&chart, center.len())?;
        let g = RadialGraph::new(center, directions, radii, simplices)?;
        Self::assemble(chart, Backend::RadialGraph(g), None)
    }

    /// Projective simplex spanned by homogeneous vectors, in `chart`.
    pub fn from_projective_vertices(chart: AffineChart, points: &[Vector]) -> Result<Self> {
        let pts = points.iter().map(|p| chart.coords_of(p)).collect::<Result<Vec<_>>>()?;
        Self::from_vertices(chart, &pts)
    }

    /// The Klein model: unit disk in the standard chart.
    pub fn unit_disk() -> Self {
        Self::ball(2, 1.0)
    }

    pub fn ball(n: usize, radius: f64) -> Self {
        Self::ellipsoid(
            AffineChart::standard(n),
            Vector::zeros(n),
            Matrix::identity(n, n) * (radius * radius),
        )
        .expect("ball is valid")
    }

    /// The cube `(−h,h)^n` in the standard chart.
    pub fn cube(n: usize, half: f64) -> Self {
        let mut hs = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = Vector::zeros(n);
            e[i] = 1.0;
            hs.push((e.clone(), half));
            hs.push((-e, half));
        }
        Self::from_halfspaces(AffineChart::standard(n), &hs).expect("cube is valid")
    }

    /// Projectivized positive orthant of R^{n+1}, in the chart whose pole is
    /// `(1,…,1)/√(n+1)`.
    pub fn orthant(n: usize) -> Self {
        let chart = AffineChart::new(
            DualFunctional::new(Vector::from_element(n + 1, 1.0)).expect("nonzero"),
        );
        let basis: Vec<Vector> = (0..=n)
            .map(|i| Vector::from_fn(n + 1, |k, _| if k == i { 1.0 } else { 0.0 }))
            .collect();
        Self::from_projective_vertices(chart, &basis).expect("orthant is valid")
    }

    pub fn chart(&self) -> &AffineChart {
        &self.chart
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Chart coordinates of the stored interior point.
    pub fn interior_point(&self) -> &Vector {
        &self.interior
    }

    pub fn interior_proj(&self) -> ProjPoint {
        self.chart.point(&self.interior)
    }

    /// Signed chart-level containment margin: Euclidean distance to the
    /// nearest facet hyperplane for polytopes and radial graphs, `1 − gauge`
    /// for ellipsoids.
    pub fn margin(&self, x: &Vector) -> f64 {
        match &self.backend {
            Backend::HPoly(p) | Backend::VPoly(p) => p.margin(x),
            Backend::Ellipsoid(e) => e.margin(x),
            Backend::RadialGraph(g) => g.margin(x),
        }
    }

    /// Margin of a homogeneous vector; `-∞` on the wrong side of the chart.
    pub fn cone_margin(&self, v: &Vector) -> f64 {
        if self.chart.pole().dot(v) <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match self.chart.coords_of(v) {
            Ok(x) => self.margin(&x),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    pub fn contains_chart(&self, x: &Vector) -> Containment {
        let margin = self.margin(x);
        let location = if margin.abs() <= tol::BOUNDARY_BAND {
            Location::Boundary
        } else if margin > 0.0 {
            Location::Inside
        } else {
            Location::Outside
        };
        Containment { location, margin }
    }

    /// `contains`: classification of a projective point (either
    /// representative).
    pub fn contains(&self, p: &ProjPoint) -> Containment {
        match self.chart.to_chart(p) {
            Ok(x) => self.contains_chart(&x),
            Err(_) => Containment { location: Location::Outside, margin: f64::NEG_INFINITY },
        }
    }

    /// Chart coordinates of a projective point that must be inside.
    pub fn inside_coords(&self, p: &ProjPoint) -> Result<Vector> {
        let x = self.chart.to_chart(p).map_err(|_| invalid("point lies at infinity of the chart"))?;
        if self.margin(&x) <= 0.0 {
            return Err(invalid("point is not inside the domain"));
        }
        Ok(x)
    }

    /// Largest `t` with `x + t·d` in the closure, for `x` inside.
    pub fn ray_exit(&self, x: &Vector, d: &Vector) -> f64 {
        match &self.backend {
            Backend::HPoly(p) | Backend::VPoly(p) => p.ray_exit(x, d),
            Backend::Ellipsoid(e) => e.ray_exit(x, d),
            Backend::RadialGraph(g) => g.ray_exit(x, d),
        }
    }

    /// Parameters `t₋ < 0 < 1 < t₊` of the chord endpoints on the line
    /// `x + t(y−x)`, for distinct chart points inside.
    pub fn chord_params(&self, x: &Vector, y: &Vector) -> Result<(f64, f64)> {
        let d = y - x;
        if d.amax() <= tol::EXACT * (1.0 + x.amax()) {
            return Err(Error::DegenerateChord);
        }
        let tp = self.ray_exit(x, &d);
        let tm = -self.ray_exit(x, &(-&d));
        Ok((tm, tp))
    }

    /// `chord`: frontier points of the line through `x` and `y`, with
    /// `x → y` pointing toward `a_plus`.
    pub fn chord(&self, x: &ProjPoint, y: &ProjPoint) -> Result<Chord> {
        let xc = self.inside_coords(x)?;
        let yc = self.inside_coords(y)?;
        let (tm, tp) = self.chord_params(&xc, &yc)?;
        let d = &yc - &xc;
        let chart_minus = &xc + &d * tm;
        let chart_plus = &xc + &d * tp;
        Ok(Chord {
            a_minus: self.chart.point(&chart_minus),
            a_plus: self.chart.point(&chart_plus),
            chart_minus,
            chart_plus,
        })
    }

    fn frontier_tolerance(&self, b: &Vector) -> f64 {
        tol::FRONTIER * (1.0 + b.amax())
    }

    /// Outward unit normal and offset of the canonical supporting halfspace
    /// at a frontier chart point.
    pub fn support_chart(&self, b: &Vector) -> Result<(Vector, f64)> {
        let m = self.margin(b);
        if m.abs() > self.frontier_tolerance(b) {
            return Err(Error::NotOnFrontier { margin: m });
        }
        let normal = match &self.backend {
            Backend::Ellipsoid(e) => e.normal_at(b),
            _ => {
                let all = self.supporting_normals(b);
                let mut s = Vector::zeros(self.dim());
                for (n, _) in &all {
                    s += n;
                }
                s.normalize()
            }
        };
        let offset = normal.dot(b);
        Ok((normal, offset))
    }

    fn supporting_normals(&self, b: &Vector) -> Vec<(Vector, f64)> {
        let tol = self.frontier_tolerance(b);
        match &self.backend {
            Backend::HPoly(p) | Backend::VPoly(p) => p
                .tight_facets(b, tol)
                .into_iter()
                .map(|i| (p.facets[i].normal.clone(), p.facets[i].offset))
                .collect(),
            Backend::RadialGraph(g) => {
                let mut out: Vec<(Vector, f64)> = Vec::new();
                for (n, o) in &g.facets {
                    if (o - n.dot(b)).abs() <= tol && !out.iter().any(|(m, _)| (m - n).amax() < 1e-9) {
                        out.push((n.clone(), *o));
                    }
                }
                out
            }
            Backend::Ellipsoid(e) => {
                let n = e.normal_at(b);
                let o = n.dot(b);
                vec![(n, o)]
            }
        }
    }

    /// `support`: supporting hyperplane at a frontier point, oriented to be
    /// positive on the domain. At polytope vertices the normalized average of
    /// the adjacent facet normals is used.
    pub fn support(&self, b: &ProjPoint) -> Result<DualFunctional> {
        let bc = self.chart.to_chart(b)?;
        let (n, o) = self.support_chart(&bc)?;
        DualFunctional::new(self.chart.functional_of_halfspace(&n, o))
    }

    /// Every facet hyperplane through `b`; a single tangent for ellipsoids.
    pub fn supporting_facets(&self, b: &ProjPoint) -> Result<Vec<DualFunctional>> {
        let bc = self.chart.to_chart(b)?;
        let m = self.margin(&bc);
        if m.abs() > self.frontier_tolerance(&bc) {
            return Err(Error::NotOnFrontier { margin: m });
        }
        self.supporting_normals(&bc)
            .into_iter()
            .map(|(n, o)| DualFunctional::new(self.chart.functional_of_halfspace(&n, o)))
            .collect()
    }

    /// `h(u) = sup_{x∈Ω} u·x` in chart coordinates.
    pub fn support_function(&self, u: &Vector) -> f64 {
        match &self.backend {
            Backend::HPoly(p) | Backend::VPoly(p) => p.support_function(u),
            Backend::Ellipsoid(e) => e.support_function(u),
            Backend::RadialGraph(g) => g.support_function(u),
        }
    }

    /// Chart points whose convex hull is the closure; `None` for ellipsoids.
    pub fn extreme_points(&self) -> Option<Vec<Vector>> {
        match &self.backend {
            Backend::HPoly(p) | Backend::VPoly(p) => Some(p.vertices.clone()),
            Backend::RadialGraph(g) => Some(g.vertices()),
            Backend::Ellipsoid(_) => None,
        }
    }

    /// Homogeneous quadric of an ellipsoid backend.
    pub fn quadric(&self) -> Option<Matrix> {
        match &self.backend {
            Backend::Ellipsoid(e) => Some(e.quadric(&self.chart)),
            _ => None,
        }
    }

    /// Decomposition of the closure into chart simplices of `n+1` points;
    /// `None` for ellipsoids.
    pub fn simplices(&self) -> Option<Vec<Vec<Vector>>> {
        match &self.backend {
            Backend::HPoly(p) | Backend::VPoly(p) => Some(p.triangulate()),
            Backend::RadialGraph(g) => Some(g.cone_simplices()),
            Backend::Ellipsoid(_) => None,
        }
    }

    /// Largest chart norm of a point of the closure (an upper bound for
    /// off-center ellipsoids).
    pub fn bounding_radius(&self) -> f64 {
        match &self.backend {
            Backend::Ellipsoid(e) => e.radius_bound(),
            _ => self
                .extreme_points()
                .expect("polyhedral")
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max),
        }
    }

    /// `validate`: the chart hyperplane at infinity certifies proper
    /// convexity since every backend is bounded in its chart. Unbounded or
    /// non-convex data are rejected at construction.
    pub fn validate(&self) -> Result<ProperConvexityCertificate> {
        let r = self.bounding_radius();
        if !r.is_finite() {
            return Err(Error::NotProperlyConvex {
                reason: "domain is unbounded in its chart".into(),
                witness: vec![],
            });
        }
        Ok(ProperConvexityCertificate {
            hyperplane: self.chart.infinity().clone(),
            margin: 1.0 / r.max(f64::MIN_POSITIVE),
            bounding_radius: r,
        })
    }

    /// Re-expresses `m·Ω` in `chart`.
    fn map_to(&self, m: &Matrix, chart: AffineChart) -> Result<Self> {
        let to_target = |x: &Vector| -> Result<Vector> {
            let v = m * self.chart.lift(x);
            if chart.pole().dot(&v) <= tol::EXACT * v.norm() {
                return Err(Error::NotProperlyConvex {
                    reason: "image meets the hyperplane at infinity of the target chart".into(),
                    witness: v.iter().copied().collect(),
                });
            }
            chart.coords_of(&v)
        };
        let interior = to_target(&self.interior)?;
        let backend = match &self.backend {
            Backend::HPoly(p) => {
                for v in &p.vertices {
                    to_target(v)?;
                }
                let minv_t = m
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| invalid("singular transform"))?
                    .transpose();
                let hs: Vec<(Vector, f64)> = p
                    .facets
                    .iter()
                    .map(|f| {
                        let psi = &minv_t * self.chart.functional_of_halfspace(&f.normal, f.offset);
                        chart.halfspace_of_functional(&psi)
                    })
                    .collect();
                Backend::HPoly(Polytope::from_halfspaces(chart.dim(), &hs)?)
            }
            Backend::VPoly(p) => {
                let vs = p.vertices.iter().map(to_target).collect::<Result<Vec<_>>>()?;
                Backend::VPoly(Polytope::from_vertices(chart.dim(), &vs)?)
            }
            Backend::Ellipsoid(e) => {
                let minv = m.clone().try_inverse().ok_or_else(|| invalid("singular transform"))?;
                let q = minv.transpose() * e.quadric(&self.chart) * &minv;
                Backend::Ellipsoid(Ellipsoid::from_quadric(&q, &chart)?)
            }
            Backend::RadialGraph(g) => {
                let c = to_target(&g.center)?;
                let mut dirs = Vec::with_capacity(g.directions.len());
                let mut radii = Vec::with_capacity(g.directions.len());
                for j in 0..g.directions.len() {
                    let d = to_target(&g.vertex(j))? - &c;
                    radii.push(d.norm());
                    dirs.push(d);
                }
                Backend::RadialGraph(RadialGraph::new(c, dirs, radii, g.simplices.clone())?)
            }
        };
        Self::assemble(chart, backend, Some(interior))
    }

    /// `A·Ω`, expressed in the chart whose hyperplane at infinity is the image
    /// of this domain's.
    pub fn transform(&self, a: &ProjTransform) -> Result<Self> {
        let chart = AffineChart::new(dual_apply(a, self.chart.infinity()));
        self.map_to(a.matrix(), chart)
    }

    /// The same projective set in another chart.
    pub fn rechart(&self, infinity: &DualFunctional) -> Result<Self> {
        let d = self.dim() + 1;
        self.map_to(&Matrix::identity(d, d), AffineChart::new(infinity.clone()))
    }

    /// `dual_domain`: the projectivized dual cone. The dual chart's hyperplane
    /// at infinity is the unit vector of this domain's interior point, and the
    /// dual's interior point is this chart's pole, so dualizing twice returns
    /// to the original chart.
    pub fn dual_domain(&self) -> Result<Self> {
        self.validate()?;
        let y = self.chart.lift(&self.interior);
        let chart = AffineChart::new(DualFunctional::new(y.clone())?);
        let pole_star = chart.coords_of(self.chart.pole())?;
        let backend = match &self.backend {
            Backend::HPoly(p) => {
                let vs = p
                    .facets
                    .iter()
                    .map(|f| chart.coords_of(&self.chart.functional_of_halfspace(&f.normal, f.offset)))
                    .collect::<Result<Vec<_>>>()?;
                Backend::VPoly(Polytope::from_vertices(self.dim(), &vs)?)
            }
            Backend::VPoly(p) => {
                let hs: Vec<(Vector, f64)> = p
                    .vertices
                    .iter()
                    .map(|v| chart.halfspace_of_functional(&self.chart.lift(v)))
                    .collect();
                Backend::HPoly(Polytope::from_halfspaces(self.dim(), &hs)?)
            }
            Backend::Ellipsoid(e) => {
                let q = e.quadric(&self.chart);
                let qi = q.try_inverse().ok_or_else(|| Error::DegenerateDomain("singular quadric".into()))?;
                Backend::Ellipsoid(Ellipsoid::from_quadric(&qi, &chart)?)
            }
            Backend::RadialGraph(g) => return self.radial_dual(g, chart, pole_star),
        };
        Self::assemble(chart, backend, Some(pole_star))
    }

    /// Samples the dual frontier along the primal direction set: the radius
    /// in direction `d` is the largest `t` keeping `lift*(c* + t·d)` positive
    /// on every primal vertex.
    fn radial_dual(&self, g: &RadialGraph, chart: AffineChart, center: Vector) -> Result<Self> {
        let lifts: Vec<Vector> = g.vertices().iter().map(|v| self.chart.lift(v)).collect();
        let base = chart.lift(&center);
        let mut radii = Vec::with_capacity(g.directions.len());
        for d in &g.directions {
            let step = chart.frame() * d;
            let t = lifts
                .iter()
                .filter_map(|x| {
                    let a = base.dot(x);
                    let b = step.dot(x);
                    (b < 0.0).then(|| -a / b)
                })
                .fold(f64::INFINITY, f64::min);
            if !t.is_finite() {
                return Err(Error::NotProperlyConvex {
                    reason: "sampled dual is unbounded".into(),
                    witness: d.iter().copied().collect(),
                });
            }
            radii.push(t);
        }
        match RadialGraph::new(center.clone(), g.directions.clone(), radii.clone(), g.simplices.clone()) {
            Ok(r) => Self::assemble(chart, Backend::RadialGraph(r), Some(center)),
            Err(_) => {
                let pts: Vec<Vector> = g.directions.iter().zip(&radii).map(|(d, r)| &center + d * *r).collect();
                Self::assemble(
                    chart,
                    Backend::VPoly(Polytope::from_vertices(self.dim(), &pts)?),
                    Some(center),
                )
            }
        }
    }

    /// `boundary_flats`: facets for polytopes, nothing for ellipsoids, and
    /// merged coplanar simplices meeting more than `n` surface vertices for
    /// radial graphs.
    pub fn boundary_flats(&self) -> Vec<Flat> {
        let to_vec = |v: &Vector| v.iter().copied().collect::<Vec<f64>>();
        match &self.backend {
            Backend::HPoly(p) | Backend::VPoly(p) => p
                .facets
                .iter()
                .map(|f| Flat {
                    vertices: f.vertices.iter().map(|&i| to_vec(&p.vertices[i])).collect(),
                    normal: to_vec(&f.normal),
                    offset: f.offset,
                })
                .collect(),
            Backend::Ellipsoid(_) => vec![],
            Backend::RadialGraph(g) => {
                let verts = g.vertices();
                let scale = verts.iter().map(|v| v.amax()).fold(1.0, f64::max);
                let mut flats: Vec<Flat> = Vec::new();
                for (n, o) in &g.facets {
                    let tight: Vec<&Vector> =
                        verts.iter().filter(|v| (o - n.dot(v)).abs() <= 1e-9 * scale).collect();
                    if tight.len() <= g.dim() {
                        continue;
                    }
                    let nv = to_vec(n);
                    if flats
                        .iter()
                        .any(|f| (f.offset - o).abs() <= 1e-9 * scale && f.normal.iter().zip(&nv).all(|(a, b)| (a - b).abs() < 1e-9))
                    {
                        continue;
                    }
                    flats.push(Flat { vertices: tight.into_iter().map(to_vec).collect(), normal: nv, offset: *o });
                }
                flats
            }
        }
    }

    /// JSON-serializable description.
    pub fn to_spec(&self) -> DomainSpec {
        let v = |x: &Vector| x.iter().copied().collect::<Vec<f64>>();
        let backend = match &self.backend {
            Backend::HPoly(p) => BackendSpec::Hpoly {
                halfspaces: p
                    .facets
                    .iter()
                    .map(|f| HalfspaceSpec { normal: v(&f.normal), offset: f.offset })
                    .collect(),
            },
            Backend::VPoly(p) => BackendSpec::Vpoly { vertices: p.vertices.iter().map(v).collect() },
            Backend::Ellipsoid(e) => BackendSpec::Ellipsoid { center: v(&e.center), shape: linalg::to_rows(&e.shape) },
            Backend::RadialGraph(g) => BackendSpec::Radialgraph {
                center: v(&g.center),
                directions: g.directions.iter().map(v).collect(),
                radii: g.radii.clone(),
                simplices: g.simplices.clone(),
            },
        };
        DomainSpec { chart: v(self.chart.pole()), backend }
    }
}

#[cfg(test)]
mod tests;

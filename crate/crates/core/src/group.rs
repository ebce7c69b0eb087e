//! Automorphisms of a domain: membership, hyperbolic dynamics, orbits and
//! polyhedral fundamental domains cut out of a slice of the cone.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Backend, Chord, ConvexCone, ConvexDomain};
use crate::error::{invalid, Error, Result};
use crate::hilbert;
use crate::linalg::{self, Matrix, Vector};
use crate::normalize::{reduced_words, word_label};
use crate::projgeom::{AffineChart, DualFunctional, ProjPoint, ProjTransform};
use crate::vinberg::VolumeModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AutomorphismCheck {
    pub is_automorphism: bool,
    pub residual: f64,
}

/// `is_automorphism`. Polytopes: the vertex set is permuted. Ellipsoids:
/// `AᵀMA = cM` with `c > 0`. Radial graphs: support functions agree at the
/// direction set.
pub fn is_automorphism(omega: &ConvexDomain, a: &ProjTransform, tol: f64) -> Result<AutomorphismCheck> {
    if a.dim() != omega.dim() + 1 {
        return Err(invalid("transform dimension does not match the domain"));
    }
    let no = AutomorphismCheck { is_automorphism: false, residual: f64::INFINITY };
    let chart = omega.chart();
    match omega.backend() {
        Backend::Ellipsoid(_) => {
            let m = omega.quadric().expect("ellipsoid");
            let image = a.matrix().transpose() * &m * a.matrix();
            let c = image.dot(&m) / m.dot(&m);
            let residual = (&image - &m * c).norm() / m.norm();
            Ok(AutomorphismCheck { is_automorphism: c > 0.0 && residual <= tol, residual })
        }
        Backend::HPoly(p) | Backend::VPoly(p) => {
            let scale = 1.0 + p.vertices.iter().map(|v| v.amax()).fold(0.0, f64::max);
            let mut used = vec![false; p.vertices.len()];
            let mut residual: f64 = 0.0;
            for v in &p.vertices {
                let Ok(w) = chart.coords_of(&(a.matrix() * chart.lift(v))) else {
                    return Ok(no);
                };
                let (j, d) = p
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(j, u)| (j, (u - &w).amax() / scale))
                    .min_by(|x, y| x.1.total_cmp(&y.1))
                    .expect("nonempty vertex set");
                if used[j] {
                    return Ok(no);
                }
                used[j] = true;
                residual = residual.max(d);
            }
            Ok(AutomorphismCheck { is_automorphism: residual <= tol, residual })
        }
        Backend::RadialGraph(g) => {
            let Ok(image) = omega.transform(a).and_then(|d| d.rechart(chart.infinity())) else {
                return Ok(no);
            };
            let scale = omega.bounding_radius().max(1.0);
            let residual = g
                .directions
                .iter()
                .map(|u| (omega.support_function(u) - image.support_function(u)).abs() / scale)
                .fold(0.0, f64::max);
            Ok(AutomorphismCheck { is_automorphism: residual <= tol, residual })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicData {
    pub a_plus: ProjPoint,
    pub a_minus: ProjPoint,
    pub axis: Chord,
    /// Infimum of `d(x, Ax)` over the axis.
    pub translation_length: f64,
    /// `½ log(λ_max/λ_min)`.
    pub spectral_length: f64,
    /// `|λ₁|/|λ₂|` for the dominant eigenvalue.
    pub eigenvalue_gap: f64,
    /// Projective distance between the power-iteration and eigensolver
    /// attracting points.
    pub power_residual: f64,
}

/// Unit eigenvector of the simple dominant eigenvalue, oriented toward
/// `start` by power iteration.
fn dominant(a: &Matrix, start: &Vector) -> Result<(Vector, f64, f64, f64)> {
    let eig = a.clone().complex_eigenvalues();
    let mut mods: Vec<(f64, f64, f64)> = eig.iter().map(|l| (l.norm(), l.re, l.im)).collect();
    mods.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (top, re, im) = mods[0];
    let second = mods[1].0;
    if im.abs() > 1e-9 * top || top - second <= 1e-9 * top {
        return Err(Error::NotHyperbolic("extreme eigenvalue is not simple and real".into()));
    }
    let d = a.nrows();
    let ns = linalg::null_space(&(a - Matrix::identity(d, d) * re), 1e-9);
    let mut e = ns.first().cloned().ok_or_else(|| Error::NotHyperbolic("no real eigenvector".into()))?;
    let mut v = start.normalize();
    let steps = ((40.0 / (top / second).ln()).ceil() as usize).clamp(50, 100_000);
    for _ in 0..steps {
        v = (a * &v).normalize();
    }
    if e.dot(&v) < 0.0 {
        e = -e;
    }
    let power_residual = (&e - &v).norm().min((&e + &v).norm());
    Ok((e, re.abs(), top / second, power_residual))
}

/// `fixed_point_dynamics`. Eigenvectors are oriented by iterating from the
/// interior point, so both fixed points are frontier points of the cone.
pub fn fixed_point_dynamics(omega: &ConvexDomain, a: &ProjTransform) -> Result<HyperbolicData> {
    let chart = omega.chart();
    let x0 = chart.lift(omega.interior_point());
    let (plus, lmax, gap, power_residual) = dominant(a.matrix(), &x0)?;
    let (minus, linv, _, _) = dominant(a.inverse().matrix(), &x0)?;
    let on_frontier = |v: &Vector| -> Result<Vector> {
        let c = chart
            .coords_of(v)
            .map_err(|_| Error::AutomorphismInconsistency("fixed point at infinity".into()))?;
        let scale = 1.0 + c.amax();
        if omega.margin(&c).abs() > 1e-7 * scale {
            return Err(Error::AutomorphismInconsistency(format!(
                "fixed point has margin {:e}",
                omega.margin(&c)
            )));
        }
        Ok(c)
    };
    let cp = on_frontier(&plus)?;
    let cm = on_frontier(&minus)?;
    let axis = Chord {
        a_minus: ProjPoint::from_signed(minus)?,
        a_plus: ProjPoint::from_signed(plus)?,
        chart_minus: cm.clone(),
        chart_plus: cp.clone(),
    };
    let displacement = |s: f64| -> f64 {
        let x = &cm + (&cp - &cm) * s;
        match chart.coords_of(&(a.matrix() * chart.lift(&x))) {
            Ok(y) => hilbert::distance_chart(omega, &x, &y).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };
    let (mut lo, mut hi) = (0.05, 0.95);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let (mut fc, mut fd) = (displacement(c), displacement(d));
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = displacement(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = displacement(d);
        }
    }
    let samples = (0..=16).map(|k| displacement(0.05 + 0.9 * k as f64 / 16.0));
    let translation_length = samples.fold(fc.min(fd), f64::min);
    Ok(HyperbolicData {
        a_plus: axis.a_plus.clone(),
        a_minus: axis.a_minus.clone(),
        axis,
        translation_length,
        spectral_length: 0.5 * (lmax * linv).ln(),
        eigenvalue_gap: gap,
        power_residual,
    })
}

/// Smallest `k ≤ max_steps` with chart distance `|Aᵏx − a₊| < tol`.
pub fn convergence_steps(omega: &ConvexDomain, a: &ProjTransform, x: &Vector, a_plus: &Vector, tol: f64, max_steps: usize) -> Option<usize> {
    let chart = omega.chart();
    let target = chart.coords_of(a_plus).ok()?;
    let mut v = chart.lift(x).normalize();
    for k in 0..=max_steps {
        if let Ok(c) = chart.coords_of(&v) {
            if (c - &target).norm() < tol {
                return Some(k);
            }
        }
        v = (a.matrix() * v).normalize();
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPoint {
    pub word: String,
    pub point: ProjPoint,
}

fn words_with_identity(k: usize, max_len: usize) -> Vec<Vec<(usize, bool)>> {
    let mut all = vec![vec![]];
    if max_len > 0 && k > 0 {
        all.extend(reduced_words(k, max_len));
    }
    all
}

fn word_matrix(gens: &[ProjTransform], inverses: &[ProjTransform], word: &[(usize, bool)], d: usize) -> Matrix {
    word.iter().fold(Matrix::identity(d, d), |m, &(g, inv)| {
        m * if inv { inverses[g].matrix() } else { gens[g].matrix() }
    })
}

/// `orbit`: images of `seed` under reduced words of length ≤ `max_len`, in
/// enumeration order and deduplicated at projective distance 1e-10.
pub fn orbit(gens: &[ProjTransform], seed: &ProjPoint, max_len: usize) -> Result<Vec<OrbitPoint>> {
    let d = seed.ambient_dim();
    if gens.iter().any(|g| g.dim() != d) {
        return Err(invalid("generator dimension does not match the seed"));
    }
    let inverses: Vec<ProjTransform> = gens.iter().map(|g| g.inverse()).collect();
    let words = words_with_identity(gens.len(), max_len);
    let images: Vec<OrbitPoint> = words
        .par_iter()
        .map(|w| {
            let m = word_matrix(gens, &inverses, w, d);
            Ok(OrbitPoint { word: word_label(w), point: ProjPoint::from_signed(m * seed.coords())? })
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<OrbitPoint> = Vec::new();
    for p in images {
        if out.iter().all(|q| q.point.projective_distance(&p.point) > 1e-10) {
            out.push(p);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletFacet {
    pub word: String,
    /// Halfspace `normal·y ≤ offset` in the slice chart.
    pub normal: Vec<f64>,
    pub offset: f64,
    /// Whether the inverse word also contributes a facet.
    pub paired: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletDomain {
    /// Fiber-minimizing functional at the basepoint; `∂H = {φ = φ(x)}`.
    pub functional: DualFunctional,
    /// The slice `∂H ∩ C` in the chart whose hyperplane at infinity is `φ`.
    pub slice: ConvexDomain,
    pub basepoint: Vector,
    /// `Q`, when it is cut out by the active halfspaces (and the slice
    /// facets for polyhedral cones).
    pub region: Option<ConvexDomain>,
    pub facets: Vec<DirichletFacet>,
    pub stable: bool,
    pub warnings: Vec<String>,
}

struct Cut {
    label: String,
    inverse_label: String,
    normal: Vector,
    offset: f64,
}

fn inverse_label(w: &[(usize, bool)]) -> String {
    let inv: Vec<(usize, bool)> = w.iter().rev().map(|&(g, i)| (g, !i)).collect();
    word_label(&inv)
}

fn cut_region(slice: &ConvexDomain, cuts: &[&Cut]) -> (Option<ConvexDomain>, Vec<usize>) {
    let chart = slice.chart().clone();
    let mut hs: Vec<(Vector, f64)> = cuts.iter().map(|c| (c.normal.clone(), c.offset)).collect();
    let polyhedral = matches!(slice.backend(), Backend::HPoly(_) | Backend::VPoly(_));
    if polyhedral {
        if let Backend::HPoly(p) | Backend::VPoly(p) = slice.backend() {
            hs.extend(p.facets.iter().map(|f| (f.normal.clone(), f.offset)));
        }
    }
    if cuts.is_empty() {
        return (Some(slice.clone()), vec![]);
    }
    let Ok(region) = ConvexDomain::from_halfspaces(chart, &hs) else {
        return (None, vec![]);
    };
    let verts = region.extreme_points().expect("polytope");
    let scale = 1.0 + verts.iter().map(|v| v.amax()).fold(0.0, f64::max);
    let n = slice.dim();
    let active: Vec<usize> = cuts
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            verts.iter().filter(|v| (c.offset - c.normal.dot(v)).abs() <= 1e-9 * scale).count() >= n
        })
        .map(|(i, _)| i)
        .collect();
    let inside = polyhedral || verts.iter().all(|v| slice.margin(v) >= -1e-12 * scale);
    (inside.then_some(region), active)
}

/// `dirichlet_domain`: `Q = ∂H ∩ ⋂ γ·H` over reduced words of length ≤ `L`,
/// where `H = {φ ≥ φ(x)}` and `φ` minimizes the slice volume on the fiber
/// of `x`. Words acting trivially are skipped.
pub fn dirichlet_domain(cone: &ConvexCone, gens: &[ProjTransform], x: &Vector, max_len: usize) -> Result<DirichletDomain> {
    let omega = &cone.domain;
    let d = omega.dim() + 1;
    if x.len() != d || gens.iter().any(|g| g.dim() != d) {
        return Err(invalid("dimension mismatch between cone, generators and basepoint"));
    }
    let model = VolumeModel::new(cone)?;
    let mut x = x.clone();
    if x.dot(omega.chart().pole()) < 0.0 {
        x = -x;
    }
    let phi = model.min_on_fiber(&x)?.functional_vector();
    let functional = DualFunctional::new(phi.clone())?;
    let slice = omega.rechart(&functional)?;
    let chart: AffineChart = slice.chart().clone();
    let basepoint = chart.coords_of(&x)?;
    let inverses: Vec<ProjTransform> = gens.iter().map(|g| g.inverse()).collect();
    let xn = x.normalize();

    let words = if max_len == 0 { vec![] } else { reduced_words(gens.len(), max_len) };
    let cuts: Vec<Option<(usize, Cut)>> = words
        .par_iter()
        .map(|w| {
            let m = word_matrix(gens, &inverses, w, d);
            let scale = m.amax();
            let trivial = (&m - Matrix::identity(d, d) * m[(0, 0)]).amax() <= 1e-12 * scale;
            if trivial {
                return Ok(None);
            }
            let image = (&m * &xn).normalize();
            if (&image - &xn).norm().min((&image + &xn).norm()) <= 1e-10 {
                return Err(Error::InvalidBasepoint(word_label(w)));
            }
            let inv = m.clone().try_inverse().ok_or_else(|| invalid("singular word"))?;
            let mut g = inv.transpose() * &phi;
            if g.dot(&x) < 0.0 {
                g = -g;
            }
            let psi = g - &phi;
            let (normal, offset) = chart.halfspace_of_functional(&psi);
            Ok(Some((w.len(), Cut { label: word_label(w), inverse_label: inverse_label(w), normal, offset })))
        })
        .collect::<Result<_>>()?;
    let cuts: Vec<(usize, Cut)> = cuts.into_iter().flatten().collect();

    let full: Vec<&Cut> = cuts.iter().map(|(_, c)| c).collect();
    let shorter: Vec<&Cut> = cuts.iter().filter(|(l, _)| *l < max_len).map(|(_, c)| c).collect();
    let (region, active) = cut_region(&slice, &full);
    let (_, active_prev) = cut_region(&slice, &shorter);
    let labels: Vec<&str> = active.iter().map(|&i| full[i].label.as_str()).collect();
    let prev_labels: Vec<&str> = active_prev.iter().map(|&i| shorter[i].label.as_str()).collect();
    let stable = labels == prev_labels;
    let mut warnings = Vec::new();
    if !stable {
        warnings.push(format!("facet set changed between word lengths {} and {}", max_len.saturating_sub(1), max_len));
    }
    if region.is_none() {
        warnings.push("region is not cut out by the word halfspaces alone".into());
    }
    let facets = active
        .iter()
        .map(|&i| {
            let c = full[i];
            DirichletFacet {
                word: c.label.clone(),
                normal: c.normal.iter().copied().collect(),
                offset: c.offset,
                paired: labels.contains(&c.inverse_label.as_str()),
            }
        })
        .collect();
    Ok(DirichletDomain { functional, slice, basepoint, region, facets, stable, warnings })
}

//! The Hilbert metric of a properly-convex domain, chord projections,
//! geodesic sampling and thin-triangle measurement.
//!
//! Distances use the factor ½, so the Klein disk carries the hyperbolic
//! metric of curvature −1.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{affine_rank, Chord, ConvexDomain};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::projgeom::{pencil_core, DualFunctional, ProjPoint, ProjSubspace};
use crate::tol;

/// Hilbert distance between chart points, both inside.
pub fn distance_chart(omega: &ConvexDomain, x: &Vector, y: &Vector) -> Result<f64> {
    let d = y - x;
    let len = d.norm();
    if d.amax() <= tol::EXACT * (1.0 + x.amax()) {
        return Ok(0.0);
    }
    let (tm, tp) = omega.chord_params(x, y)?;
    let gap = (tp - 1.0).min(-tm) * len;
    if !(gap > tol::EXACT) {
        return Err(Error::InfiniteDistance);
    }
    Ok(0.5 * ((tp * (1.0 - tm)) / ((tp - 1.0) * (-tm))).ln().abs())
}

/// `distance`: Hilbert distance between projective points inside `omega`.
pub fn distance(omega: &ConvexDomain, x: &ProjPoint, y: &ProjPoint) -> Result<f64> {
    let xc = omega.inside_coords(x)?;
    let yc = omega.inside_coords(y)?;
    distance_chart(omega, &xc, &yc)
}

/// Chart point on the segment from `x` toward `y` (extended along the
/// chord) at Hilbert distance `s` from `x`.
fn point_at_distance(x: &Vector, y: &Vector, tm: f64, tp: f64, s: f64) -> Vector {
    // invert d(t) = ½ log( tp(t−tm) / ((tp−t)(−tm)) )
    let r = (2.0 * s).exp() * (-tm) / tp;
    let t = (r * tp + tm) / (1.0 + r);
    x + (y - x) * t
}

/// Chart point at Hilbert-arclength fraction `f ∈ [0,1]` of the segment
/// from `x` to `y`.
pub fn segment_point_chart(omega: &ConvexDomain, x: &Vector, y: &Vector, f: f64) -> Result<Vector> {
    let total = distance_chart(omega, x, y)?;
    if total == 0.0 {
        return Ok(x.clone());
    }
    let (tm, tp) = omega.chord_params(x, y)?;
    Ok(point_at_distance(x, y, tm, tp, f * total))
}

/// `geodesic`: `k+1` points from `x` to `y` equally spaced in Hilbert
/// arclength.
pub fn geodesic(omega: &ConvexDomain, x: &ProjPoint, y: &ProjPoint, k: usize) -> Result<Vec<ProjPoint>> {
    if k == 0 {
        return Err(Error::InvalidInput("geodesic needs k ≥ 1".into()));
    }
    let xc = omega.inside_coords(x)?;
    let yc = omega.inside_coords(y)?;
    let total = distance_chart(omega, &xc, &yc)?;
    if total == 0.0 {
        return Ok(vec![x.clone(); k + 1]);
    }
    let (tm, tp) = omega.chord_params(&xc, &yc)?;
    let mut out = Vec::with_capacity(k + 1);
    out.push(omega.chart().point(&xc));
    for i in 1..k {
        let p = point_at_distance(&xc, &yc, tm, tp, total * i as f64 / k as f64);
        out.push(omega.chart().point(&p));
    }
    out.push(omega.chart().point(&yc));
    Ok(out)
}

/// Projection of a domain onto a chord along the core of the pencil spanned
/// by supporting hyperplanes at the chord's endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordProjection {
    pub chord: Chord,
    pub h_plus: DualFunctional,
    pub h_minus: DualFunctional,
    pub core: ProjSubspace,
}

impl ChordProjection {
    pub fn new(omega: &ConvexDomain, chord: Chord) -> Result<Self> {
        let h_plus = omega.support(&chord.a_plus)?;
        let h_minus = omega.support(&chord.a_minus)?;
        let core = pencil_core(&h_plus, &h_minus)?;
        Ok(Self { chord, h_plus, h_minus, core })
    }

    /// Projection onto the chord through the two points.
    pub fn through(omega: &ConvexDomain, x: &ProjPoint, y: &ProjPoint) -> Result<Self> {
        Self::new(omega, omega.chord(x, y)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projected {
    pub point: ProjPoint,
    /// Condition number of the decomposition `X = p + u`.
    pub condition: f64,
}

/// `project_to_chord`: writes `x = p + u` with `p` in the core and `u` on
/// the chord's line, and returns `[u]`.
pub fn project_to_chord(omega: &ConvexDomain, proj: &ChordProjection, x: &ProjPoint) -> Result<Projected> {
    let chart = omega.chart();
    let am = chart.lift(&proj.chord.chart_minus);
    let ap = chart.lift(&proj.chord.chart_plus);
    let d = am.len();
    let core = proj.core.basis_matrix();
    let mut m = Matrix::zeros(d, d);
    m.view_mut((0, 0), (d, core.ncols())).copy_from(&core);
    m.set_column(d - 2, &am.normalize());
    m.set_column(d - 1, &ap.normalize());
    let sv = m.clone().svd(false, false).singular_values;
    let condition = sv.max() / sv.min();
    if !(condition < 1e12) {
        return Err(Error::ProjectionUndefined { condition });
    }
    let c = m.lu().solve(x.coords()).ok_or(Error::ProjectionUndefined { condition })?;
    let u = am.normalize() * c[d - 2] + ap.normalize() * c[d - 1];
    if u.norm() <= 1e-12 {
        return Err(Error::ProjectionUndefined { condition: f64::INFINITY });
    }
    let coords = chart.coords_of(&u).map_err(|_| Error::ProjectionUndefined { condition: f64::INFINITY })?;
    Ok(Projected { point: chart.point(&coords), condition })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaResult {
    /// Sampled lower bound for the thinness constant of the triangle.
    pub delta: f64,
    pub degenerate: bool,
}

/// Van der Corput sequence in base 2; prefixes are nested, so more samples
/// only add points.
fn van_der_corput(mut i: usize) -> f64 {
    let mut f = 0.5;
    let mut r = 0.0;
    while i > 0 {
        if i & 1 == 1 {
            r += f;
        }
        i >>= 1;
        f *= 0.5;
    }
    r
}

/// Hilbert distance from `p` to the segment `[a,b]`, by a coarse scan over
/// arclength followed by golden-section refinement.
fn distance_to_segment(omega: &ConvexDomain, p: &Vector, a: &Vector, b: &Vector) -> Result<f64> {
    let total = distance_chart(omega, a, b)?;
    if total == 0.0 {
        return distance_chart(omega, p, a);
    }
    let (tm, tp) = omega.chord_params(a, b)?;
    let f = |s: f64| distance_chart(omega, p, &point_at_distance(a, b, tm, tp, s));
    const SCAN: usize = 16;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..=SCAN {
        let v = f(total * i as f64 / SCAN as f64)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let h = total / SCAN as f64;
    let mut lo = (best.0 as f64 * h - h).max(0.0);
    let mut hi = (best.0 as f64 * h + h).min(total);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d)?;
        }
        if hi - lo < 1e-13 * total.max(1.0) {
            break;
        }
    }
    Ok(best.1.min(fc).min(fd))
}

/// `thin_triangle_delta`: largest distance from `m` arclength samples (plus
/// endpoints) of each side to the union of the other two sides.
pub fn thin_triangle_delta(omega: &ConvexDomain, tri: [&ProjPoint; 3], m: usize) -> Result<DeltaResult> {
    let v = tri.iter().map(|p| omega.inside_coords(p)).collect::<Result<Vec<_>>>()?;
    let scale = v.iter().map(|p| p.amax()).fold(1.0, f64::max);
    let collinear = {
        let d1 = &v[1] - &v[0];
        let d2 = &v[2] - &v[0];
        let n1 = d1.norm();
        let n2 = d2.norm();
        n1 <= tol::EXACT * scale
            || n2 <= tol::EXACT * scale
            || affine_rank(&[&v[0], &v[1], &v[2]]) < 2
            || (d1.dot(&d2).abs() - n1 * n2).abs() <= 1e-12 * n1 * n2
    };
    if collinear {
        return Ok(DeltaResult { delta: 0.0, degenerate: true });
    }
    let mut fractions = vec![0.0, 1.0];
    fractions.extend((1..=m).map(van_der_corput));
    let mut jobs = Vec::new();
    for side in 0..3 {
        for &f in &fractions {
            jobs.push((side, f));
        }
    }
    let values = jobs
        .par_iter()
        .map(|&(side, f)| {
            let (a, b) = (&v[side], &v[(side + 1) % 3]);
            let c = &v[(side + 2) % 3];
            let p = segment_point_chart(omega, a, b, f)?;
            let d1 = distance_to_segment(omega, &p, b, c)?;
            let d2 = distance_to_segment(omega, &p, c, a)?;
            Ok(d1.min(d2))
        })
        .collect::<Result<Vec<f64>>>()?;
    let delta = values.into_iter().fold(0.0, f64::max);
    Ok(DeltaResult { delta, degenerate: false })
}

//! Bounded convex polytopes in an affine chart, with both vertex and facet
//! descriptions kept in sync. Enumeration is brute force over subsets, which
//! is fine for the small dimensions this crate targets.

use crate::error::{Error, Result};
use crate::linalg::{self, hyperplane_through, Matrix, Vector};

const INCIDENCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    /// Outward unit normal.
    pub normal: Vector,
    /// The facet hyperplane is `normal·x = offset`; the polytope lies in
    /// `normal·x ≤ offset`.
    pub offset: f64,
    /// Indices into the vertex list.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub dim: usize,
    pub vertices: Vec<Vector>,
    pub facets: Vec<Facet>,
}

/// Iterates over all `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Affine rank of a point set.
pub(crate) fn affine_rank(points: &[&Vector]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let d = points[0].len();
    let m = Matrix::from_fn(points.len() - 1, d, |i, j| points[i + 1][j] - points[0][j]);
    let scale = m.abs().max().max(1e-300);
    (m / scale).rank(1e-9)
}

fn scale_of(points: &[Vector]) -> f64 {
    points.iter().map(|p| p.amax()).fold(1.0, f64::max)
}

fn dedup_points(points: Vec<Vector>, tol: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (q - &p).amax() <= tol) {
            out.push(p);
        }
    }
    out
}

impl Polytope {
    /// Builds the polytope `{x : normal_i·x ≤ offset_i}`. Redundant
    /// halfspaces (those that do not support a facet) are dropped.
    pub fn from_halfspaces(dim: usize, halfspaces: &[(Vector, f64)]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let mut hs: Vec<(Vector, f64)> = Vec::with_capacity(halfspaces.len() + 2 * dim);
        for (n, b) in halfspaces {
            if n.len() != dim {
                return Err(Error::InvalidInput("halfspace normal has wrong dimension".into()));
            }
            let norm = n.norm();
            if !(norm > 0.0) || !b.is_finite() || n.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("degenerate halfspace".into()));
            }
            hs.push((n / norm, b / norm));
        }
        let user = hs.len();
        let big = 1e7 * hs.iter().map(|h| h.1.abs()).fold(1.0, f64::max);
        for i in 0..dim {
            let mut e = Vector::zeros(dim);
            e[i] = 1.0;
            hs.push((e.clone(), big));
            hs.push((-e, big));
        }
        let scale = hs[..user].iter().map(|h| h.1.abs()).fold(1.0, f64::max);
        let tol = INCIDENCE * scale;

        let mut raw = Vec::new();
        combinations(hs.len(), dim, |idx| {
            let a = Matrix::from_fn(dim, dim, |i, j| hs[idx[i]].0[j]);
            let b = Vector::from_fn(dim, |i, _| hs[idx[i]].1);
            if let Some(x) = a.lu().solve(&b) {
                if x.iter().all(|v| v.is_finite())
                    && hs.iter().all(|(n, o)| n.dot(&x) <= o + tol * (1.0 + x.amax() / scale))
                {
                    raw.push(x);
                }
            }
        });
        let verts = dedup_points(raw, tol);
        if verts.is_empty() {
            return Err(Error::DegenerateDomain("halfspaces have empty intersection".into()));
        }
        for v in &verts {
            if v.amax() >= big * (1.0 - 1e-9) {
                return Err(Error::NotProperlyConvex {
                    reason: "halfspace intersection is unbounded in the chart".into(),
                    witness: v.normalize().iter().copied().collect(),
                });
            }
        }
        Self::assemble(dim, verts, hs[..user].to_vec(), tol)
    }

    /// Convex hull of `points`; points not in convex position are dropped.
    pub fn from_vertices(dim: usize, points: &[Vector]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        for p in points {
            if p.len() != dim || p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("vertex has wrong dimension or is not finite".into()));
            }
        }
        let scale = scale_of(points);
        let tol = INCIDENCE * scale;
        let pts = dedup_points(points.to_vec(), tol);
        let refs: Vec<&Vector> = pts.iter().collect();
        if pts.len() < dim + 1 || affine_rank(&refs) < dim {
            return Err(Error::DegenerateDomain("vertices do not span the chart".into()));
        }
        let mut hs: Vec<(Vector, f64)> = Vec::new();
        combinations(pts.len(), dim, |idx| {
            let sub: Vec<&Vector> = idx.iter().map(|&i| &pts[i]).collect();
            let Some((n, o)) = hyperplane_through(&sub, 1e-10) else {
                return;
            };
            let mut above = false;
            let mut below = false;
            for p in &pts {
                let s = n.dot(p) - o;
                if s > tol {
                    above = true;
                } else if s < -tol {
                    below = true;
                }
                if above && below {
                    return;
                }
            }
            let (n, o) = if above { (-n, -o) } else { (n, o) };
            if !hs.iter().any(|(m, p)| (m - &n).amax() <= 1e-9 && (p - o).abs() <= tol) {
                hs.push((n, o));
            }
        });
        Self::assemble(dim, pts, hs, tol)
    }

    /// Keeps facet-supporting halfspaces and extreme vertices, and records
    /// incidences.
    fn assemble(dim: usize, verts: Vec<Vector>, hs: Vec<(Vector, f64)>, tol: f64) -> Result<Self> {
        let mut facets: Vec<Facet> = Vec::new();
        for (n, o) in hs {
            let tight: Vec<usize> = (0..verts.len())
                .filter(|&i| (n.dot(&verts[i]) - o).abs() <= tol)
                .collect();
            let refs: Vec<&Vector> = tight.iter().map(|&i| &verts[i]).collect();
            let full = if dim == 1 { !tight.is_empty() } else { affine_rank(&refs) == dim - 1 };
            if full && !facets.iter().any(|f| f.vertices == tight) {
                facets.push(Facet { normal: n, offset: o, vertices: tight });
            }
        }
        // extreme vertices lie on facets whose normals span R^dim
        let extreme: Vec<usize> = (0..verts.len())
            .filter(|&i| {
                let normals: Vec<Vector> = facets
                    .iter()
                    .filter(|f| f.vertices.contains(&i))
                    .map(|f| f.normal.clone())
                    .collect();
                !normals.is_empty() && linalg::columns(&normals).rank(1e-9) == dim
            })
            .collect();
        let remap: Vec<Option<usize>> = (0..verts.len())
            .map(|i| extreme.iter().position(|&e| e == i))
            .collect();
        let vertices: Vec<Vector> = extreme.iter().map(|&i| verts[i].clone()).collect();
        for f in &mut facets {
            f.vertices = f.vertices.iter().filter_map(|&i| remap[i]).collect();
        }
        let poly = Polytope { dim, vertices, facets };
        let c = poly.vertex_centroid();
        if poly.vertices.len() < dim + 1 || poly.margin(&c) <= tol {
            return Err(Error::DegenerateDomain("polytope has empty interior".into()));
        }
        Ok(poly)
    }

    pub fn vertex_centroid(&self) -> Vector {
        let mut c = Vector::zeros(self.dim);
        for v in &self.vertices {
            c += v;
        }
        c / self.vertices.len() as f64
    }

    /// `min_i (offset_i − normal_i·x)`: positive inside, zero on the frontier.
    pub fn margin(&self, x: &Vector) -> f64 {
        self.facets
            .iter()
            .map(|f| f.offset - f.normal.dot(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `t ≥ 0` with `x + t·d` in the closure, for `x` inside.
    pub fn ray_exit(&self, x: &Vector, d: &Vector) -> f64 {
        self.facets
            .iter()
            .filter_map(|f| {
                let rate = f.normal.dot(d);
                (rate > 0.0).then(|| (f.offset - f.normal.dot(x)) / rate)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn support_function(&self, u: &Vector) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Facets whose hyperplane passes within `tol` of `b`.
    pub fn tight_facets(&self, b: &Vector, tol: f64) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&i| (self.facets[i].offset - self.facets[i].normal.dot(b)).abs() <= tol)
            .collect()
    }

    /// Decomposition into simplices (each `dim+1` points), by coning from the
    /// vertex centroid over recursively triangulated facets.
    pub fn triangulate(&self) -> Vec<Vec<Vector>> {
        if self.dim == 1 {
            let lo = self.vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = self.vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            return vec![vec![linalg::vector(&[lo]), linalg::vector(&[hi])]];
        }
        let c = self.vertex_centroid();
        let mut out = Vec::new();
        for f in &self.facets {
            let pts: Vec<Vector> = f.vertices.iter().map(|&i| self.vertices[i].clone()).collect();
            if pts.len() == self.dim {
                let mut s = vec![c.clone()];
                s.extend(pts);
                out.push(s);
                continue;
            }
            // triangulate the facet inside its own hyperplane
            let basis = linalg::orthonormal_complement(std::slice::from_ref(&f.normal), self.dim, 1e-12)
                .expect("unit normal");
            let origin = &f.normal * f.offset;
            let local: Vec<Vector> = pts
                .iter()
                .map(|p| Vector::from_fn(self.dim - 1, |k, _| basis[k].dot(&(p - &origin))))
                .collect();
            let sub = Polytope::from_vertices(self.dim - 1, &local)
                .expect("facet of a full-dimensional polytope is full-dimensional in its hyperplane");
            for simplex in sub.triangulate() {
                let mut s = vec![c.clone()];
                for q in simplex {
                    let mut p = origin.clone();
                    for k in 0..self.dim - 1 {
                        p.axpy(q[k], &basis[k], 1.0);
                    }
                    s.push(p);
                }
                out.push(s);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    fn square() -> Polytope {
        let hs = vec![
            (vector(&[1.0, 0.0]), 1.0),
            (vector(&[-1.0, 0.0]), 1.0),
            (vector(&[0.0, 1.0]), 1.0),
            (vector(&[0.0, -1.0]), 1.0),
        ];
        Polytope::from_halfspaces(2, &hs).unwrap()
    }

    #[test]
    fn combinations_enumerates_all() {
        let mut n = 0;
        combinations(5, 2, |_| n += 1);
        assert_eq!(n, 10);
        let mut seen = Vec::new();
        combinations(3, 3, |c| seen.push(c.to_vec()));
        assert_eq!(seen, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn square_from_halfspaces_has_four_vertices() {
        let sq = square();
        assert_eq!(sq.vertices.len(), 4);
        assert_eq!(sq.facets.len(), 4);
        assert!(sq.facets.iter().all(|f| f.vertices.len() == 2));
    }

    #[test]
    fn redundant_halfspace_dropped() {
        let mut hs = vec![
            (vector(&[1.0, 0.0]), 1.0),
            (vector(&[-1.0, 0.0]), 1.0),
            (vector(&[0.0, 1.0]), 1.0),
            (vector(&[0.0, -1.0]), 1.0),
        ];
        hs.push((vector(&[1.0, 1.0]), 5.0));
        let p = Polytope::from_halfspaces(2, &hs).unwrap();
        assert_eq!(p.facets.len(), 4);
    }

    #[test]
    fn unbounded_halfspaces_rejected() {
        let hs = vec![(vector(&[-1.0, 0.0]), 0.0)];
        let err = Polytope::from_halfspaces(2, &hs).unwrap_err();
        assert!(matches!(err, Error::NotProperlyConvex { .. }));
    }

    #[test]
    fn hull_drops_interior_points() {
        let pts = vec![
            vector(&[1.0, 0.0]),
            vector(&[-1.0, 0.0]),
            vector(&[0.0, 1.0]),
            vector(&[0.0, -1.0]),
            vector(&[0.1, 0.1]),
            vector(&[0.5, 0.5]),
        ];
        let p = Polytope::from_vertices(2, &pts).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(p.facets.len(), 4);
    }

    #[test]
    fn triangulation_volume_of_cube() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vector(&[
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            ]));
        }
        let cube = Polytope::from_vertices(3, &pts).unwrap();
        assert_eq!(cube.facets.len(), 6);
        let vol: f64 = cube
            .triangulate()
            .iter()
            .map(|s| {
                let m = Matrix::from_fn(3, 3, |i, j| s[j + 1][i] - s[0][i]);
                m.determinant().abs() / 6.0
            })
            .sum();
        assert!((vol - 8.0).abs() < 1e-12);
    }
}

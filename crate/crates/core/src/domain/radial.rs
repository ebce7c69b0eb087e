//! Star-shaped PL hypersurfaces given as radial graphs over a triangulated
//! direction set: vertex `j` is `center + radii[j]·directions[j]`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{hyperplane_through, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGraph {
    pub center: Vector,
    /// Unit directions in the chart.
    pub directions: Vec<Vector>,
    pub radii: Vec<f64>,
    /// Each simplex lists `n` vertex indices.
    pub simplices: Vec<Vec<usize>>,
    /// Outward unit normal and offset of each simplex's hyperplane.
    pub facets: Vec<(Vector, f64)>,
}

impl RadialGraph {
    pub fn new(
        center: Vector,
        directions: Vec<Vector>,
        radii: Vec<f64>,
        simplices: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = center.len();
        if n == 0 || directions.len() != radii.len() || directions.len() < n + 1 {
            return Err(Error::InvalidInput("radial graph needs matching directions and radii".into()));
        }
        let mut dirs = Vec::with_capacity(directions.len());
        for (d, r) in directions.iter().zip(&radii) {
            let norm = d.norm();
            if d.len() != n || !(norm > 0.0) || !norm.is_finite() || !(*r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidInput("radial graph direction or radius is invalid".into()));
            }
            dirs.push(d / norm);
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("radial graph center is not finite".into()));
        }
        let points: Vec<Vector> = dirs.iter().zip(&radii).map(|(d, r)| &center + d * *r).collect();
        let scale = points.iter().map(|p| p.amax()).fold(1.0, f64::max);
        let tol = 1e-9 * scale;

        let mut facets = Vec::with_capacity(simplices.len());
        for s in &simplices {
            if s.len() != n || s.iter().any(|&i| i >= points.len()) {
                return Err(Error::InvalidInput("radial graph simplex has wrong arity or index".into()));
            }
            let pts: Vec<&Vector> = s.iter().map(|&i| &points[i]).collect();
            let (normal, offset) = if n == 1 {
                let sgn = (pts[0][0] - center[0]).signum();
                (Vector::from_element(1, sgn), sgn * pts[0][0])
            } else {
                hyperplane_through(&pts, 1e-12)
                    .ok_or_else(|| Error::DegenerateDomain("degenerate radial graph simplex".into()))?
            };
            let (normal, offset) = if normal.dot(&center) > offset { (-normal, -offset) } else { (normal, offset) };
            if offset - normal.dot(&center) <= tol {
                return Err(Error::NotProperlyConvex {
                    reason: "radial graph simplex hyperplane passes through the center".into(),
                    witness: center.iter().copied().collect(),
                });
            }
            facets.push((normal, offset));
        }
        check_closed(n, &simplices, &dirs)?;
        for (normal, offset) in &facets {
            for p in &points {
                if normal.dot(p) > offset + tol {
                    return Err(Error::NotProperlyConvex {
                        reason: "radial graph is not convex".into(),
                        witness: p.iter().copied().collect(),
                    });
                }
            }
        }
        Ok(Self { center, directions: dirs, radii, simplices, facets })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn vertex(&self, j: usize) -> Vector {
        &self.center + &self.directions[j] * self.radii[j]
    }

    pub fn vertices(&self) -> Vec<Vector> {
        (0..self.directions.len()).map(|j| self.vertex(j)).collect()
    }

    pub fn margin(&self, x: &Vector) -> f64 {
        self.facets
            .iter()
            .map(|(n, o)| o - n.dot(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// PL radial function: distance from the center to the surface along
    /// the unit direction `u`.
    pub fn radial_function(&self, u: &Vector) -> f64 {
        self.facets
            .iter()
            .filter_map(|(n, o)| {
                let rate = n.dot(u);
                (rate > 0.0).then(|| (o - n.dot(&self.center)) / rate)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Exit parameter along `x + t·d` by bisection on containment, to
    /// relative precision 1e-12 on `t`.
    pub fn ray_exit(&self, x: &Vector, d: &Vector) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.margin(&(x + d * hi)) >= 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        while hi - lo > 1e-12 * hi.max(1e-300) {
            let mid = 0.5 * (lo + hi);
            if self.margin(&(x + d * mid)) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn support_function(&self, u: &Vector) -> f64 {
        (0..self.directions.len())
            .map(|j| self.vertex(j).dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Chart simplices (each `n+1` points) coning the center over the surface.
    pub fn cone_simplices(&self) -> Vec<Vec<Vector>> {
        self.simplices
            .iter()
            .map(|s| {
                let mut out = vec![self.center.clone()];
                out.extend(s.iter().map(|&i| self.vertex(i)));
                out
            })
            .collect()
    }
}

fn check_closed(n: usize, simplices: &[Vec<usize>], dirs: &[Vector]) -> Result<()> {
    if n == 1 {
        let signs: Vec<f64> = simplices.iter().map(|s| dirs[s[0]][0].signum()).collect();
        if simplices.len() != 2 || signs[0] == signs[1] {
            return Err(Error::InvalidInput("1-dimensional radial graph needs one point on each side".into()));
        }
        return Ok(());
    }
    let mut faces: HashMap<Vec<usize>, usize> = HashMap::new();
    for s in simplices {
        for skip in 0..n {
            let mut f: Vec<usize> = s.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &i)| i).collect();
            f.sort_unstable();
            *faces.entry(f).or_insert(0) += 1;
        }
    }
    if faces.values().any(|&c| c != 2) {
        return Err(Error::InvalidInput("radial graph triangulation is not a closed manifold".into()));
    }
    Ok(())
}

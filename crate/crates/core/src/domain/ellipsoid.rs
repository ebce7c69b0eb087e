//! Ellipsoids `{x : (x−c)ᵀE⁻¹(x−c) < 1}` in an affine chart, and their
//! homogeneous quadric cones.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::projgeom::AffineChart;

#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub center: Vector,
    /// Symmetric positive-definite shape matrix `E`; semi-axes are the square
    /// roots of its eigenvalues.
    pub shape: Matrix,
    pub shape_inv: Matrix,
}

impl Ellipsoid {
    pub fn new(center: Vector, shape: Matrix) -> Result<Self> {
        let n = center.len();
        if n == 0 || shape.nrows() != n || shape.ncols() != n {
            return Err(Error::InvalidInput("ellipsoid shape must be n×n".into()));
        }
        if center.iter().chain(shape.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("ellipsoid data must be finite".into()));
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * shape.amax().max(1.0) {
            return Err(Error::InvalidInput("ellipsoid shape must be symmetric".into()));
        }
        let shape = (&shape + shape.transpose()) * 0.5;
        let chol = shape
            .clone()
            .cholesky()
            .ok_or_else(|| Error::DegenerateDomain("ellipsoid shape is not positive definite".into()))?;
        let shape_inv = chol.inverse();
        Ok(Self { center, shape, shape_inv })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `√((x−c)ᵀE⁻¹(x−c))`; equals 1 on the frontier.
    pub fn gauge(&self, x: &Vector) -> f64 {
        let d = x - &self.center;
        d.dot(&(&self.shape_inv * &d)).max(0.0).sqrt()
    }

    pub fn margin(&self, x: &Vector) -> f64 {
        1.0 - self.gauge(x)
    }

    /// Largest `t` with `x + t·d` in the closure, for `x` inside.
    pub fn ray_exit(&self, x: &Vector, d: &Vector) -> f64 {
        let w = x - &self.center;
        let ed = &self.shape_inv * d;
        let a = d.dot(&ed);
        let b = w.dot(&ed);
        let c = w.dot(&(&self.shape_inv * &w)) - 1.0;
        let disc = (b * b - a * c).max(0.0).sqrt();
        // stable root of a t² + 2 b t + c = 0 with c < 0
        if b >= 0.0 {
            -c / (b + disc)
        } else {
            (disc - b) / a
        }
    }

    pub fn support_function(&self, u: &Vector) -> f64 {
        self.center.dot(u) + u.dot(&(&self.shape * u)).max(0.0).sqrt()
    }

    /// Outward unit normal at a frontier point.
    pub fn normal_at(&self, b: &Vector) -> Vector {
        (&self.shape_inv * (b - &self.center)).normalize()
    }

    /// Largest chart norm of a point of the closure (exact for centered
    /// ellipsoids, an upper bound otherwise).
    pub fn radius_bound(&self) -> f64 {
        let lmax = self.shape.clone().symmetric_eigen().eigenvalues.max();
        self.center.norm() + lmax.sqrt()
    }

    /// Symmetric `M` with the cone equal to `{X : XᵀMX < 0}` on the side of
    /// the chart pole.
    pub fn quadric(&self, chart: &AffineChart) -> Matrix {
        let n = self.dim();
        let ec = &self.shape_inv * &self.center;
        let mut g = Matrix::zeros(n + 1, n + 1);
        g.view_mut((0, 0), (n, n)).copy_from(&self.shape_inv);
        for i in 0..n {
            g[(i, n)] = -ec[i];
            g[(n, i)] = -ec[i];
        }
        g[(n, n)] = self.center.dot(&ec) - 1.0;
        let b = chart_basis(chart);
        &b * g * b.transpose()
    }

    /// Inverse of [`Self::quadric`]: reads the ellipsoid cut out in `chart`
    /// by a quadric of signature (n,1).
    pub fn from_quadric(m: &Matrix, chart: &AffineChart) -> Result<Self> {
        let n = chart.dim();
        let b = chart_basis(chart);
        let mut g = b.transpose() * m * &b;
        g = (&g + g.transpose()) * 0.5;
        let top = g.view((0, 0), (n, n)).into_owned();
        let pd = |a: &Matrix| a.clone().symmetric_eigen().eigenvalues.min() > 0.0;
        if !pd(&top) {
            g = -g;
        }
        let a = g.view((0, 0), (n, n)).into_owned();
        if !pd(&a) {
            return Err(Error::NotProperlyConvex {
                reason: "quadric cone meets the hyperplane at infinity of the chart".into(),
                witness: a.symmetric_eigen().eigenvectors.column(0).iter().copied().collect(),
            });
        }
        let bv = g.view((0, n), (n, 1)).into_owned().column(0).into_owned();
        let c0 = g[(n, n)];
        let a_inv = a.clone().cholesky().expect("positive definite").inverse();
        let center = -(&a_inv * &bv);
        let rho = center.dot(&(&a * &center)) - c0;
        if !(rho > 0.0) {
            return Err(Error::DegenerateDomain("quadric cone has empty interior".into()));
        }
        let shape = a_inv * rho;
        Self::new(center, (&shape + shape.transpose()) * 0.5)
    }
}

/// Orthogonal matrix `[F | pole]` taking (chart frame coordinates, pole
/// coordinate) to homogeneous coordinates.
pub(crate) fn chart_basis(chart: &AffineChart) -> Matrix {
    let n = chart.dim();
    let mut b = Matrix::zeros(n + 1, n + 1);
    b.view_mut((0, 0), (n + 1, n)).copy_from(chart.frame());
    b.set_column(n, chart.pole());
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix, vector};

    #[test]
    fn unit_disk_quadric_is_lorentz_form() {
        let e = Ellipsoid::new(vector(&[0.0, 0.0]), Matrix::identity(2, 2)).unwrap();
        let m = e.quadric(&AffineChart::standard(2));
        let expected = Matrix::from_diagonal(&vector(&[1.0, 1.0, -1.0]));
        assert!((m - expected).amax() < 1e-15);
    }

    #[test]
    fn quadric_round_trip_in_tilted_chart() {
        let e = Ellipsoid::new(vector(&[0.2, -0.1]), matrix(&[vec![0.5, 0.1], vec![0.1, 0.2]])).unwrap();
        let chart = AffineChart::standard(2);
        let back = Ellipsoid::from_quadric(&e.quadric(&chart), &chart).unwrap();
        assert!((back.center - &e.center).amax() < 1e-12);
        assert!((back.shape - &e.shape).amax() < 1e-12);
    }

    #[test]
    fn ray_exit_hits_frontier() {
        let e = Ellipsoid::new(vector(&[0.0, 0.0]), Matrix::identity(2, 2)).unwrap();
        let t = e.ray_exit(&vector(&[0.5, 0.0]), &vector(&[1.0, 0.0]));
        assert!((t - 0.5).abs() < 1e-15);
        let t = e.ray_exit(&vector(&[0.5, 0.0]), &vector(&[-1.0, 0.0]));
        assert!((t - 1.5).abs() < 1e-15);
    }
}

//! Projective-linear primitives: points of positive projective space, dual
//! functionals, projective transformations, subspaces and affine charts.
//!
//! Points are stored as unit vectors of R^{n+1}, so a point of positive
//! projective space is a point of the sphere S^n and the sign of a
//! representative carries information. Transformations act on the sphere by
//! `x ↦ Ax/‖Ax‖`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, householder_frame, orthonormal_complement, Matrix, Vector};
use crate::tol;

/// A point of positive projective space, represented on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct ProjPoint {
    coords: Vector,
}

impl ProjPoint {
    /// Normalizes `v`, choosing the representative whose last nonzero
    /// coordinate is positive.
    pub fn new(v: Vector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("zero or non-finite vector has no projective class"));
        }
        let mut coords = v / norm;
        if let Some(last) = coords.iter().rev().find(|c| c.abs() > tol::EXACT) {
            if *last < 0.0 {
                coords = -coords;
            }
        }
        Ok(Self { coords })
    }

    /// Normalizes `v` keeping its sign.
    pub fn from_signed(v: Vector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("zero or non-finite vector has no projective class"));
        }
        Ok(Self { coords: v / norm })
    }

    /// Normalizes `v` with the sign making `⟨side, v⟩ ≥ 0`.
    pub fn oriented(v: Vector, side: &Vector) -> Result<Self> {
        let s = if side.dot(&v) < 0.0 { -1.0 } else { 1.0 };
        Self::from_signed(v * s)
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    pub fn into_coords(self) -> Vector {
        self.coords
    }

    /// Ambient dimension n+1.
    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    /// Chordal distance on the sphere, insensitive to the sign of the
    /// representative.
    pub fn projective_distance(&self, other: &ProjPoint) -> f64 {
        (&self.coords - &other.coords)
            .norm()
            .min((&self.coords + &other.coords).norm())
    }
}

impl From<ProjPoint> for Vec<f64> {
    fn from(p: ProjPoint) -> Self {
        p.coords.iter().copied().collect()
    }
}

impl TryFrom<Vec<f64>> for ProjPoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProjPoint::from_signed(linalg::vector(&v))
    }
}

/// `normalize_point`.
pub fn normalize_point(v: &Vector) -> Result<ProjPoint> {
    ProjPoint::new(v.clone())
}

/// A point of the dual projective space, paired with points by the standard
/// inner product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct DualFunctional {
    coeffs: Vector,
}

impl DualFunctional {
    /// Normalizes `v` keeping its sign (the sign selects the positive side).
    pub fn new(v: Vector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("zero or non-finite functional"));
        }
        Ok(Self { coeffs: v / norm })
    }

    pub fn coeffs(&self) -> &Vector {
        &self.coeffs
    }

    pub fn pair(&self, p: &ProjPoint) -> f64 {
        self.coeffs.dot(p.coords())
    }

    pub fn eval(&self, v: &Vector) -> f64 {
        self.coeffs.dot(v)
    }

    pub fn ambient_dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Coordinate functional `e_i^*` on R^dim.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut v = Vector::zeros(dim);
        v[i] = 1.0;
        Self { coeffs: v }
    }
}

impl From<DualFunctional> for Vec<f64> {
    fn from(f: DualFunctional) -> Self {
        f.coeffs.iter().copied().collect()
    }
}

impl TryFrom<Vec<f64>> for DualFunctional {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        DualFunctional::new(linalg::vector(&v))
    }
}

/// A projective transformation, stored with |det| = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct ProjTransform {
    matrix: Matrix,
}

impl ProjTransform {
    /// Rescales `m` to unit |determinant|.
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(invalid("transform must be a nonempty square matrix"));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(invalid("transform has non-finite entries"));
        }
        let d = m.determinant();
        if d.abs() <= f64::MIN_POSITIVE || !d.is_finite() {
            return Err(invalid("singular transform"));
        }
        let s = d.abs().powf(-1.0 / m.nrows() as f64);
        Ok(Self { matrix: m * s })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: Matrix::identity(dim, dim) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn inverse(&self) -> Self {
        let inv = self.matrix.clone().try_inverse().expect("unit determinant");
        Self { matrix: inv }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjTransform) -> Self {
        Self { matrix: &self.matrix * &other.matrix }
    }

    /// Inverse transpose, the matrix of the dual action.
    pub fn dual_matrix(&self) -> Matrix {
        self.inverse().matrix.transpose()
    }
}

impl From<ProjTransform> for Vec<Vec<f64>> {
    fn from(t: ProjTransform) -> Self {
        linalg::to_rows(&t.matrix)
    }
}

impl TryFrom<Vec<Vec<f64>>> for ProjTransform {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(invalid("transform rows must form a square matrix"));
        }
        ProjTransform::new(linalg::matrix(&rows))
    }
}

/// `[A][x] = [Ax]` on the sphere.
pub fn apply(a: &ProjTransform, p: &ProjPoint) -> ProjPoint {
    ProjPoint::from_signed(a.matrix() * p.coords()).expect("invertible map of a unit vector")
}

/// `A[φ] = [φ ∘ A⁻¹]`.
pub fn dual_apply(a: &ProjTransform, phi: &DualFunctional) -> DualFunctional {
    DualFunctional::new(a.dual_matrix() * phi.coeffs()).expect("invertible map of a unit vector")
}

/// A projective subspace `P U`, stored as an orthonormal basis of U.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjSubspace {
    pub basis: Vec<Vector>,
    /// Codimension in R^{n+1}.
    pub codim: usize,
}

impl ProjSubspace {
    pub fn from_basis(basis: Vec<Vector>, ambient: usize) -> Self {
        let codim = ambient - basis.len();
        Self { basis, codim }
    }

    pub fn basis_matrix(&self) -> Matrix {
        linalg::columns(&self.basis)
    }

    /// Distance from `v` to the subspace, relative to ‖v‖.
    pub fn relative_distance(&self, v: &Vector) -> f64 {
        linalg::reject(v, &self.basis).norm() / v.norm()
    }
}

/// Core `ker H1 ∩ ker H2` of the pencil spanned by two hyperplanes.
pub fn pencil_core(h1: &DualFunctional, h2: &DualFunctional) -> Result<ProjSubspace> {
    let dim = h1.ambient_dim();
    if h2.ambient_dim() != dim {
        return Err(invalid("functionals of different dimension"));
    }
    let basis = orthonormal_complement(&[h1.coeffs().clone(), h2.coeffs().clone()], dim, 1e-10)
        .ok_or(Error::DegeneratePencil)?;
    Ok(ProjSubspace::from_basis(basis, dim))
}

/// An affine patch: the complement of the hyperplane at infinity `ker H∞`,
/// with coordinates taken in a fixed orthonormal frame of `ker H∞` after
/// radial projection onto the tangent plane at the pole (the unit vector of
/// `H∞`).
#[derive(Debug, Clone, PartialEq)]
pub struct AffineChart {
    infinity: DualFunctional,
    frame: Matrix,
}

impl AffineChart {
    pub fn new(infinity: DualFunctional) -> Self {
        let frame = householder_frame(infinity.coeffs());
        Self { infinity, frame }
    }

    /// The chart with hyperplane at infinity `e_{n+1}^*`, so chart coordinates
    /// of `[x_1:…:x_n:1]` are `(x_1,…,x_n)`.
    pub fn standard(n: usize) -> Self {
        Self::new(DualFunctional::coordinate(n + 1, n))
    }

    pub fn infinity(&self) -> &DualFunctional {
        &self.infinity
    }

    pub fn pole(&self) -> &Vector {
        self.infinity.coeffs()
    }

    /// (n+1)×n matrix whose columns are the frame of `ker H∞`.
    pub fn frame(&self) -> &Matrix {
        &self.frame
    }

    /// Chart dimension n.
    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    /// Chart coordinates of a (not necessarily unit) homogeneous vector.
    pub fn coords_of(&self, v: &Vector) -> Result<Vector> {
        let s = self.pole().dot(v);
        if s.abs() <= tol::EXACT * v.norm() {
            return Err(Error::AtInfinity);
        }
        Ok(self.frame.transpose() * v / s)
    }

    /// `affine_chart`.
    pub fn to_chart(&self, p: &ProjPoint) -> Result<Vector> {
        self.coords_of(p.coords())
    }

    /// Homogeneous lift `pole + F·x`, pairing to 1 with `H∞`.
    pub fn lift(&self, x: &Vector) -> Vector {
        self.pole() + &self.frame * x
    }

    /// Chart inverse.
    pub fn point(&self, x: &Vector) -> ProjPoint {
        ProjPoint::from_signed(self.lift(x)).expect("lift is never zero")
    }

    /// Homogeneous functional positive exactly on `{normal·x < offset}`.
    pub fn functional_of_halfspace(&self, normal: &Vector, offset: f64) -> Vector {
        self.pole() * offset - &self.frame * normal
    }

    /// Inverse of [`Self::functional_of_halfspace`]; normal is unit length.
    pub fn halfspace_of_functional(&self, psi: &Vector) -> (Vector, f64) {
        let normal = -(self.frame.transpose() * psi);
        let offset = psi.dot(self.pole());
        let n = normal.norm();
        if n == 0.0 {
            (normal, offset)
        } else {
            (normal / n, offset / n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    #[test]
    fn normalize_examples() {
        let p = normalize_point(&vector(&[0.0, 0.0, 2.0])).unwrap();
        assert_eq!(p.coords(), &vector(&[0.0, 0.0, 1.0]));
        let p = normalize_point(&vector(&[3.0, 4.0])).unwrap();
        assert!((p.coords() - vector(&[0.6, 0.8])).norm() < 1e-15);
        assert!(matches!(
            normalize_point(&vector(&[0.0, 0.0, 0.0])),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn apply_diagonal() {
        let a = ProjTransform::new(Matrix::from_diagonal(&vector(&[2.0, 0.5]))).unwrap();
        let p = normalize_point(&vector(&[1.0, 1.0])).unwrap();
        let q = apply(&a, &p);
        let expect = vector(&[4.0, 1.0]) / 17f64.sqrt();
        assert!((q.coords() - expect).norm() < 1e-15);
        let back = apply(&a.inverse(), &q);
        assert!((back.coords() - p.coords()).norm() < 1e-12);
    }

    #[test]
    fn dual_apply_diagonal() {
        let a = ProjTransform::new(Matrix::from_diagonal(&vector(&[2.0, 0.5]))).unwrap();
        let phi = DualFunctional::new(vector(&[1.0, 1.0])).unwrap();
        let out = dual_apply(&a, &phi);
        let expect = vector(&[0.5, 2.0]).normalize();
        assert!((out.coeffs() - expect).norm() < 1e-15);
        let id = ProjTransform::identity(2);
        assert!((dual_apply(&id, &phi).coeffs() - phi.coeffs()).norm() < 1e-15);
    }

    #[test]
    fn singular_transform_rejected() {
        let m = linalg::matrix(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(ProjTransform::new(m).is_err());
    }

    #[test]
    fn pencil_core_examples() {
        let h1 = DualFunctional::new(vector(&[1.0, 0.0, -1.0])).unwrap();
        let h2 = DualFunctional::new(vector(&[0.0, 1.0, -1.0])).unwrap();
        let core = pencil_core(&h1, &h2).unwrap();
        assert_eq!(core.codim, 2);
        assert_eq!(core.basis.len(), 1);
        let expect = vector(&[1.0, 1.0, 1.0]) / 3f64.sqrt();
        assert!((&core.basis[0] - &expect).norm() < 1e-12);

        assert_eq!(pencil_core(&h1, &h1), Err(Error::DegeneratePencil));

        let e1 = DualFunctional::coordinate(4, 0);
        let e2 = DualFunctional::coordinate(4, 1);
        let core = pencil_core(&e1, &e2).unwrap();
        assert!((&core.basis[0] - vector(&[0.0, 0.0, 1.0, 0.0])).norm() < 1e-15);
        assert!((&core.basis[1] - vector(&[0.0, 0.0, 0.0, 1.0])).norm() < 1e-15);
    }

    #[test]
    fn chart_examples() {
        let chart = AffineChart::standard(2);
        let origin = chart.to_chart(&normalize_point(&vector(&[0.0, 0.0, 1.0])).unwrap()).unwrap();
        assert!(origin.norm() < 1e-15);
        let p = normalize_point(&vector(&[1.0, 1.0, 1.0])).unwrap();
        let x = chart.to_chart(&p).unwrap();
        assert!((x - vector(&[1.0, 1.0])).norm() < 1e-15);
        let inf = normalize_point(&vector(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(chart.to_chart(&inf), Err(Error::AtInfinity));
    }

    #[test]
    fn halfspace_functional_round_trip() {
        let chart = AffineChart::new(DualFunctional::new(vector(&[0.3, -0.2, 1.0])).unwrap());
        let normal = vector(&[0.6, 0.8]);
        let psi = chart.functional_of_halfspace(&normal, 0.7);
        let (n2, o2) = chart.halfspace_of_functional(&psi);
        assert!((n2 - &normal).norm() < 1e-14);
        assert!((o2 - 0.7).abs() < 1e-14);
        let x = vector(&[0.1, 0.2]);
        assert!((psi.dot(&chart.lift(&x)) - (0.7 - normal.dot(&x))).abs() < 1e-14);
    }
}

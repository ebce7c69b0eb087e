//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

pub fn vector(data: &[f64]) -> Vector {
    DVector::from_column_slice(data)
}

/// Row-major construction.
pub fn matrix(rows: &[Vec<f64>]) -> Matrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Matrix whose columns are the given vectors.
pub fn columns(vs: &[Vector]) -> Matrix {
    let r = vs.first().map_or(0, |v| v.len());
    DMatrix::from_fn(r, vs.len(), |i, j| vs[j][i])
}

pub fn det(m: &Matrix) -> f64 {
    if m.nrows() == 0 {
        1.0
    } else {
        m.determinant()
    }
}

/// Orthonormal basis of the complement of `span(vs)` in R^dim, obtained by
/// Gram-Schmidt against the standard basis. Returns `None` if the inputs are
/// linearly dependent beyond `tol`.
pub fn orthonormal_complement(vs: &[Vector], dim: usize, tol: f64) -> Option<Vec<Vector>> {
    let mut basis: Vec<Vector> = Vec::with_capacity(dim);
    for v in vs {
        let r = reject(v, &basis);
        let norm = r.norm();
        if norm <= tol * v.norm().max(1.0) {
            return None;
        }
        basis.push(r / norm);
    }
    let given = basis.len();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let e = DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 });
        let r = reject(&e, &basis);
        let norm = r.norm();
        if norm > 1e-6 {
            basis.push(r / norm);
        }
    }
    Some(basis.split_off(given))
}

/// `v` minus its projection onto an orthonormal family; two passes.
pub fn reject(v: &Vector, basis: &[Vector]) -> Vector {
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(&r);
            r.axpy(-c, b, 1.0);
        }
    }
    r
}

/// Orthonormal frame of `pole^⊥` given by the Householder reflection that
/// swaps `±pole` and the last standard basis vector. Columns are the frame.
pub fn householder_frame(pole: &Vector) -> Matrix {
    let d = pole.len();
    let mut e = DVector::zeros(d);
    e[d - 1] = 1.0;
    let w = if pole[d - 1] >= 0.0 { pole + &e } else { pole - &e };
    let ww = w.dot(&w);
    let h = Matrix::identity(d, d) - (&w * w.transpose()) * (2.0 / ww);
    h.columns(0, d - 1).into_owned()
}

/// Orthonormal basis of the (right) null space of `m`, singular values below
/// `tol * max(1, σ_max)` counting as zero.
pub fn null_space(m: &Matrix, tol: f64) -> Vec<Vector> {
    let c = m.ncols();
    let mut sq = DMatrix::zeros(c.max(m.nrows()), c);
    sq.rows_mut(0, m.nrows()).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max().max(1.0);
    (0..c)
        .filter(|&i| svd.singular_values[i] <= tol * smax)
        .map(|i| vt.row(i).transpose())
        .collect()
}

/// Affine hyperplane `normal·x = offset` through `points` (which must number
/// the ambient dimension and be affinely independent). The normal is a unit
/// vector.
pub fn hyperplane_through(points: &[&Vector], tol: f64) -> Option<(Vector, f64)> {
    let d = points.first()?.len();
    if points.len() != d {
        return None;
    }
    if d == 1 {
        return Some((vector(&[1.0]), points[0][0]));
    }
    let diffs = DMatrix::from_fn(d - 1, d, |i, j| points[i + 1][j] - points[0][j]);
    let scale = diffs.abs().max().max(1e-300);
    let ns = null_space(&(diffs / scale), tol);
    if ns.len() != 1 {
        return None;
    }
    let n = ns.into_iter().next().unwrap();
    let offset = n.dot(points[0]);
    Some((n, offset))
}

/// Symmetric eigendecomposition with eigenvalues sorted non-increasing and
/// each eigenvector's first nonzero component made positive.
pub fn sym_eigen_sorted(m: &Matrix) -> (Vector, Matrix) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(i).into_owned();
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                col = -col;
            }
        }
        vectors.set_column(k, &col);
    }
    (values, vectors)
}

/// Rotation in the plane of unit vectors `a`, `b` carrying `a` to `b`,
/// identity on the orthogonal complement.
pub fn rotation_taking(a: &Vector, b: &Vector) -> Matrix {
    let d = a.len();
    let c = a.dot(b);
    let id = Matrix::identity(d, d);
    if c > 1.0 - 1e-15 {
        return id;
    }
    if c < -1.0 + 1e-15 {
        // half-turn in a plane containing a
        let other = orthonormal_complement(std::slice::from_ref(a), d, 1e-12)
            .and_then(|v| v.into_iter().next())
            .expect("dimension >= 2");
        return id - (a * a.transpose()) * 2.0 - (&other * other.transpose()) * 2.0;
    }
    let k = b * a.transpose() - a * b.transpose();
    &id + &k + (&k * &k) / (1.0 + c)
}

pub fn frobenius(m: &Matrix) -> f64 {
    m.norm()
}

/// Largest singular value.
pub fn op_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.clone().svd(false, false).singular_values.max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_coordinate_vectors() {
        let e1 = vector(&[1.0, 0.0, 0.0, 0.0]);
        let e2 = vector(&[0.0, 1.0, 0.0, 0.0]);
        let c = orthonormal_complement(&[e1, e2], 4, 1e-12).unwrap();
        assert_eq!(c.len(), 2);
        assert!((&c[0] - vector(&[0.0, 0.0, 1.0, 0.0])).norm() < 1e-15);
        assert!((&c[1] - vector(&[0.0, 0.0, 0.0, 1.0])).norm() < 1e-15);
    }

    #[test]
    fn householder_frame_is_orthonormal_complement() {
        let pole = vector(&[1.0, 2.0, -0.5]).normalize();
        let f = householder_frame(&pole);
        let g = f.transpose() * &f;
        assert!((g - Matrix::identity(2, 2)).norm() < 1e-14);
        assert!((f.transpose() * &pole).norm() < 1e-14);
        let std = householder_frame(&vector(&[0.0, 0.0, 1.0]));
        assert!((std - Matrix::identity(3, 2)).norm() < 1e-15);
    }

    #[test]
    fn rotation_maps_a_to_b() {
        let a = vector(&[1.0, 0.3, -0.2]).normalize();
        let b = vector(&[0.0, 0.0, 1.0]);
        let r = rotation_taking(&a, &b);
        assert!((&r * &a - &b).norm() < 1e-14);
        assert!((r.transpose() * &r - Matrix::identity(3, 3)).norm() < 1e-14);
        assert!((r.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hyperplane_through_three_points() {
        let p = [vector(&[1.0, 0.0, 0.0]), vector(&[0.0, 1.0, 0.0]), vector(&[0.0, 0.0, 1.0])];
        let (n, off) = hyperplane_through(&[&p[0], &p[1], &p[2]], 1e-12).unwrap();
        let s = n[0].signum();
        assert!((n * s - vector(&[1.0, 1.0, 1.0]) / 3f64.sqrt()).norm() < 1e-14);
        assert!((off * s - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    }
}

//! Vinberg's volume functional on the dual cone, its derivatives, the fiber
//! minimization behind the Θ map and the characteristic hypersurface, and
//! spherical centers.
//!
//! For a raw functional `v` in the open dual cone, `W(v)` is the Euclidean
//! volume of `{X ∈ C : ⟨v,X⟩ ≤ 1}`. Polyhedral cones are evaluated exactly by
//! a simplicial decomposition; quadric cones by the closed form for Lorentz
//! cones pulled back by a linear map. A Monte-Carlo estimator of the
//! chart integral is available for cross-checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{Backend, ConvexCone, ConvexDomain};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::projgeom::{ProjPoint, ProjTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Exact,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeResult {
    pub value: f64,
    pub estimator: Estimator,
    /// One standard error for quadrature, zero for exact evaluation.
    pub error_bound: f64,
}

/// Value, gradient and Hessian of `W` at one functional.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Vector,
    pub hessian: Matrix,
}

impl Evaluation {
    /// Centroid of the slice `{⟨v,X⟩ = 1} ∩ C`, equal to `−∇W / ((n+1)W)`.
    pub fn centroid(&self) -> Vector {
        let d = self.gradient.len() as f64;
        -&self.gradient / (d * self.value)
    }
}

#[derive(Debug, Clone)]
enum Kind {
    /// Simplicial cones: ray matrices (columns) and their absolute
    /// determinants.
    Simplicial(Vec<(Matrix, f64)>),
    /// `C = {XᵀMX < 0}` on the side of the interior point; stores `M⁻¹` and
    /// `|det M|^{-1/2}·ω_n/(n+1)`.
    Quadric { p: Matrix, k: f64 },
}

/// Precomputed description of a cone for repeated volume evaluations.
#[derive(Debug, Clone)]
pub struct VolumeModel {
    kind: Kind,
    /// Unit extreme rays (polyhedral cones).
    rays: Vec<Vector>,
    /// A homogeneous interior vector.
    interior: Vector,
    domain: ConvexDomain,
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl VolumeModel {
    pub fn new(cone: &ConvexCone) -> Result<Self> {
        let omega = &cone.domain;
        omega.validate()?;
        let chart = omega.chart();
        let interior = chart.lift(omega.interior_point());
        let kind = match omega.backend() {
            Backend::Ellipsoid(_) => {
                let m = omega.quadric().expect("ellipsoid");
                let d = m.nrows();
                let det = linalg::det(&m).abs();
                let p = m.try_inverse().ok_or_else(|| Error::DegenerateDomain("singular quadric".into()))?;
                let k = det.powf(-0.5) * unit_ball_volume(d - 1) / d as f64;
                Kind::Quadric { p, k }
            }
            _ => {
                let simplices = omega.simplices().expect("polyhedral backend");
                Kind::Simplicial(
                    simplices
                        .iter()
                        .map(|s| {
                            let r = linalg::columns(&s.iter().map(|x| chart.lift(x)).collect::<Vec<_>>());
                            let det = linalg::det(&r).abs();
                            (r, det)
                        })
                        .filter(|(_, det)| *det > 0.0)
                        .collect(),
                )
            }
        };
        let rays = omega
            .extreme_points()
            .map(|pts| pts.iter().map(|x| chart.lift(x).normalize()).collect())
            .unwrap_or_default();
        Ok(Self { kind, rays, interior, domain: omega.clone() })
    }

    /// Ambient dimension n+1.
    pub fn dim(&self) -> usize {
        self.interior.len()
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    /// Checks `v ∈ C*`.
    pub fn check_dual(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim() || v.iter().any(|x| !x.is_finite()) {
            return Err(invalid("functional has wrong dimension or is not finite"));
        }
        match &self.kind {
            Kind::Quadric { p, .. } => {
                let q = -v.dot(&(p * v));
                let side = v.dot(&self.interior);
                if q <= 0.0 || side <= 0.0 {
                    return Err(Error::OutsideDualCone { min_pairing: q.min(side) });
                }
            }
            Kind::Simplicial(_) => {
                let min = self.rays.iter().map(|r| r.dot(v)).fold(f64::INFINITY, f64::min);
                if !(min > 0.0) {
                    return Err(Error::OutsideDualCone { min_pairing: min });
                }
            }
        }
        Ok(())
    }

    pub fn in_dual(&self, v: &Vector) -> bool {
        self.check_dual(v).is_ok()
    }

    /// Exact value, gradient and Hessian.
    pub fn evaluate(&self, v: &Vector) -> Result<Evaluation> {
        self.check_dual(v)?;
        let d = self.dim();
        match &self.kind {
            Kind::Quadric { p, k } => {
                let pv = p * v;
                let q = -v.dot(&pv);
                let value = k * q.powf(-(d as f64) / 2.0);
                let gradient = &pv * (d as f64 * value / q);
                let hessian = (p + (&pv * pv.transpose()) * ((d as f64 + 2.0) / q)) * (d as f64 * value / q);
                Ok(Evaluation { value, gradient, hessian })
            }
            Kind::Simplicial(cones) => {
                let norm = factorial(d);
                let mut value = 0.0;
                let mut gradient = Vector::zeros(d);
                let mut hessian = Matrix::zeros(d, d);
                for (r, det) in cones {
                    let mut w = det / norm;
                    let mut s = Vector::zeros(d);
                    let mut aat = Matrix::zeros(d, d);
                    for k in 0..d {
                        let col = r.column(k);
                        let pairing = col.dot(v);
                        w /= pairing;
                        let a = col / pairing;
                        aat += &a * a.transpose();
                        s += a;
                    }
                    value += w;
                    gradient -= &s * w;
                    hessian += (&s * s.transpose() + aat) * w;
                }
                Ok(Evaluation { value, gradient, hessian })
            }
        }
    }

    pub fn volume(&self, v: &Vector) -> Result<VolumeResult> {
        Ok(VolumeResult { value: self.evaluate(v)?.value, estimator: Estimator::Exact, error_bound: 0.0 })
    }

    /// Monte-Carlo estimate of `(n+1)^{-1}∫_Ω ⟨lift(x),v⟩^{-(n+1)} dx` with a
    /// fixed seed; the error bound is one standard error.
    pub fn volume_quadrature(&self, v: &Vector, samples: usize, seed: u64) -> Result<VolumeResult> {
        self.check_dual(v)?;
        if samples < 2 {
            return Err(invalid("quadrature needs at least two samples"));
        }
        let omega = &self.domain;
        let n = omega.dim();
        let chart = omega.chart();
        // bounding box of the closure
        let lo = Vector::from_fn(n, |i, _| {
            let mut e = Vector::zeros(n);
            e[i] = -1.0;
            -omega.support_function(&e)
        });
        let hi = Vector::from_fn(n, |i, _| {
            let mut e = Vector::zeros(n);
            e[i] = 1.0;
            omega.support_function(&e)
        });
        let box_vol: f64 = (0..n).map(|i| hi[i] - lo[i]).product();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..samples {
            let x = Vector::from_fn(n, |i, _| lo[i] + (hi[i] - lo[i]) * rng.gen::<f64>());
            let f = if omega.margin(&x) > 0.0 {
                chart.lift(&x).dot(v).powi(-(n as i32 + 1)) / (n + 1) as f64
            } else {
                0.0
            };
            sum += f;
            sum_sq += f * f;
        }
        let m = samples as f64;
        let mean = sum / m;
        let var = (sum_sq / m - mean * mean).max(0.0) * m / (m - 1.0);
        Ok(VolumeResult {
            value: box_vol * mean,
            estimator: Estimator::Quadrature,
            error_bound: box_vol * (var / m).sqrt(),
        })
    }
}

/// `volume_functional` at the raw coefficient vector `v`.
pub fn volume_functional(cone: &ConvexCone, v: &Vector) -> Result<VolumeResult> {
    VolumeModel::new(cone)?.volume(v)
}

/// `grad_volume`: gradient of `W` with respect to the raw vector `v`.
pub fn grad_volume(cone: &ConvexCone, v: &Vector) -> Result<Vector> {
    Ok(VolumeModel::new(cone)?.evaluate(v)?.gradient)
}

/// `slice_centroid`: centroid of `C ∩ {⟨v,·⟩ = 1}`.
pub fn slice_centroid(cone: &ConvexCone, v: &Vector) -> Result<Vector> {
    Ok(VolumeModel::new(cone)?.evaluate(v)?.centroid())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberMinimum {
    /// Raw minimizing functional, normalized by `⟨v,q⟩ = 1`.
    pub functional: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// `‖μ(H_v) − q‖ / ‖q‖` at the minimizer.
    pub residual: f64,
}

impl FiberMinimum {
    pub fn functional_vector(&self) -> Vector {
        Vector::from_column_slice(&self.functional)
    }
}

impl VolumeModel {
    /// `min_volume_on_fiber`: damped Newton on `log W` over `{⟨v,q⟩ = 1}`,
    /// started from the chart-pole functional.
    pub fn min_on_fiber(&self, q: &Vector) -> Result<FiberMinimum> {
        if q.len() != self.dim() || self.domain.cone_margin(q) <= 0.0 {
            return Err(invalid("fiber point is not inside the cone"));
        }
        let qq = q.dot(q);
        let basis = linalg::orthonormal_complement(std::slice::from_ref(q), self.dim(), 1e-12)
            .ok_or_else(|| invalid("zero fiber point"))?;
        let nmat = linalg::columns(&basis);
        let pole = self.domain.chart().pole();
        let mut v = pole / pole.dot(q);
        let mut eval = self.evaluate(&v)?;
        const MAX_ITER: usize = 200;
        let residual = |e: &Evaluation| (e.centroid() - q).norm() / qq.sqrt();
        for it in 0..MAX_ITER {
            let res = residual(&eval);
            let w = eval.value;
            let g_full = &eval.gradient / w;
            let h_full = &eval.hessian / w - &g_full * g_full.transpose();
            let g = nmat.transpose() * &g_full;
            let h = nmat.transpose() * &h_full * &nmat;
            let step = match h.clone().cholesky() {
                Some(ch) => -ch.solve(&g),
                None => -g.clone(),
            };
            let decrement = -g.dot(&step);
            if res < 1e-14 || decrement < 1e-30 {
                return self.finish(v, eval, it, res);
            }
            let f0 = w.ln();
            let mut t = 1.0;
            let accepted = loop {
                let cand = &v + &nmat * (&step * t);
                if let Ok(e) = self.evaluate(&cand) {
                    if e.value.ln() <= f0 - 1e-4 * t * decrement {
                        break Some((cand, e));
                    }
                }
                t *= 0.5;
                if t < 1e-20 {
                    break None;
                }
            };
            match accepted {
                Some((cand, e)) => {
                    v = cand;
                    eval = e;
                }
                None => return self.finish(v, eval, it, res),
            }
        }
        let res = residual(&eval);
        self.finish(v, eval, MAX_ITER, res)
    }

    fn finish(&self, v: Vector, eval: Evaluation, iterations: usize, residual: f64) -> Result<FiberMinimum> {
        if residual >= 1e-6 {
            return Err(Error::ConvergenceFailure { iterations, residual });
        }
        Ok(FiberMinimum { functional: v.iter().copied().collect(), value: eval.value, iterations, residual })
    }

    /// `characteristic_point`: `m^{-1/(n+1)}·q` with `m` the fiber minimum.
    pub fn characteristic_point(&self, q: &Vector) -> Result<Vector> {
        let m = self.min_on_fiber(q)?;
        Ok(q * m.value.powf(-1.0 / self.dim() as f64))
    }

    /// `theta`: projectivized slice centroid.
    pub fn theta(&self, v: &Vector) -> Result<ProjPoint> {
        ProjPoint::from_signed(self.evaluate(v)?.centroid())
    }

    /// `theta_inverse`: the fiber minimizer at the characteristic point over
    /// `p`, which has volume 1.
    pub fn theta_inverse(&self, p: &ProjPoint) -> Result<Vector> {
        let q = self.orient(p)?;
        let m = self.min_on_fiber(&q)?;
        let t = m.value.powf(-1.0 / self.dim() as f64);
        Ok(m.functional_vector() / t)
    }

    /// Unit representative of `p` inside the cone.
    fn orient(&self, p: &ProjPoint) -> Result<Vector> {
        let mut q = p.coords().clone();
        if q.dot(self.domain.chart().pole()) < 0.0 {
            q = -q;
        }
        if self.domain.cone_margin(&q) <= 0.0 {
            return Err(invalid("point is not inside the domain"));
        }
        Ok(q)
    }
}

pub fn min_volume_on_fiber(cone: &ConvexCone, q: &Vector) -> Result<FiberMinimum> {
    VolumeModel::new(cone)?.min_on_fiber(q)
}

pub fn characteristic_point(cone: &ConvexCone, q: &Vector) -> Result<Vector> {
    VolumeModel::new(cone)?.characteristic_point(q)
}

pub fn theta(cone: &ConvexCone, v: &Vector) -> Result<ProjPoint> {
    VolumeModel::new(cone)?.theta(v)
}

pub fn theta_inverse(cone: &ConvexCone, p: &ProjPoint) -> Result<Vector> {
    VolumeModel::new(cone)?.theta_inverse(p)
}

/// The characteristic hypersurface as a radial function on unit directions.
#[derive(Debug, Clone)]
pub struct CharacteristicSurface {
    model: VolumeModel,
}

impl CharacteristicSurface {
    pub fn new(cone: &ConvexCone) -> Result<Self> {
        Ok(Self { model: VolumeModel::new(cone)? })
    }

    /// `t(q)` with `t(q)·q` on the surface, for unit `q` inside the cone.
    pub fn radius(&self, q: &Vector) -> Result<f64> {
        let m = self.model.min_on_fiber(q)?;
        Ok(m.value.powf(-1.0 / self.model.dim() as f64))
    }

    pub fn model(&self) -> &VolumeModel {
        &self.model
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalCenter {
    pub center: ProjPoint,
    /// Orthogonal map taking the center to the chart pole.
    pub rotation: ProjTransform,
    /// Norm of the point of the characteristic surface over the center.
    pub norm: f64,
    pub iterations: usize,
}

/// `spherical_center`: maximizes the fiber minimum `m(q)` over unit `q`,
/// equivalently minimizes `‖characteristic_point(q)‖`. The Riemannian
/// gradient of `log m` is `(n+1)(v* − q)`, so the ascent steps
/// `q ← normalize(q + α(v* − q))` with backtracking.
pub fn spherical_center(omega: &ConvexDomain) -> Result<SphericalCenter> {
    let model = VolumeModel::new(&ConvexCone::new(omega.clone()))?;
    let pole = omega.chart().pole().clone();
    let mut q = omega.chart().lift(omega.interior_point()).normalize();
    let mut fm = model.min_on_fiber(&q)?;
    const MAX_ITER: usize = 500;
    let mut iterations = 0;
    let mut alpha: f64 = 0.5;
    while iterations < MAX_ITER {
        let v = fm.functional_vector();
        let dir = &v - &q;
        if dir.norm() < 1e-14 {
            break;
        }
        let mut accepted = None;
        let mut a = alpha;
        while a > 1e-12 {
            let cand = (&q + &dir * a).normalize();
            if omega.cone_margin(&cand) > 0.0 {
                if let Ok(f) = model.min_on_fiber(&cand) {
                    // a step within rounding of the current value is accepted
                    // when it shrinks the fixed-point residual
                    let flat = fm.value - f.value <= 1e-13 * fm.value
                        && (f.functional_vector() - &cand).norm() < dir.norm();
                    if f.value >= fm.value || flat {
                        accepted = Some((cand, f, a));
                        break;
                    }
                }
            }
            a *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((cand, f, a)) => {
                let moved = (&cand - &q).norm();
                q = cand;
                fm = f;
                alpha = (a * 2.0).min(0.5);
                if moved < 1e-15 {
                    break;
                }
            }
            None => break,
        }
    }
    let residual = (fm.functional_vector() - &q).norm();
    if residual > 1e-9 {
        return Err(Error::ConvergenceFailure { iterations, residual });
    }
    let rotation = ProjTransform::new(linalg::rotation_taking(&q, &pole))?;
    Ok(SphericalCenter {
        center: ProjPoint::from_signed(q)?,
        rotation,
        norm: fm.value.powf(-1.0 / model.dim() as f64),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    fn orthant(n: usize) -> ConvexCone {
        ConvexCone::new(ConvexDomain::orthant(n))
    }

    fn round(n: usize) -> ConvexCone {
        ConvexCone::new(ConvexDomain::ball(n, 1.0))
    }

    #[test]
    fn orthant_volumes() {
        let v = volume_functional(&orthant(1), &vector(&[1.0, 1.0])).unwrap();
        assert!((v.value - 0.5).abs() < 1e-14);
        assert_eq!(v.estimator, Estimator::Exact);
        let v = volume_functional(&orthant(2), &vector(&[1.0, 2.0, 1.0])).unwrap();
        assert!((v.value - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn orthant_gradient() {
        let g = grad_volume(&orthant(1), &vector(&[1.0, 1.0])).unwrap();
        assert!((g - vector(&[-0.5, -0.5])).amax() < 1e-14);
    }

    #[test]
    fn round_cone_volume_matches_cone_formula() {
        // {x₃ ≤ 1} ∩ {x₃ > |x'|} is a cone of height 1 over the unit disk
        let v = volume_functional(&round(2), &vector(&[0.0, 0.0, 1.0])).unwrap();
        assert!((v.value - std::f64::consts::PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_agrees_with_exact() {
        let model = VolumeModel::new(&round(2)).unwrap();
        let v = vector(&[0.2, -0.1, 1.0]);
        let exact = model.volume(&v).unwrap().value;
        let mc = model.volume_quadrature(&v, 200_000, 7).unwrap();
        assert!((mc.value - exact).abs() < 4.0 * mc.error_bound);
        let model = VolumeModel::new(&orthant(2)).unwrap();
        let v = vector(&[1.0, 2.0, 1.5]);
        let exact = model.volume(&v).unwrap().value;
        let mc = model.volume_quadrature(&v, 200_000, 7).unwrap();
        assert!((mc.value - exact).abs() < 4.0 * mc.error_bound);
    }

    #[test]
    fn outside_dual_cone_rejected() {
        let err = volume_functional(&orthant(1), &vector(&[1.0, -0.1])).unwrap_err();
        assert_eq!(err.code(), "outside-dual-cone");
        let err = volume_functional(&round(2), &vector(&[1.0, 0.0, 0.5])).unwrap_err();
        assert_eq!(err.code(), "outside-dual-cone");
    }

    #[test]
    fn centroids() {
        let c = slice_centroid(&orthant(1), &vector(&[1.0, 1.0])).unwrap();
        assert!((c - vector(&[0.5, 0.5])).amax() < 1e-14);
        let c = slice_centroid(&orthant(2), &vector(&[1.0, 1.0, 1.0])).unwrap();
        assert!((c - Vector::from_element(3, 1.0 / 3.0)).amax() < 1e-14);
        let c = slice_centroid(&round(2), &vector(&[0.0, 0.0, 2.0])).unwrap();
        assert!((c - vector(&[0.0, 0.0, 0.5])).amax() < 1e-14);
    }

    #[test]
    fn fiber_minimum_orthant() {
        let m = min_volume_on_fiber(&orthant(1), &vector(&[1.0, 1.0])).unwrap();
        assert!((m.functional_vector() - vector(&[0.5, 0.5])).amax() < 1e-12);
        assert!((m.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn characteristic_point_orthant_hyperbola() {
        let cone = orthant(1);
        for k in 1..50 {
            let a = std::f64::consts::FRAC_PI_2 * k as f64 / 50.0;
            let p = characteristic_point(&cone, &vector(&[a.cos(), a.sin()])).unwrap();
            assert!((p[0] * p[1] - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn theta_orthant() {
        let p = theta(&orthant(1), &vector(&[0.5, 0.5])).unwrap();
        assert!((p.coords() - vector(&[1.0, 1.0]).normalize()).amax() < 1e-14);
        let v = theta_inverse(&orthant(1), &p).unwrap();
        assert!((v[0] - v[1]).abs() < 1e-12);
        assert!((volume_functional(&orthant(1), &v).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spherical_centers_by_symmetry() {
        let c = spherical_center(&ConvexDomain::unit_disk()).unwrap();
        assert!((c.center.coords() - vector(&[0.0, 0.0, 1.0])).amax() < 1e-12);
        let c = spherical_center(&ConvexDomain::orthant(2)).unwrap();
        assert!((c.center.coords() - Vector::from_element(3, 1.0 / 3f64.sqrt())).amax() < 1e-10);
        let rotated = crate::projgeom::apply(&c.rotation, &c.center);
        assert!((rotated.coords() - ConvexDomain::orthant(2).chart().pole()).amax() < 1e-12);
    }
}

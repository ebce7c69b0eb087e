use std::f64::consts::PI;

use convproj::domain::{ConvexCone, ConvexDomain};
use convproj::hilbert::{distance, distance_chart, geodesic};
use convproj::linalg::{matrix, vector, Matrix, Vector};
use convproj::normalize::{box_bound_check, moments};
use convproj::plconvex::{certify_generic_convex, log_contour_value, LinkReading, SimplicialHypersurface};
use convproj::projgeom::{apply, AffineChart, ProjTransform};
use convproj::vinberg::volume_functional;
use proptest::prelude::*;

fn pentagon() -> ConvexDomain {
    let pts: Vec<Vector> = (0..5)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / 5.0 + 0.2;
            vector(&[t.cos(), 0.7 * t.sin()])
        })
        .collect();
    ConvexDomain::from_vertices(AffineChart::standard(2), &pts).unwrap()
}

fn disk_point() -> impl Strategy<Value = Vector> {
    (0.0..2.0 * PI, 0.0..0.95f64).prop_map(|(t, r)| vector(&[r * t.cos(), r * t.sin()]))
}

fn pentagon_point() -> impl Strategy<Value = Vector> {
    (-0.5..0.5f64, -0.3..0.3f64).prop_map(|(a, b)| vector(&[a, b]))
}

fn vee() -> SimplicialHypersurface {
    let vs = vec![vector(&[-1.0, 2.0]), vector(&[0.0, 1.0]), vector(&[1.0, 2.0])];
    SimplicialHypersurface::new(vs, vec![vec![0, 1], vec![1, 2]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_projectively_invariant(
        x in pentagon_point(),
        y in pentagon_point(),
        m in proptest::collection::vec(-0.2..0.2f64, 9),
    ) {
        let omega = pentagon();
        let a = ProjTransform::new(Matrix::identity(3, 3) + Matrix::from_row_slice(3, 3, &m)).unwrap();
        let moved = omega.transform(&a).unwrap();
        let chart = omega.chart();
        let d = distance(&omega, &chart.point(&x), &chart.point(&y)).unwrap();
        let da = distance(&moved, &apply(&a, &chart.point(&x)), &apply(&a, &chart.point(&y))).unwrap();
        prop_assert!((d - da).abs() < 1e-8, "{d} vs {da}");
    }

    #[test]
    fn geodesic_gaps_are_equal(x in disk_point(), y in disk_point(), k in 1usize..8) {
        let omega = ConvexDomain::unit_disk();
        let chart = omega.chart();
        prop_assume!((&x - &y).norm() > 1e-6);
        let pts = geodesic(&omega, &chart.point(&x), &chart.point(&y), k).unwrap();
        let total = distance_chart(&omega, &x, &y).unwrap();
        for w in pts.windows(2) {
            let gap = distance(&omega, &w[0], &w[1]).unwrap();
            prop_assert!((gap - total / k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn double_dual_preserves_support(t in 0.0..2.0 * PI) {
        let omega = pentagon();
        let back = omega.dual_domain().unwrap().dual_domain().unwrap();
        let u = vector(&[t.cos(), t.sin()]);
        prop_assert!((omega.support_function(&u) - back.support_function(&u)).abs() < 1e-9);
    }

    #[test]
    fn volume_is_homogeneous(a in 0.2..0.8f64, b in 0.0..2.0 * PI, t in 0.3..3.0f64) {
        let cone = ConvexCone::new(ConvexDomain::unit_disk());
        let phi = vector(&[a * b.cos(), a * b.sin(), 1.0]);
        let v = volume_functional(&cone, &phi).unwrap().value;
        let vt = volume_functional(&cone, &(&phi * t)).unwrap().value;
        prop_assert!((vt * t.powi(3) - v).abs() < 1e-12 * v);
    }

    #[test]
    fn volume_is_convex_along_segments(a in 0.3..2.0f64, b in 0.3..2.0f64, c in 0.3..2.0f64, d in 0.3..2.0f64) {
        let cone = ConvexCone::new(ConvexDomain::orthant(1));
        let p = vector(&[a, b]);
        let q = vector(&[c, d]);
        prop_assume!((&p - &q).norm() > 1e-3);
        let v = |x: &Vector| volume_functional(&cone, x).unwrap().value;
        let mid = (&p + &q) * 0.5;
        prop_assert!(v(&mid) < 0.5 * (v(&p) + v(&q)));
    }

    #[test]
    fn moments_follow_translations(dx in -1.0..1.0f64, dy in -1.0..1.0f64) {
        let base = pentagon();
        let pts: Vec<Vector> = base.extreme_points().unwrap();
        let shift = vector(&[dx, dy]);
        let moved: Vec<Vector> = pts.iter().map(|p| p + &shift).collect();
        let moved = ConvexDomain::from_vertices(AffineChart::standard(2), &moved).unwrap();
        let (m0, m1) = (moments(&base).unwrap(), moments(&moved).unwrap());
        prop_assert!((m1.centroid_vector() - m0.centroid_vector() - shift).amax() < 1e-12);
        prop_assert!((m1.second_moment_matrix() - m0.second_moment_matrix()).amax() < 1e-12);
    }

    #[test]
    fn contractions_satisfy_box_bound(s in 0.1..1.0f64, t in 0.1..1.0f64) {
        let a = Matrix::from_diagonal(&vector(&[s, t, 1.0]));
        let r = box_bound_check(&a, 1.0).unwrap();
        prop_assert!(r.hypothesis && r.holds);
    }

    #[test]
    fn contour_is_homothety_equivariant(f in 0.05..0.95f64, s in 0.1..10.0f64) {
        let surface = vee();
        let x = vector(&[2.0 * f - 1.0, 1.0 + (2.0 * f - 1.0).abs()]);
        let h = log_contour_value(&surface, &x).unwrap();
        let hs = log_contour_value(&surface, &(&x * s)).unwrap();
        prop_assert!(h.abs() < 1e-14);
        prop_assert!((hs - (h - s.ln())).abs() < 1e-13);
    }

    #[test]
    fn certificate_survives_unimodular_maps(shear in -0.3..0.3f64, stretch in 0.5..2.0f64) {
        let a = matrix(&[vec![stretch, 0.0], vec![shear, 1.0 / stretch]]);
        let base = certify_generic_convex(&vee(), LinkReading::AllLink).unwrap();
        let mapped = certify_generic_convex(&vee().map_vertices(&a).unwrap(), LinkReading::AllLink).unwrap();
        prop_assert!(base.certified && mapped.certified);
        prop_assert!((base.margin - mapped.margin).abs() < 1e-12);
    }
}

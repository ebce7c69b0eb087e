use super::*;
use crate::linalg::vector;

fn std_point(x: &[f64]) -> ProjPoint {
    AffineChart::standard(x.len()).point(&vector(x))
}

fn square() -> ConvexDomain {
    ConvexDomain::cube(2, 1.0)
}

fn triangle() -> ConvexDomain {
    ConvexDomain::from_vertices(
        AffineChart::standard(2),
        &[vector(&[0.0, 0.0]), vector(&[1.0, 0.0]), vector(&[0.0, 1.0])],
    )
    .unwrap()
}

fn diamond() -> ConvexDomain {
    ConvexDomain::from_vertices(
        AffineChart::standard(2),
        &[vector(&[1.0, 0.0]), vector(&[-1.0, 0.0]), vector(&[0.0, 1.0]), vector(&[0.0, -1.0])],
    )
    .unwrap()
}

fn octagon_graph() -> ConvexDomain {
    let k = 8;
    let dirs: Vec<Vector> = (0..k)
        .map(|j| {
            let a = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            vector(&[a.cos(), a.sin()])
        })
        .collect();
    let radii = (0..k).map(|j| if j % 2 == 0 { 1.0 } else { 0.9 }).collect();
    let simplices = (0..k).map(|j| vec![j, (j + 1) % k]).collect();
    ConvexDomain::radial_graph(AffineChart::standard(2), vector(&[0.0, 0.0]), dirs, radii, simplices).unwrap()
}

#[test]
fn validate_disk_margin_one() {
    let cert = ConvexDomain::unit_disk().validate().unwrap();
    assert_eq!(cert.hyperplane, DualFunctional::coordinate(3, 2));
    assert!((cert.margin - 1.0).abs() < 1e-12);
}

#[test]
fn validate_diamond_margin_one() {
    let cert = diamond().validate().unwrap();
    assert!((cert.margin - 1.0).abs() < 1e-12);
}

#[test]
fn halfplane_is_not_properly_convex() {
    let err = ConvexDomain::from_halfspaces(AffineChart::standard(2), &[(vector(&[-1.0, 0.0]), 0.0)]).unwrap_err();
    assert_eq!(err.code(), "not-properly-convex");
}

#[test]
fn contains_disk_examples() {
    let d = ConvexDomain::unit_disk();
    let c = d.contains(&std_point(&[0.0, 0.0]));
    assert_eq!(c.location, Location::Inside);
    assert!((c.margin - 1.0).abs() < 1e-15);
    assert_eq!(d.contains(&std_point(&[1.0, 0.0])).location, Location::Boundary);
    assert_eq!(d.contains(&std_point(&[2.0, 0.0])).location, Location::Outside);
}

#[test]
fn contains_is_projective() {
    let d = ConvexDomain::unit_disk();
    let p = ProjPoint::from_signed(vector(&[-0.2, 0.0, -1.0])).unwrap();
    assert_eq!(d.contains(&p).location, Location::Inside);
}

#[test]
fn chord_disk_diameter() {
    let d = ConvexDomain::unit_disk();
    let c = d.chord(&std_point(&[0.0, 0.0]), &std_point(&[0.5, 0.0])).unwrap();
    assert!((c.chart_minus - vector(&[-1.0, 0.0])).amax() < 1e-15);
    assert!((c.chart_plus - vector(&[1.0, 0.0])).amax() < 1e-15);
}

#[test]
fn chord_square_diagonal() {
    let c = square().chord(&std_point(&[0.0, 0.0]), &std_point(&[0.5, 0.5])).unwrap();
    assert!((c.chart_plus - vector(&[1.0, 1.0])).amax() < 1e-15);
    assert!((c.chart_minus - vector(&[-1.0, -1.0])).amax() < 1e-15);
}

#[test]
fn chord_equal_points_rejected() {
    let p = std_point(&[0.1, 0.0]);
    assert_eq!(ConvexDomain::unit_disk().chord(&p, &p).unwrap_err(), Error::DegenerateChord);
}

#[test]
fn chord_outside_point_rejected() {
    let err = ConvexDomain::unit_disk().chord(&std_point(&[0.0, 0.0]), &std_point(&[2.0, 0.0])).unwrap_err();
    assert_eq!(err.code(), "invalid-input");
}

#[test]
fn chord_endpoints_on_frontier_and_samples_inside() {
    for d in [ConvexDomain::unit_disk(), square(), triangle(), octagon_graph()] {
        let x = d.interior_proj();
        let y = d.chart().point(&(d.interior_point() + vector(&[0.05, 0.02])));
        let c = d.chord(&x, &y).unwrap();
        assert!(d.contains(&c.a_minus).margin.abs() < 1e-9);
        assert!(d.contains(&c.a_plus).margin.abs() < 1e-9);
        for k in 1..=16 {
            let t = k as f64 / 17.0;
            let p = &c.chart_minus * (1.0 - t) + &c.chart_plus * t;
            assert_eq!(d.contains_chart(&p).location, Location::Inside);
        }
    }
}

#[test]
fn support_disk_tangent() {
    let h = ConvexDomain::unit_disk().support(&std_point(&[1.0, 0.0])).unwrap();
    assert!((h.coeffs() - vector(&[-1.0, 0.0, 1.0]).normalize()).amax() < 1e-12);
}

#[test]
fn support_square_facet_and_vertex() {
    let sq = square();
    let h = sq.support(&std_point(&[1.0, 0.3])).unwrap();
    assert!((h.coeffs() - vector(&[-1.0, 0.0, 1.0]).normalize()).amax() < 1e-12);
    let b = std_point(&[1.0, 1.0]);
    let (n, _) = sq.support_chart(&vector(&[1.0, 1.0])).unwrap();
    assert!((n - vector(&[1.0, 1.0]).normalize()).amax() < 1e-12);
    assert_eq!(sq.supporting_facets(&b).unwrap().len(), 2);
}

#[test]
fn support_interior_point_rejected() {
    let err = square().support(&std_point(&[0.0, 0.0])).unwrap_err();
    assert_eq!(err.code(), "not-on-frontier");
}

#[test]
fn support_orientation_positive_inside() {
    let d = ConvexDomain::unit_disk();
    let b = std_point(&[0.6, 0.8]);
    let h = d.support(&b).unwrap();
    assert!(h.pair(&b).abs() < 1e-12);
    assert!(h.pair(&d.interior_proj()) > 0.0);
}

#[test]
fn round_cone_is_self_dual() {
    let dual = ConvexDomain::unit_disk().dual_domain().unwrap();
    let Backend::Ellipsoid(e) = dual.backend() else { panic!("ellipsoid expected") };
    assert!(e.center.amax() < 1e-12);
    assert!((&e.shape - Matrix::identity(2, 2)).amax() < 1e-12);
}

#[test]
fn orthant_is_self_dual() {
    let o = ConvexDomain::orthant(2);
    let dual = o.dual_domain().unwrap();
    let mut a: Vec<Vec<f64>> = dual
        .extreme_points()
        .unwrap()
        .iter()
        .map(|v| dual.chart().lift(v).normalize().iter().copied().collect())
        .collect();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut e = vec![vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]];
    e.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for (p, q) in a.iter().zip(&e) {
        for (s, t) in p.iter().zip(q) {
            assert!((s - t).abs() < 1e-12);
        }
    }
}

#[test]
fn square_dual_is_diamond() {
    let dual = square().dual_domain().unwrap();
    assert_eq!(dual.chart(), &AffineChart::standard(2));
    let mut vs: Vec<(f64, f64)> = dual.extreme_points().unwrap().iter().map(|v| (v[0], v[1])).collect();
    vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let expected = [(-1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (1.0, 0.0)];
    for (a, b) in vs.iter().zip(expected) {
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    }
}

#[test]
fn polytope_double_dual_recovers_vertices() {
    let t = ConvexDomain::from_vertices(
        AffineChart::standard(2),
        &[vector(&[0.3, 0.1]), vector(&[1.2, -0.4]), vector(&[0.2, 0.9]), vector(&[-0.5, 0.2])],
    )
    .unwrap();
    let dd = t.dual_domain().unwrap().dual_domain().unwrap();
    assert!((dd.chart().pole() - t.chart().pole()).amax() < 1e-12);
    let a = t.extreme_points().unwrap();
    let b = dd.extreme_points().unwrap();
    assert_eq!(a.len(), b.len());
    for v in &a {
        assert!(b.iter().any(|w| (v - w).amax() < 1e-9));
    }
}

#[test]
fn ellipsoid_double_dual_support_function() {
    let e = ConvexDomain::ellipsoid(
        AffineChart::standard(2),
        vector(&[0.2, -0.1]),
        crate::linalg::matrix(&[vec![0.5, 0.1], vec![0.1, 0.2]]),
    )
    .unwrap();
    let dd = e.dual_domain().unwrap().dual_domain().unwrap();
    for k in 0..32 {
        let a = k as f64 * 0.2;
        let u = vector(&[a.cos(), a.sin()]);
        assert!((e.support_function(&u) - dd.support_function(&u)).abs() < 1e-6);
    }
}

#[test]
fn radial_graph_dual_round_trip() {
    let g = octagon_graph();
    let dd = g.dual_domain().unwrap().dual_domain().unwrap();
    for k in 0..32 {
        let a = k as f64 * 0.2;
        let u = vector(&[a.cos(), a.sin()]);
        assert!((g.support_function(&u) - dd.support_function(&u)).abs() < 1e-6);
    }
}

#[test]
fn flats_examples() {
    let e = ConvexDomain::ellipsoid(AffineChart::standard(2), vector(&[0.0, 0.0]), Matrix::from_diagonal(&vector(&[4.0, 1.0]))).unwrap();
    assert!(e.boundary_flats().is_empty());
    assert_eq!(triangle().boundary_flats().len(), 3);
    assert_eq!(square().boundary_flats().len(), 4);
}

#[test]
fn radial_graph_flats_merge_coplanar_simplices() {
    // a square sampled at 8 directions has 4 flat sides
    let dirs: Vec<Vector> = (0..8)
        .map(|j| {
            let a = std::f64::consts::FRAC_PI_4 * j as f64;
            vector(&[a.cos(), a.sin()])
        })
        .collect();
    let radii = (0..8).map(|j| if j % 2 == 0 { 1.0 } else { 2f64.sqrt() }).collect();
    let simplices = (0..8).map(|j| vec![j, (j + 1) % 8]).collect();
    let d = ConvexDomain::radial_graph(AffineChart::standard(2), vector(&[0.0, 0.0]), dirs, radii, simplices).unwrap();
    assert_eq!(d.boundary_flats().len(), 4);
}

#[test]
fn transform_preserves_membership() {
    let d = square();
    let a = ProjTransform::new(crate::linalg::matrix(&[
        vec![1.0, 0.2, 0.1],
        vec![0.0, 0.9, -0.1],
        vec![0.1, 0.05, 1.1],
    ]))
    .unwrap();
    let ad = d.transform(&a).unwrap();
    for x in [[0.0, 0.0], [0.9, -0.5], [-0.99, 0.99]] {
        let p = std_point(&x);
        let q = crate::projgeom::apply(&a, &p);
        assert_eq!(ad.contains(&q).location, Location::Inside);
    }
    let q = crate::projgeom::apply(&a, &std_point(&[1.5, 0.0]));
    assert_eq!(ad.contains(&q).location, Location::Outside);
}

#[test]
fn json_round_trip() {
    for d in [ConvexDomain::unit_disk(), square(), triangle(), octagon_graph()] {
        let text = d.to_spec().to_json();
        let back = ConvexDomain::from_json(&text).unwrap();
        assert_eq!(back.support_function(&vector(&[0.3, 0.7])), d.support_function(&vector(&[0.3, 0.7])));
    }
}

#[test]
fn json_rejects_malformed_and_nonfinite() {
    assert!(ConvexDomain::from_json("{").is_err());
    assert!(ConvexDomain::from_json(r#"{"chart":[0,0,1],"backend":{"type":"vpoly","vertices":[[0,0],[1,0],[0,NaN]]}}"#).is_err());
    assert!(ConvexDomain::from_json(r#"{"chart":[0,0,1],"backend":{"type":"vpoly","vertices":[[0,0],[1,0],[0,1e999]]}}"#).is_err());
    let ok = ConvexDomain::from_json(r#"{"chart":[0,0,1],"backend":{"type":"ellipsoid","center":[0,0],"shape":[[1,0],[0,1]]}}"#);
    assert!(ok.is_ok());
}

//! Static SVG figures for planar charts.

use std::fmt::Write;

use convproj::domain::ConvexDomain;
use convproj::linalg::{self, Vector};

const SIZE: f64 = 480.0;
const SAMPLES: usize = 256;

/// Frontier polygon sampled by ray exits from the interior point.
pub fn outline(omega: &ConvexDomain) -> Vec<Vector> {
    let c = omega.interior_point();
    let mut pts: Vec<Vector> = (0..SAMPLES)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / SAMPLES as f64;
            let u = linalg::vector(&[t.cos(), t.sin()]);
            c + &u * omega.ray_exit(c, &u)
        })
        .collect();
    pts.push(pts[0].clone());
    pts
}

/// Domain outline with marked points and polylines; `None` unless the
/// chart is planar.
pub fn domain_figure(omega: &ConvexDomain, points: &[Vector], lines: &[Vec<Vector>]) -> Option<String> {
    if omega.dim() != 2 {
        return None;
    }
    let frame = outline(omega);
    let all = frame.iter().chain(points).chain(lines.iter().flatten());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12) * 1.1;
    let mid = [(hi[0] + lo[0]) / 2.0, (hi[1] + lo[1]) / 2.0];
    let map = |p: &Vector| ((p[0] - mid[0]) / span * SIZE + SIZE / 2.0, SIZE / 2.0 - (p[1] - mid[1]) / span * SIZE);
    let path = |ps: &[Vector]| ps.iter().map(&map).map(|(x, y)| format!("{x:.3},{y:.3}")).collect::<Vec<_>>().join(" ");

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(out, r##"<polygon points="{}" fill="#eef3fb" stroke="#1f3b73" stroke-width="1.5"/>"##, path(&frame));
    for l in lines {
        let _ = writeln!(out, r##"<polyline points="{}" fill="none" stroke="#b03a2e" stroke-width="1"/>"##, path(l));
    }
    for p in points {
        let (x, y) = map(p);
        let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="2.5" fill="#111"/>"##);
    }
    out.push_str("</svg>\n");
    Some(out)
}

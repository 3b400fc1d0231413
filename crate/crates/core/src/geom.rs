//! 2D/3D convex polygon helpers used by cascade fitting.

use alloc::vec::Vec;

use crate::math::{Vec2, Vec3};

/// Convex hull (Andrew's monotone chain), counter-clockwise, without
/// collinear points. Returns fewer than 3 points for degenerate input.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.iter().copied().filter(|p| p.x.is_finite() && p.y.is_finite()).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: &mut dyn Iterator<Item = &Vec2> =
            if pass == 0 { &mut pts.iter() } else { &mut pts.iter().rev() };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Signed area, positive for counter-clockwise polygons.
pub fn signed_area(poly: &[Vec2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut a = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        a += p.cross(q);
    }
    0.5 * a
}

/// Keeps the part of a convex polygon where `dot(p, normal) >= offset`.
pub fn clip_half_plane(poly: &[Vec2], normal: Vec2, offset: f64) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    if poly.is_empty() {
        return out;
    }
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let da = a.dot(normal) - offset;
        let db = b.dot(normal) - offset;
        if da >= 0.0 {
            out.push(a);
        }
        if (da >= 0.0) != (db >= 0.0) {
            let t = da / (da - db);
            out.push(a + (b - a) * t);
        }
    }
    merge_close(&mut out);
    out
}

/// Drops vertices that coincide with their predecessor up to rounding.
fn merge_close(poly: &mut Vec<Vec2>) {
    let scale = poly.iter().fold(1.0f64, |m, v| m.max(v.x.abs()).max(v.y.abs()));
    let eps = 1e-12 * scale;
    let close = |a: Vec2, b: Vec2| (a.x - b.x).abs() <= eps && (a.y - b.y).abs() <= eps;
    poly.dedup_by(|b, a| close(*a, *b));
    while poly.len() > 1 && close(poly[0], poly[poly.len() - 1]) {
        poly.pop();
    }
}

/// Inclusive containment test for a counter-clockwise convex polygon.
pub fn convex_contains(poly: &[Vec2], p: Vec2, tol: f64) -> bool {
    if poly.len() < 3 {
        return false;
    }
    (0..poly.len()).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let e = b - a;
        let len = e.length();
        len == 0.0 || e.cross(p - a) / len >= -tol
    })
}

/// Squared distance from `p` to segment `ab`.
pub fn segment_distance_squared(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let l2 = ab.length_squared();
    let t = if l2 > 0.0 { ((p - a).dot(ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (a + ab * t - p).length_squared()
}

/// Whether `p` lies within `dist` of a counter-clockwise convex polygon.
pub fn within_distance(poly: &[Vec2], p: Vec2, dist: f64) -> bool {
    if convex_contains(poly, p, 0.0) {
        return true;
    }
    let d2 = dist * dist;
    (0..poly.len()).any(|i| segment_distance_squared(p, poly[i], poly[(i + 1) % poly.len()]) <= d2)
}

/// Axis-aligned bounds of a point set.
pub fn bounds(points: &[Vec2]) -> Option<(Vec2, Vec2)> {
    let first = *points.first()?;
    Some(points.iter().fold((first, first), |(lo, hi), &p| (lo.min(p), hi.max(p))))
}

/// 3D plane `dot(normal, p) >= offset` as a half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec3,
    pub offset: f64,
}

impl HalfSpace {
    pub fn through(point: Vec3, normal: Vec3) -> Self {
        Self { normal, offset: normal.dot(point) }
    }

    #[inline]
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Clips a planar convex 3D polygon against a half-space.
pub fn clip_polygon_3d(poly: &[Vec3], h: &HalfSpace) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let da = h.signed_distance(a);
        let db = h.signed_distance(b);
        if da >= 0.0 {
            out.push(a);
        }
        if (da >= 0.0) != (db >= 0.0) {
            let t = da / (da - db);
            out.push(a + (b - a) * t);
        }
    }
    out
}

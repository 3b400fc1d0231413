//! View-dependent cascade fitting.
//!
//! The frustum is intersected with the heightfield bounding box, projected to
//! the ground and split along the projected view direction into three
//! cascades at logarithmic depths. Each cascade polygon is fitted into a
//! square texture whose world-space footprint is snapped to the minimum-cell
//! lattice so that sample positions stay put while the camera moves.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geom::{self, HalfSpace};
use crate::grid::{AdaptiveGrid, Rect};
use crate::math::{cbrt, ceil, floor, tan, Vec2, Vec3};

pub const CASCADE_COUNT: usize = 3;

/// Smallest near depth, as a fraction of the far depth, used for splitting.
pub const MIN_NEAR_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum CascadeError {
    InvalidCamera(&'static str),
    NothingVisible,
}

impl fmt::Display for CascadeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CascadeError::InvalidCamera(why) => write!(f, "invalid camera: {why}"),
            CascadeError::NothingVisible => f.write_str("nothing visible"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CascadeError {}

/// Perspective camera. Directions are normalized on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraView {
    pub eye: Vec3,
    pub look_dir: Vec3,
    pub up: Vec3,
    /// Vertical field of view in degrees.
    pub fov_y: f64,
    /// Width over height.
    pub aspect: f64,
    pub near_clip: f64,
    pub far_clip: f64,
}

impl CameraView {
    pub fn new(
        eye: Vec3,
        look_dir: Vec3,
        up: Vec3,
        fov_y: f64,
        aspect: f64,
        near_clip: f64,
        far_clip: f64,
    ) -> Result<Self, CascadeError> {
        let finite = [eye.x, eye.y, eye.z, fov_y, aspect, near_clip, far_clip]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(CascadeError::InvalidCamera("non-finite parameter"));
        }
        if !(fov_y > 0.0 && fov_y < 180.0) {
            return Err(CascadeError::InvalidCamera("fov_y must be in (0, 180)"));
        }
        if !(aspect > 0.0) {
            return Err(CascadeError::InvalidCamera("aspect must be positive"));
        }
        if !(near_clip > 0.0) {
            return Err(CascadeError::InvalidCamera("near must be positive"));
        }
        if !(far_clip > near_clip) {
            return Err(CascadeError::InvalidCamera("far must exceed near"));
        }
        let (ll, ul) = (look_dir.length(), up.length());
        if !(ll > 0.0 && ll.is_finite() && ul > 0.0 && ul.is_finite()) {
            return Err(CascadeError::InvalidCamera("look and up must be non-zero"));
        }
        let look_dir = look_dir.normalize();
        let up = up.normalize();
        if look_dir.cross(up).length() < 1e-9 {
            return Err(CascadeError::InvalidCamera("look and up are parallel"));
        }
        Ok(Self { eye, look_dir, up, fov_y, aspect, near_clip, far_clip })
    }

    pub fn look_at(
        eye: Vec3,
        target: Vec3,
        up: Vec3,
        fov_y: f64,
        aspect: f64,
        near_clip: f64,
        far_clip: f64,
    ) -> Result<Self, CascadeError> {
        Self::new(eye, target - eye, up, fov_y, aspect, near_clip, far_clip)
    }

    /// Same camera moved by `offset`.
    pub fn translated(&self, offset: Vec3) -> Self {
        Self { eye: self.eye + offset, ..*self }
    }

    /// Orthonormal `(forward, right, up)`.
    pub fn basis(&self) -> (Vec3, Vec3, Vec3) {
        let f = self.look_dir;
        let r = f.cross(self.up).normalize();
        let u = r.cross(f);
        (f, r, u)
    }

    fn half_extents(&self) -> (f64, f64) {
        let th = tan(self.fov_y.to_radians() * 0.5);
        (th * self.aspect, th)
    }

    /// Normalized direction through normalized device coordinates in `[-1, 1]²`
    /// (`ndc_y = 1` at the top of the image).
    pub fn ray_direction(&self, ndc_x: f64, ndc_y: f64) -> Vec3 {
        let (f, r, u) = self.basis();
        let (tw, th) = self.half_extents();
        (f + r * (ndc_x * tw) + u * (ndc_y * th)).normalize()
    }

    /// Direction through the center of pixel `(px, py)` of a `width × height` image.
    pub fn pixel_direction(&self, px: u32, py: u32, width: u32, height: u32) -> Vec3 {
        let nx = 2.0 * (px as f64 + 0.5) / width as f64 - 1.0;
        let ny = 1.0 - 2.0 * (py as f64 + 0.5) / height as f64;
        self.ray_direction(nx, ny)
    }

    /// Near corners then far corners, each bottom-left, bottom-right,
    /// top-right, top-left.
    pub fn frustum_corners(&self) -> [Vec3; 8] {
        let (f, r, u) = self.basis();
        let (tw, th) = self.half_extents();
        let mut out = [Vec3::ZERO; 8];
        for (k, d) in [self.near_clip, self.far_clip].into_iter().enumerate() {
            let c = self.eye + f * d;
            let (hw, hh) = (tw * d, th * d);
            out[4 * k] = c - r * hw - u * hh;
            out[4 * k + 1] = c + r * hw - u * hh;
            out[4 * k + 2] = c + r * hw + u * hh;
            out[4 * k + 3] = c - r * hw + u * hh;
        }
        out
    }

    /// Inward-facing frustum planes.
    pub fn frustum_planes(&self) -> [HalfSpace; 6] {
        let c = self.frustum_corners();
        let f = self.look_dir;
        let inside = self.eye + f * (0.5 * (self.near_clip + self.far_clip));
        let side = |a: Vec3, b: Vec3| {
            let n = (a - self.eye).cross(b - self.eye).normalize();
            let h = HalfSpace::through(self.eye, n);
            if h.signed_distance(inside) < 0.0 {
                HalfSpace::through(self.eye, -n)
            } else {
                h
            }
        };
        [
            HalfSpace::through(c[0], f),
            HalfSpace::through(c[4], -f),
            side(c[4], c[5]),
            side(c[5], c[6]),
            side(c[6], c[7]),
            side(c[7], c[4]),
        ]
    }

    /// Horizontal view direction; falls back to the projected up vector when
    /// looking straight down or up.
    pub fn view_dir_2d(&self) -> Vec2 {
        let l = self.look_dir.xy();
        if l.length() >= 1e-6 {
            return l.normalize();
        }
        let u = self.up.xy();
        if u.length() >= 1e-6 {
            u.normalize()
        } else {
            Vec2::new(1.0, 0.0)
        }
    }
}

const QUAD_FACES: [[usize; 4]; 6] =
    [[0, 1, 2, 3], [4, 5, 6, 7], [0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]];

/// Ground-plane convex hull of the frustum ∩ heightfield box, counter-clockwise.
pub fn visible_hull(camera: &CameraView, grid: &AdaptiveGrid) -> Result<Vec<Vec2>, CascadeError> {
    let (zmin, zmax) = grid.height_range();
    visible_hull_of_box(camera, grid.domain(), zmin, zmax)
}

pub fn visible_hull_of_box(
    camera: &CameraView,
    domain: Rect,
    zmin: f64,
    zmax: f64,
) -> Result<Vec<Vec2>, CascadeError> {
    let scale = domain.width().max(domain.height()).max(zmax - zmin).max(1.0);
    let eps = 1e-9 * scale;
    let box_corners = [
        Vec3::new(domain.min.x, domain.min.y, zmin),
        Vec3::new(domain.max.x, domain.min.y, zmin),
        Vec3::new(domain.max.x, domain.max.y, zmin),
        Vec3::new(domain.min.x, domain.max.y, zmin),
        Vec3::new(domain.min.x, domain.min.y, zmax),
        Vec3::new(domain.max.x, domain.min.y, zmax),
        Vec3::new(domain.max.x, domain.max.y, zmax),
        Vec3::new(domain.min.x, domain.max.y, zmax),
    ];
    let box_planes = [
        HalfSpace { normal: Vec3::new(1.0, 0.0, 0.0), offset: domain.min.x - eps },
        HalfSpace { normal: Vec3::new(-1.0, 0.0, 0.0), offset: -domain.max.x - eps },
        HalfSpace { normal: Vec3::new(0.0, 1.0, 0.0), offset: domain.min.y - eps },
        HalfSpace { normal: Vec3::new(0.0, -1.0, 0.0), offset: -domain.max.y - eps },
        HalfSpace { normal: Vec3::Z, offset: zmin - eps },
        HalfSpace { normal: -Vec3::Z, offset: -zmax - eps },
    ];
    let frustum = camera.frustum_corners();
    let frustum_planes = camera.frustum_planes().map(|h| HalfSpace { offset: h.offset - eps, ..h });

    // Every vertex of the intersection volume is a vertex of one solid's face
    // clipped by the other solid.
    let mut points = Vec::new();
    let mut collect = |corners: &[Vec3; 8], planes: &[HalfSpace; 6]| {
        for face in QUAD_FACES {
            let mut poly: Vec<Vec3> = face.iter().map(|&i| corners[i]).collect();
            for h in planes {
                poly = geom::clip_polygon_3d(&poly, h);
                if poly.is_empty() {
                    break;
                }
            }
            points.extend(poly.iter().map(|p| p.xy()));
        }
    };
    collect(&frustum, &box_planes);
    collect(&box_corners, &frustum_planes);

    let hull = geom::convex_hull(&points);
    let area = geom::signed_area(&hull);
    if hull.len() < 3 || area <= 1e-12 * domain.width() * domain.height() {
        return Err(CascadeError::NothingVisible);
    }
    Ok(hull)
}

/// Logarithmic splits of `[n, f]` into three parts.
pub fn split_depths(n: f64, f: f64) -> (f64, f64) {
    debug_assert!(n > 0.0 && f > n);
    let c = cbrt(f / n);
    (n * c, n * c * c)
}

/// Offsets along the projected view direction bounding the cascades.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthRange {
    /// Smallest hull offset (may be negative).
    pub near: f64,
    pub split1: f64,
    pub split2: f64,
    pub far: f64,
}

impl DepthRange {
    /// Depth range of `hull` seen from `origin` along `dir`. The near depth
    /// used for splitting is clamped to `MIN_NEAR_FRACTION * far`.
    pub fn of_hull(hull: &[Vec2], origin: Vec2, dir: Vec2) -> Result<Self, CascadeError> {
        let (near, far) = hull.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            let o = (v - origin).dot(dir);
            (lo.min(o), hi.max(o))
        });
        if !(far > 0.0) || !(far > near) {
            return Err(CascadeError::NothingVisible);
        }
        let n = near.max(MIN_NEAR_FRACTION * far);
        let (split1, split2) = split_depths(n, far);
        Ok(Self { near, split1, split2, far })
    }

    /// `(near, far)` planes of cascade `k` (0-based) including the overlap.
    pub fn planes(&self, k: usize, overlap: f64) -> (f64, f64) {
        match k {
            0 => (self.near, self.split1 + overlap),
            1 => (self.split1, self.split2 + overlap),
            _ => (self.split2, self.far),
        }
    }

    pub fn split(&self, k: usize) -> f64 {
        if k == 0 {
            self.split1
        } else {
            self.split2
        }
    }
}

/// Visible area of one cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadePolygon {
    /// Counter-clockwise convex polygon.
    pub vertices: Vec<Vec2>,
    pub near_offset: f64,
    pub far_offset: f64,
}

impl CascadePolygon {
    pub fn area(&self) -> f64 {
        geom::signed_area(&self.vertices)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        geom::convex_contains(&self.vertices, p, 1e-9)
    }
}

/// Clips `hull` into the three cascade slabs. `None` marks a degenerate cascade.
pub fn clip_cascade_polygons(
    hull: &[Vec2],
    origin: Vec2,
    dir: Vec2,
    depth: &DepthRange,
    overlap: f64,
) -> [Option<CascadePolygon>; CASCADE_COUNT] {
    let hull_area = geom::signed_area(hull);
    let base = origin.dot(dir);
    core::array::from_fn(|k| {
        let (near, far) = depth.planes(k, overlap);
        if !(far > near) {
            return None;
        }
        let mut poly = geom::clip_half_plane(hull, dir, base + near);
        poly = geom::clip_half_plane(&poly, -dir, -(base + far));
        if poly.len() < 3 || geom::signed_area(&poly) <= 1e-12 * hull_area {
            return None;
        }
        Some(CascadePolygon { vertices: poly, near_offset: near, far_offset: far })
    })
}

/// Smallest even multiple of `min_cell` that is at least `extent`.
pub fn even_multiple(extent: f64, min_cell: f64) -> f64 {
    let step = 2.0 * min_cell;
    step * ceil(extent / step).max(1.0)
}

/// Placement of one cascade in its texture.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeLayout {
    /// 1-based cascade number, nearest first.
    pub index: usize,
    pub polygon: CascadePolygon,
    /// Widened, lattice-snapped bounding box; its corners are texel centers.
    pub bounds: Rect,
    /// World position of the center of texel `(0, 0)`.
    pub world_origin: Vec2,
    /// Texel spacing per axis in meters.
    pub texel_size: Vec2,
    pub resolution: usize,
    /// Row-major visibility of each texel.
    pub mask: Vec<bool>,
}

impl CascadeLayout {
    pub fn texel_center(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(
            self.world_origin.x + ix as f64 * self.texel_size.x,
            self.world_origin.y + iy as f64 * self.texel_size.y,
        )
    }

    /// Continuous texel coordinates of a world position.
    pub fn world_to_texel(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            (p.x - self.world_origin.x) / self.texel_size.x,
            (p.y - self.world_origin.y) / self.texel_size.y,
        )
    }

    pub fn is_visible(&self, ix: usize, iy: usize) -> bool {
        self.mask[iy * self.resolution + ix]
    }

    pub fn visible_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Largest texel edge.
    pub fn max_texel_size(&self) -> f64 {
        self.texel_size.max_element()
    }
}

/// Fits a cascade polygon into a `resolution²` texture.
///
/// The bounding box is snapped down to the `min_cell` lattice and each edge
/// widened to an even multiple of `min_cell`; the box spans `resolution - 1`
/// texel steps on each axis so all four corners are texel centers. A texel is
/// visible when its center lies within one texel diagonal of the polygon.
pub fn fit_layout(
    index: usize,
    polygon: CascadePolygon,
    resolution: usize,
    min_cell: f64,
) -> CascadeLayout {
    assert!(resolution >= 2, "cascade resolution must be at least 2");
    let (lo, hi) = geom::bounds(&polygon.vertices).expect("non-degenerate polygon");
    let snapped = Vec2::new(floor(lo.x / min_cell) * min_cell, floor(lo.y / min_cell) * min_cell);
    let extent = hi - snapped;
    let size = Vec2::new(even_multiple(extent.x, min_cell), even_multiple(extent.y, min_cell));
    let steps = (resolution - 1) as f64;
    let texel_size = size / steps;
    let bounds = Rect::new(snapped, snapped + size);
    let mask = visibility_mask(&polygon.vertices, snapped, texel_size, resolution);
    CascadeLayout { index, polygon, bounds, world_origin: snapped, texel_size, resolution, mask }
}

fn visibility_mask(poly: &[Vec2], origin: Vec2, texel: Vec2, resolution: usize) -> Vec<bool> {
    let dilation = texel.length();
    let mut mask = vec![false; resolution * resolution];
    for iy in 0..resolution {
        let y = origin.y + iy as f64 * texel.y;
        // x-range of the polygon within the dilation band of this row
        let band = geom::clip_half_plane(poly, Vec2::new(0.0, 1.0), y - dilation);
        let band = geom::clip_half_plane(&band, Vec2::new(0.0, -1.0), -(y + dilation));
        let Some((blo, bhi)) = geom::bounds(&band) else {
            continue;
        };
        // exact interior span of the row itself
        let inner = row_span(poly, y);
        let x0 = ceil((blo.x - dilation - origin.x) / texel.x).max(0.0) as usize;
        let x1 = floor((bhi.x + dilation - origin.x) / texel.x).min((resolution - 1) as f64);
        if x1 < 0.0 {
            continue;
        }
        let row = &mut mask[iy * resolution..(iy + 1) * resolution];
        for (ix, slot) in row.iter_mut().enumerate().take(x1 as usize + 1).skip(x0) {
            let x = origin.x + ix as f64 * texel.x;
            *slot = match inner {
                Some((a, b)) if x >= a && x <= b => true,
                _ => geom::within_distance(poly, Vec2::new(x, y), dilation),
            };
        }
    }
    mask
}

fn row_span(poly: &[Vec2], y: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        if (a.y <= y && y <= b.y) || (b.y <= y && y <= a.y) {
            let x = if a.y == b.y {
                lo = lo.min(a.x.min(b.x));
                hi = hi.max(a.x.max(b.x));
                continue;
            } else {
                a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y)
            };
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Overlap {
    /// Twice the largest texel edge of the last cascade.
    Auto,
    Meters(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeSettings {
    pub resolution: usize,
    pub overlap: Overlap,
}

impl Default for CascadeSettings {
    fn default() -> Self {
        Self { resolution: 1024, overlap: Overlap::Auto }
    }
}

/// All per-frame cascade geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSet {
    pub hull: Vec<Vec2>,
    /// Depth offsets are measured from here: the camera's ground position, or
    /// the hull's back edge when all visible ground lies behind the camera.
    pub origin: Vec2,
    pub view_dir: Vec2,
    pub depth: DepthRange,
    pub overlap: f64,
    pub layouts: [Option<CascadeLayout>; CASCADE_COUNT],
}

impl CascadeSet {
    pub fn compute(
        camera: &CameraView,
        grid: &AdaptiveGrid,
        settings: &CascadeSettings,
    ) -> Result<Self, CascadeError> {
        let hull = visible_hull(camera, grid)?;
        Self::from_hull(hull, camera, grid.min_cell_size(), settings)
    }

    pub fn from_hull(
        hull: Vec<Vec2>,
        camera: &CameraView,
        min_cell: f64,
        settings: &CascadeSettings,
    ) -> Result<Self, CascadeError> {
        let mut origin = camera.eye.xy();
        let view_dir = camera.view_dir_2d();
        // All visible ground lies behind the eye: measure from the hull's back.
        let (back, front) = hull.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            let o = (v - origin).dot(view_dir);
            (lo.min(o), hi.max(o))
        });
        if front <= 0.0 && back < front {
            origin += view_dir * back;
        }
        let depth = DepthRange::of_hull(&hull, origin, view_dir)?;
        let overlap = match settings.overlap {
            Overlap::Meters(m) => m.max(0.0),
            Overlap::Auto => {
                let [_, _, last] = clip_cascade_polygons(&hull, origin, view_dir, &depth, 0.0);
                match last {
                    Some(p) => {
                        let l = fit_layout(CASCADE_COUNT, p, settings.resolution.max(2), min_cell);
                        2.0 * l.max_texel_size()
                    }
                    None => 0.0,
                }
            }
        };
        let polys = clip_cascade_polygons(&hull, origin, view_dir, &depth, overlap);
        let mut k = 0;
        let layouts = polys.map(|p| {
            k += 1;
            p.map(|p| fit_layout(k, p, settings.resolution, min_cell))
        });
        if layouts.iter().all(Option::is_none) {
            return Err(CascadeError::NothingVisible);
        }
        Ok(Self { hull, origin, view_dir, depth, overlap, layouts })
    }

    /// Depth offset of a ground position along the view direction.
    pub fn offset_of(&self, p: Vec2) -> f64 {
        (p - self.origin).dot(self.view_dir)
    }

    pub fn visible_texels(&self) -> usize {
        self.layouts.iter().flatten().map(CascadeLayout::visible_count).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_poly(x0: f64, y0: f64, x1: f64, y1: f64) -> CascadePolygon {
        CascadePolygon {
            vertices: vec![
                Vec2::new(x0, y0),
                Vec2::new(x1, y0),
                Vec2::new(x1, y1),
                Vec2::new(x0, y1),
            ],
            near_offset: 0.0,
            far_offset: 1.0,
        }
    }

    #[test]
    fn split_exact_cubes() {
        assert_eq!(split_depths(1.0, 8.0), (2.0, 4.0));
        let (a, b) = split_depths(10.0, 1000.0);
        assert!((a - 46.415_888_336_127_79).abs() < 1e-12);
        assert!((b - 215.443_469_003_188_4).abs() < 1e-11);
    }

    #[test]
    fn splits_collapse_towards_far() {
        let (a, b) = split_depths(100.0 * (1.0 - 1e-9), 100.0);
        assert!((a - 100.0).abs() < 1e-6 && (b - 100.0).abs() < 1e-6);
    }

    #[test]
    fn widening_to_even_multiples() {
        let l = fit_layout(1, rect_poly(0.0, 0.0, 4.0, 4.0), 16, 2.0);
        assert_eq!(l.bounds, Rect::new(Vec2::ZERO, Vec2::new(4.0, 4.0)));
        let l = fit_layout(1, rect_poly(0.0, 0.0, 4.1, 3.0), 16, 2.0);
        assert_eq!(l.bounds, Rect::new(Vec2::ZERO, Vec2::new(8.0, 4.0)));
        assert_eq!(l.texel_size, Vec2::new(8.0 / 15.0, 4.0 / 15.0));
    }

    #[test]
    fn corners_are_texel_centers() {
        let l = fit_layout(2, rect_poly(-3.3, 1.7, 20.2, 9.1), 64, 0.75);
        for c in l.bounds.corners() {
            let t = l.world_to_texel(c);
            assert!((t.x - t.x.round()).abs() < 1e-6 && (t.y - t.y.round()).abs() < 1e-6);
            assert!(t.x.round() == 0.0 || t.x.round() == 63.0);
        }
    }

    #[test]
    fn mask_covers_polygon_texels() {
        let tri = CascadePolygon {
            vertices: vec![Vec2::new(0.0, 0.0), Vec2::new(10.0, 1.0), Vec2::new(3.0, 7.0)],
            near_offset: 0.0,
            far_offset: 1.0,
        };
        let l = fit_layout(1, tri.clone(), 32, 0.5);
        let half = l.texel_size * 0.5;
        for iy in 0..32 {
            for ix in 0..32 {
                let c = l.texel_center(ix, iy);
                // texel square intersects the polygon if one of a fine set of samples is inside
                let mut touches = false;
                for sy in 0..=8 {
                    for sx in 0..=8 {
                        let p = Vec2::new(
                            c.x - half.x + 2.0 * half.x * sx as f64 / 8.0,
                            c.y - half.y + 2.0 * half.y * sy as f64 / 8.0,
                        );
                        touches |= tri.contains(p);
                    }
                }
                if touches {
                    assert!(l.is_visible(ix, iy), "texel {ix},{iy}");
                }
                if l.is_visible(ix, iy) {
                    assert!(geom::within_distance(&tri.vertices, c, l.texel_size.length() + 1e-9));
                }
            }
        }
        assert!(l.visible_count() < 32 * 32);
    }

    #[test]
    fn degenerate_cascades_when_hull_is_shallow() {
        let hull = vec![
            Vec2::new(0.0, -1.0),
            Vec2::new(1.0, -1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let depth = DepthRange { near: 0.0, split1: 5.0, split2: 10.0, far: 20.0 };
        let [a, b, c] = clip_cascade_polygons(&hull, Vec2::ZERO, Vec2::new(1.0, 0.0), &depth, 0.0);
        assert!(a.is_some() && b.is_none() && c.is_none());
    }

    #[test]
    fn camera_validation() {
        let ok = CameraView::new(Vec3::Z, Vec3::new(1.0, 0.0, 0.0), Vec3::Z, 60.0, 1.0, 1.0, 10.0);
        assert!(ok.is_ok());
        let bad = CameraView::new(Vec3::Z, Vec3::new(1.0, 0.0, 0.0), Vec3::Z, 60.0, 1.0, 10.0, 1.0);
        assert_eq!(bad, Err(CascadeError::InvalidCamera("far must exceed near")));
        let par = CameraView::new(Vec3::Z, Vec3::Z, Vec3::Z, 60.0, 1.0, 1.0, 10.0);
        assert!(par.is_err());
    }

    #[test]
    fn straight_down_uses_up_vector() {
        let cam = CameraView::new(
            Vec3::new(0.0, 0.0, 10.0),
            Vec3::new(0.0, 0.0, -1.0),
            Vec3::new(0.0, 1.0, 0.0),
            60.0,
            1.0,
            1.0,
            100.0,
        )
        .unwrap();
        assert_eq!(cam.view_dir_2d(), Vec2::new(0.0, 1.0));
    }

    #[test]
    fn ground_behind_the_eye_is_still_split() {
        let cam = CameraView::new(Vec3::new(0.0, 0.0, 10.0), Vec3::new(1.0, 0.0, 0.0), Vec3::Z, 60.0, 1.0, 1.0, 100.0)
            .unwrap();
        let hull = vec![Vec2::new(-30.0, -5.0), Vec2::new(-10.0, -5.0), Vec2::new(-10.0, 5.0), Vec2::new(-30.0, 5.0)];
        let set = CascadeSet::from_hull(hull, &cam, 1.0, &CascadeSettings { resolution: 16, ..Default::default() })
            .unwrap();
        assert_eq!(set.origin, Vec2::new(-30.0, 0.0));
        assert_eq!(set.depth.near, 0.0);
        assert_eq!(set.depth.far, 20.0);
        assert!(set.layouts.iter().all(Option::is_some));
    }
}

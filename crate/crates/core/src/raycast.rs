//! Ray casting of cascade rasters as bilinear heightfields.
//!
//! Patch `(i, j)` spans texels `(i, j)..=(i + 1, j + 1)`. A maximum mipmap over
//! patch maxima lets the traversal skip nodes the ray passes above; the
//! traversal loop keeps an explicit level cursor and never recurses.

use alloc::vec;
use alloc::vec::Vec;

use crate::cascade::{CascadeSet, CASCADE_COUNT};
use crate::discretize::CascadeRaster;
use crate::math::{sqrt, Vec2, Vec3};
pub use crate::rbf::Layer;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    /// Unit direction.
    pub dir: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, dir: Vec3) -> Self {
        Self { origin, dir: dir.normalize() }
    }

    #[inline]
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }
}

/// Corner heights of a bilinear patch: `h00, h10, h01, h11`, first index
/// along x.
pub type PatchHeights = [f64; 4];

#[inline]
pub fn bilinear(h: &PatchHeights, u: f64, v: f64) -> f64 {
    let [h00, h10, h01, h11] = *h;
    h00 * (1.0 - u) * (1.0 - v) + h10 * u * (1.0 - v) + h01 * (1.0 - u) * v + h11 * u * v
}

/// Height gradient in world units for a patch of size `size`.
pub fn bilinear_gradient(h: &PatchHeights, u: f64, v: f64, size: Vec2) -> Vec2 {
    let [h00, h10, h01, h11] = *h;
    let e = h00 - h10 - h01 + h11;
    Vec2::new((h10 - h00 + e * v) / size.x, (h01 - h00 + e * u) / size.y)
}

/// Unit surface normal of a patch.
pub fn bilinear_normal(h: &PatchHeights, u: f64, v: f64, size: Vec2) -> Vec3 {
    let g = bilinear_gradient(h, u, v, size);
    Vec3::new(-g.x, -g.y, 1.0).normalize()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchHit {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

const UV_TOL: f64 = 1e-9;

/// Smallest `t >= 0` where the ray meets the bilinear patch over
/// `[min, min + size]`.
pub fn intersect_bilinear_patch(
    ray: &Ray,
    heights: &PatchHeights,
    min: Vec2,
    size: Vec2,
) -> Option<PatchHit> {
    intersect_bilinear_patch_in(ray, heights, min, size, 0.0, f64::INFINITY)
}

/// Like [`intersect_bilinear_patch`] with `t` restricted to `[t_lo, t_hi]`.
///
/// The ray is first clipped to the patch footprint and re-based at the entry
/// point; substituting it into the bilinear form gives a quadratic in `t`.
pub fn intersect_bilinear_patch_in(
    ray: &Ray,
    heights: &PatchHeights,
    min: Vec2,
    size: Vec2,
    t_lo: f64,
    t_hi: f64,
) -> Option<PatchHit> {
    let o = ray.origin;
    let d = ray.dir;
    let (mut ta, mut tb) = (t_lo.max(0.0), t_hi);
    for (oc, dc, lo, w) in [(o.x, d.x, min.x, size.x), (o.y, d.y, min.y, size.y)] {
        let tol = UV_TOL * w;
        if dc == 0.0 {
            if oc < lo - tol || oc > lo + w + tol {
                return None;
            }
        } else {
            let t0 = (lo - tol - oc) / dc;
            let t1 = (lo + w + tol - oc) / dc;
            ta = ta.max(t0.min(t1));
            tb = tb.min(t0.max(t1));
        }
    }
    if !(ta <= tb) {
        return None;
    }

    let e0 = ray.at(ta);
    let u0 = (e0.x - min.x) / size.x;
    let v0 = (e0.y - min.y) / size.y;
    let du = d.x / size.x;
    let dv = d.y / size.y;
    let [h00, h10, h01, h11] = *heights;
    let b = h10 - h00;
    let c = h01 - h00;
    let e = h00 - h10 - h01 + h11;
    // F(s) = z(s) - h(u(s), v(s)) = qa s² + qb s + qc
    let qa = -e * du * dv;
    let qb = d.z - b * du - c * dv - e * (u0 * dv + v0 * du);
    let qc = e0.z - h00 - b * u0 - c * v0 - e * u0 * v0;
    let span = tb - ta;
    let scale = 1.0 + h00.abs().max(h10.abs()).max(h01.abs()).max(h11.abs()) + e0.z.abs();

    let mut roots = [f64::NAN; 2];
    if qa.abs() < 1e-12 * qb.abs() || qa == 0.0 {
        if qb != 0.0 {
            roots[0] = -qc / qb;
        } else if qc.abs() <= 1e-12 * scale {
            roots[0] = 0.0;
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return None;
        }
        let sq = sqrt(disc);
        let q = -0.5 * (qb + if qb >= 0.0 { sq } else { -sq });
        if q == 0.0 {
            roots[0] = 0.0;
        } else {
            let (r0, r1) = (q / qa, qc / q);
            roots = if r0 <= r1 { [r0, r1] } else { [r1, r0] };
        }
    }

    let s_tol = 1e-12 * (1.0 + ta + if span.is_finite() { span } else { 0.0 });
    for s in roots {
        if !(s >= -s_tol && s <= span + s_tol) {
            continue;
        }
        let mut s = s.clamp(0.0, span);
        // one Newton step against cancellation in the closed form
        let f = (qa * s + qb) * s + qc;
        let df = 2.0 * qa * s + qb;
        if df != 0.0 {
            let refined = s - f / df;
            if refined >= 0.0 && refined <= span {
                let fr = (qa * refined + qb) * refined + qc;
                if fr.abs() <= f.abs() {
                    s = refined;
                }
            }
        }
        let u = (u0 + s * du).clamp(0.0, 1.0);
        let v = (v0 + s * dv).clamp(0.0, 1.0);
        return Some(PatchHit { t: ta + s, u, v });
    }
    None
}

/// Maximum pyramid over the patches of one raster layer.
///
/// Level 0 holds the maximum corner height of each patch whose four corners
/// are valid and the raster sentinel otherwise; every further level halves
/// the extent (rounding up, padded with the sentinel) down to `1 × 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxMipmap {
    pub levels: Vec<Vec<f64>>,
    pub dims: Vec<usize>,
    pub sentinel: f64,
    /// Lowest valid height of the layer; the sentinel when nothing is valid.
    pub floor: f64,
}

impl MaxMipmap {
    pub fn top(&self) -> f64 {
        self.levels.last().map_or(self.sentinel, |l| l[0])
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    #[inline]
    pub fn get(&self, level: usize, i: usize, j: usize) -> f64 {
        self.levels[level][j * self.dims[level] + i]
    }

    /// Whether patch `(i, j)` has four valid corners.
    #[inline]
    pub fn patch_hittable(&self, i: usize, j: usize) -> bool {
        self.get(0, i, j) > self.sentinel
    }
}

pub fn build_max_mipmap(raster: &CascadeRaster, layer: Layer) -> MaxMipmap {
    let res = raster.resolution();
    assert!(res >= 2, "raster resolution must be at least 2");
    let heights = raster.layer(layer);
    let sentinel = raster.sentinel;
    let p = res - 1;
    let mut level0 = vec![sentinel; p * p];
    for j in 0..p {
        for i in 0..p {
            let idx = [j * res + i, j * res + i + 1, (j + 1) * res + i, (j + 1) * res + i + 1];
            if idx.iter().all(|&k| raster.valid[k]) {
                level0[j * p + i] = idx.iter().map(|&k| heights[k]).fold(f64::NEG_INFINITY, f64::max);
            }
        }
    }
    let mut levels = vec![level0];
    let mut dims = vec![p];
    while *dims.last().unwrap() > 1 {
        let d = *dims.last().unwrap();
        let nd = d.div_ceil(2);
        let prev = levels.last().unwrap();
        let mut next = vec![sentinel; nd * nd];
        for j in 0..nd {
            for i in 0..nd {
                let mut m = sentinel;
                for (ci, cj) in [(2 * i, 2 * j), (2 * i + 1, 2 * j), (2 * i, 2 * j + 1), (2 * i + 1, 2 * j + 1)] {
                    if ci < d && cj < d {
                        m = m.max(prev[cj * d + ci]);
                    }
                }
                next[j * nd + i] = m;
            }
        }
        levels.push(next);
        dims.push(nd);
    }
    let floor = raster.valid_range(layer).map_or(sentinel, |r| r.0);
    MaxMipmap { levels, dims, sentinel, floor }
}

/// Intersection with one cascade raster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeHit {
    pub t: f64,
    pub position: Vec3,
    pub patch: (usize, usize),
    pub uv: Vec2,
}

pub fn patch_heights(raster: &CascadeRaster, layer: Layer, i: usize, j: usize) -> PatchHeights {
    [
        raster.height(layer, i, j),
        raster.height(layer, i + 1, j),
        raster.height(layer, i, j + 1),
        raster.height(layer, i + 1, j + 1),
    ]
}

/// World footprint `(min, size)` of patch `(i, j)`.
pub fn patch_footprint(raster: &CascadeRaster, i: usize, j: usize) -> (Vec2, Vec2) {
    (raster.layout.texel_center(i, j), raster.layout.texel_size)
}

fn test_patch(
    ray: &Ray,
    raster: &CascadeRaster,
    layer: Layer,
    i: usize,
    j: usize,
    t_lo: f64,
    t_hi: f64,
) -> Option<CascadeHit> {
    let h = patch_heights(raster, layer, i, j);
    let (min, size) = patch_footprint(raster, i, j);
    intersect_bilinear_patch_in(ray, &h, min, size, t_lo, t_hi).map(|hit| {
        let p = ray.at(hit.t);
        CascadeHit {
            t: hit.t,
            position: Vec3::new(p.x, p.y, bilinear(&h, hit.u, hit.v)),
            patch: (i, j),
            uv: Vec2::new(hit.u, hit.v),
        }
    })
}

/// `[t0, t1]` where `origin + t * dir` lies in `[lo, hi]`.
fn slab(origin: f64, dir: f64, lo: f64, hi: f64) -> (f64, f64) {
    if dir == 0.0 {
        if origin >= lo && origin <= hi {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            (f64::INFINITY, f64::NEG_INFINITY)
        }
    } else {
        let a = (lo - origin) / dir;
        let b = (hi - origin) / dir;
        (a.min(b), a.max(b))
    }
}

/// Maximum-mipmap traversal of one cascade.
pub fn traverse_cascade(
    ray: &Ray,
    raster: &CascadeRaster,
    mipmap: &MaxMipmap,
    layer: Layer,
) -> Option<CascadeHit> {
    traverse_cascade_in(ray, raster, mipmap, layer, 0.0, f64::INFINITY, |_, _, _| {})
}

/// Traversal restricted to `t ∈ [t_min, t_max]`. `on_skip(level, i, j)` is
/// called for every node discarded by the max test.
pub fn traverse_cascade_in(
    ray: &Ray,
    raster: &CascadeRaster,
    mipmap: &MaxMipmap,
    layer: Layer,
    t_min: f64,
    t_max: f64,
    mut on_skip: impl FnMut(usize, usize, usize),
) -> Option<CascadeHit> {
    let layout = &raster.layout;
    let patches = (layout.resolution - 1) as f64;
    let zmax = mipmap.top();
    if !(zmax > mipmap.sentinel) {
        return None;
    }
    let zmin = mipmap.floor;
    let o = layout.world_to_texel(ray.origin.xy());
    let du = ray.dir.x / layout.texel_size.x;
    let dv = ray.dir.y / layout.texel_size.y;
    let (oz, dz) = (ray.origin.z, ray.dir.z);
    let z_eps = 1e-9 * (1.0 + zmax.abs().max(zmin.abs()));

    let mut t0 = t_min.max(0.0);
    let mut t1 = t_max;
    for (a, b) in [
        slab(o.x, du, 0.0, patches),
        slab(o.y, dv, 0.0, patches),
        slab(oz, dz, zmin - z_eps, zmax + z_eps),
    ] {
        t0 = t0.max(a);
        t1 = t1.min(b);
    }
    if !(t0 <= t1) {
        return None;
    }

    let top = mipmap.level_count() - 1;
    let cross_u = |b: f64| (b - o.x) / du;
    let cross_v = |b: f64| (b - o.y) / dv;
    let z_at = |t: f64| oz + t * dz;
    let child = |parent: usize, level: usize, t: f64, orig: f64, d: f64, cross: &dyn Fn(f64) -> f64| {
        let mid = ((2 * parent + 1) << level) as f64;
        let upper = if d > 0.0 {
            cross(mid) <= t
        } else if d < 0.0 {
            cross(mid) > t
        } else {
            orig >= mid
        };
        2 * parent + upper as usize
    };

    let (mut level, mut a, mut b) = (top, 0usize, 0usize);
    let mut t = t0;
    let budget = 16 * (mipmap.dims[0] + 2) * (top + 2) + 64;
    for _ in 0..budget {
        let dim = mipmap.dims[level];
        if a >= dim || b >= dim {
            return None;
        }
        let s = (1usize << level) as f64;
        let tx = if du > 0.0 {
            cross_u((a + 1) as f64 * s)
        } else if du < 0.0 {
            cross_u(a as f64 * s)
        } else {
            f64::INFINITY
        };
        let ty = if dv > 0.0 {
            cross_v((b + 1) as f64 * s)
        } else if dv < 0.0 {
            cross_v(b as f64 * s)
        } else {
            f64::INFINITY
        };
        let t_exit = tx.min(ty).min(t1).max(t);
        let node_max = mipmap.get(level, a, b);
        let seg_min = z_at(t).min(z_at(t_exit));
        let above = seg_min > node_max + z_eps;

        if !above && level > 0 {
            level -= 1;
            let na = child(a, level, t, o.x, du, &cross_u).min(mipmap.dims[level] - 1);
            let nb = child(b, level, t, o.y, dv, &cross_v).min(mipmap.dims[level] - 1);
            a = na;
            b = nb;
            continue;
        }
        if above {
            on_skip(level, a, b);
        } else if mipmap.patch_hittable(a, b) {
            if let Some(hit) = test_patch(ray, raster, layer, a, b, t0, t1) {
                return Some(hit);
            }
        }
        // advance to the neighbor across the exit face, then go up one level
        if t_exit >= t1 {
            return None;
        }
        t = t_exit;
        if tx <= ty {
            if du > 0.0 {
                a += 1;
            } else if a == 0 {
                return None;
            } else {
                a -= 1;
            }
        } else if dv > 0.0 {
            b += 1;
        } else if b == 0 {
            return None;
        } else {
            b -= 1;
        }
        if level < top {
            level += 1;
            a >>= 1;
            b >>= 1;
        }
    }
    debug_assert!(false, "traversal budget exhausted");
    None
}

/// Blend partner of a hit inside an overlap region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blend {
    /// 1-based index of the other cascade.
    pub other: usize,
    /// Weight of the farther cascade, 0 at the overlap start.
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitRecord {
    pub t: f64,
    pub world_pos: Vec3,
    pub layer: Layer,
    /// 1-based cascade that `patch` and `uv` refer to.
    pub cascade: usize,
    pub patch: (usize, usize),
    pub uv: Vec2,
    pub normal: Vec3,
    /// Terrain height of the same raster at the hit's ground position.
    pub terrain_height: f64,
    pub blend: Option<Blend>,
}

/// One discretized cascade with mipmaps for both layers.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedCascade {
    pub raster: CascadeRaster,
    pub terrain_mip: MaxMipmap,
    pub water_mip: MaxMipmap,
}

impl PreparedCascade {
    pub fn new(raster: CascadeRaster) -> Self {
        let terrain_mip = build_max_mipmap(&raster, Layer::Terrain);
        let water_mip = build_max_mipmap(&raster, Layer::WaterSurface);
        Self { raster, terrain_mip, water_mip }
    }

    pub fn mipmap(&self, layer: Layer) -> &MaxMipmap {
        match layer {
            Layer::Terrain => &self.terrain_mip,
            Layer::WaterSurface => &self.water_mip,
        }
    }

    pub fn hit_record(&self, hit: &CascadeHit, layer: Layer) -> HitRecord {
        let (i, j) = hit.patch;
        let size = self.raster.layout.texel_size;
        let h = patch_heights(&self.raster, layer, i, j);
        let terrain = patch_heights(&self.raster, Layer::Terrain, i, j);
        HitRecord {
            t: hit.t,
            world_pos: hit.position,
            layer,
            cascade: self.raster.layout.index,
            patch: hit.patch,
            uv: hit.uv,
            normal: bilinear_normal(&h, hit.uv.x, hit.uv.y, size),
            terrain_height: bilinear(&terrain, hit.uv.x, hit.uv.y),
            blend: None,
        }
    }
}

/// `t` interval where the ray's depth offset lies in `[lo, hi]`.
fn offset_interval(set: &CascadeSet, ray: &Ray, lo: f64, hi: f64) -> (f64, f64) {
    let s0 = set.offset_of(ray.origin.xy());
    let sd = ray.dir.xy().dot(set.view_dir);
    let (a, b) = slab(s0, sd, lo, hi);
    (a.max(0.0), b)
}

fn cascade_region(set: &CascadeSet, k: usize) -> (f64, f64) {
    let (lo, hi) = set.depth.planes(k, set.overlap);
    let lo = if k == 0 { f64::NEG_INFINITY } else { lo };
    let hi = if k == CASCADE_COUNT - 1 { f64::INFINITY } else { hi };
    (lo, hi)
}

/// Casts a ray through the cascades in the order the ray reaches them.
///
/// Each cascade is searched only over its own depth slab. A hit inside the
/// overlap of two cascades is blended with the other cascade's hit; the weight
/// ramps linearly from 0 at the split to 1 at the end of the overlap. A
/// one-sided hit is used as is.
pub fn cast_through_cascades(
    ray: &Ray,
    layer: Layer,
    set: &CascadeSet,
    cascades: &[Option<PreparedCascade>; CASCADE_COUNT],
) -> Option<HitRecord> {
    let mut order: [(f64, f64, usize); CASCADE_COUNT] = [(f64::INFINITY, 0.0, 0); CASCADE_COUNT];
    for (k, slot) in order.iter_mut().enumerate() {
        let (lo, hi) = cascade_region(set, k);
        let (ta, tb) = offset_interval(set, ray, lo, hi);
        *slot = if cascades[k].is_some() && ta <= tb { (ta, tb, k) } else { (f64::INFINITY, 0.0, k) };
    }
    order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.2.cmp(&y.2)));

    for &(ta, tb, k) in &order {
        if !ta.is_finite() {
            break;
        }
        let c = cascades[k].as_ref().unwrap();
        let Some(hit) =
            traverse_cascade_in(ray, &c.raster, c.mipmap(layer), layer, ta, tb, |_, _, _| {})
        else {
            continue;
        };
        let record = c.hit_record(&hit, layer);
        return Some(blend_overlap(ray, layer, set, cascades, k, record));
    }
    None
}

fn blend_overlap(
    ray: &Ray,
    layer: Layer,
    set: &CascadeSet,
    cascades: &[Option<PreparedCascade>; CASCADE_COUNT],
    k: usize,
    record: HitRecord,
) -> HitRecord {
    if !(set.overlap > 0.0) {
        return record;
    }
    let s = set.offset_of(record.world_pos.xy());
    // overlap between cascade `near` and `near + 1`
    let near = if k + 1 < CASCADE_COUNT && s >= set.depth.split(k) && s <= set.depth.split(k) + set.overlap {
        k
    } else if k > 0 && s >= set.depth.split(k - 1) && s <= set.depth.split(k - 1) + set.overlap {
        k - 1
    } else {
        return record;
    };
    let partner = if near == k { k + 1 } else { k - 1 };
    let Some(pc) = cascades[partner].as_ref() else {
        return record;
    };
    let split = set.depth.split(near);
    let weight = blend_weight(s, split, set.overlap);
    let (ta, tb) = offset_interval(set, ray, split, split + set.overlap);
    if !(ta <= tb) {
        return record;
    }
    let Some(other) =
        traverse_cascade_in(ray, &pc.raster, pc.mipmap(layer), layer, ta, tb, |_, _, _| {})
    else {
        return record;
    };
    let other = pc.hit_record(&other, layer);
    let (n, f) = if near == k { (&record, &other) } else { (&other, &record) };
    blend_hits(n, f, weight)
}

/// Ramp from 0 at `split` to 1 at `split + overlap`.
pub fn blend_weight(offset: f64, split: f64, overlap: f64) -> f64 {
    if offset >= split + overlap {
        return 1.0;
    }
    ((offset - split) / overlap).clamp(0.0, 1.0)
}

/// Convex combination of the hits of the nearer and the farther cascade.
/// Weight 0 gives `near` and weight 1 gives `far`, apart from the blend tag.
pub fn blend_hits(near: &HitRecord, far: &HitRecord, weight: f64) -> HitRecord {
    let mix = |a: f64, b: f64| (1.0 - weight) * a + weight * b;
    let (base, other) = if weight < 1.0 { (near, far) } else { (far, near) };
    let normal = if weight <= 0.0 {
        near.normal
    } else if weight >= 1.0 {
        far.normal
    } else {
        near.normal.lerp(far.normal, weight).normalize()
    };
    HitRecord {
        t: mix(near.t, far.t),
        world_pos: near.world_pos.lerp(far.world_pos, weight),
        normal,
        terrain_height: mix(near.terrain_height, far.terrain_height),
        blend: Some(Blend { other: other.cascade, weight }),
        ..*base
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{fit_layout, CascadePolygon};
    use crate::grid::{AdaptiveGrid, Cell, Rect};

    fn flat_raster(res: usize, h: f64) -> CascadeRaster {
        let poly = CascadePolygon {
            vertices: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(8.0, 0.0),
                Vec2::new(8.0, 8.0),
                Vec2::new(0.0, 8.0),
            ],
            near_offset: 0.0,
            far_offset: 1.0,
        };
        let layout = fit_layout(1, poly, res, 4.0);
        let grid = AdaptiveGrid::new(
            Rect::new(Vec2::ZERO, Vec2::new(8.0, 8.0)),
            8.0,
            vec![Cell::new(Vec2::new(4.0, 4.0), 8.0, h, 0.0)],
            true,
        )
        .unwrap();
        let mut r = CascadeRaster::blank(layout, &grid);
        r.terrain.iter_mut().for_each(|x| *x = h);
        r.water.iter_mut().for_each(|x| *x = h);
        r.valid.iter_mut().for_each(|x| *x = true);
        r
    }

    #[test]
    fn flat_patch_vertical_ray() {
        let ray = Ray::new(Vec3::new(0.5, 0.5, 10.0), Vec3::new(0.0, 0.0, -1.0));
        let hit = intersect_bilinear_patch(&ray, &[3.0; 4], Vec2::ZERO, Vec2::new(1.0, 1.0)).unwrap();
        assert_eq!(hit.t, 7.0);
        assert_eq!((hit.u, hit.v), (0.5, 0.5));
    }

    #[test]
    fn misses_above_and_below() {
        let h = [1.0, 2.0, 3.0, 4.0];
        let down_below = Ray::new(Vec3::new(0.2, 0.3, 0.0), Vec3::new(0.1, 0.0, -1.0));
        assert!(intersect_bilinear_patch(&down_below, &h, Vec2::ZERO, Vec2::new(1.0, 1.0)).is_none());
        let up_above = Ray::new(Vec3::new(0.2, 0.3, 5.0), Vec3::new(0.1, 0.1, 1.0));
        assert!(intersect_bilinear_patch(&up_above, &h, Vec2::ZERO, Vec2::new(1.0, 1.0)).is_none());
    }

    #[test]
    fn mipmap_of_two_by_two() {
        let mut r = flat_raster(2, 0.0);
        r.terrain.copy_from_slice(&[1.0, 2.0, 3.0, 4.0]);
        let m = build_max_mipmap(&r, Layer::Terrain);
        assert_eq!(m.levels, vec![vec![4.0]]);
        assert_eq!(m.top(), 4.0);
    }

    #[test]
    fn constant_mipmap_levels() {
        let r = flat_raster(9, 2.5);
        let m = build_max_mipmap(&r, Layer::Terrain);
        assert_eq!(m.dims, vec![8, 4, 2, 1]);
        assert!(m.levels.iter().flatten().all(|&x| x == 2.5));
    }

    #[test]
    fn vertical_ray_hits_flat_raster() {
        let r = flat_raster(17, 2.0);
        let m = build_max_mipmap(&r, Layer::Terrain);
        let ray = Ray::new(Vec3::new(3.3, 5.1, 20.0), Vec3::new(0.0, 0.0, -1.0));
        let hit = traverse_cascade(&ray, &r, &m, Layer::Terrain).unwrap();
        assert!((hit.t - 18.0).abs() < 1e-12);
        assert!((hit.position.z - 2.0).abs() < 1e-12);
        let away = Ray::new(Vec3::new(30.0, 5.1, 20.0), Vec3::new(0.0, 0.0, -1.0));
        assert!(traverse_cascade(&away, &r, &m, Layer::Terrain).is_none());
    }

    #[test]
    fn invalid_corner_patches_are_not_hittable() {
        let mut r = flat_raster(5, 1.0);
        let idx = r.index(2, 2);
        r.valid[idx] = false;
        r.terrain[idx] = r.sentinel;
        let m = build_max_mipmap(&r, Layer::Terrain);
        for (i, j) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            assert!(!m.patch_hittable(i, j));
        }
        assert!(m.patch_hittable(0, 0));
        let ray = Ray::new(Vec3::new(4.0, 4.0, 9.0), Vec3::new(0.0, 0.0, -1.0));
        assert!(traverse_cascade(&ray, &r, &m, Layer::Terrain).is_none());
    }
}

#![allow(dead_code)]

use hfcast_core::cascade::{fit_layout, CascadePolygon};
use hfcast_core::raycast::{bilinear, intersect_bilinear_patch, patch_footprint, patch_heights, CascadeHit};
use hfcast_core::{AdaptiveGrid, CascadeRaster, Cell, Layer, Ray, Rect, Vec2, Vec3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random quadtree grid: `blocks × blocks` roots of edge `min_cell * 2^levels`,
/// each split recursively with probability `split`. Stops early once
/// `max_cells` would be exceeded.
pub fn random_grid(
    rng: &mut ChaCha8Rng,
    blocks: usize,
    levels: u32,
    min_cell: f64,
    split: f64,
    max_cells: usize,
) -> AdaptiveGrid {
    let root = min_cell * (1u32 << levels) as f64;
    let mut cells = Vec::new();
    let mut stack: Vec<(Vec2, f64)> = Vec::new();
    for j in 0..blocks {
        for i in 0..blocks {
            stack.push((Vec2::new(i as f64 * root, j as f64 * root), root));
        }
    }
    let mut pending = stack.len();
    while let Some((lo, size)) = stack.pop() {
        pending -= 1;
        let can_split = size > min_cell && cells.len() + pending + 4 <= max_cells;
        if can_split && rng.gen_bool(split) {
            let h = size / 2.0;
            for (dx, dy) in [(0.0, 0.0), (h, 0.0), (0.0, h), (h, h)] {
                stack.push((Vec2::new(lo.x + dx, lo.y + dy), h));
                pending += 1;
            }
        } else {
            let center = Vec2::new(lo.x + size / 2.0, lo.y + size / 2.0);
            let terrain = 50.0 + 100.0 * rng.gen::<f64>();
            let depth = if rng.gen_bool(0.4) { 5.0 * rng.gen::<f64>() } else { 0.0 };
            cells.push(Cell::new(center, size, terrain, depth));
        }
    }
    let edge = blocks as f64 * root;
    AdaptiveGrid::new(Rect::new(Vec2::ZERO, Vec2::new(edge, edge)), min_cell, cells, true)
        .expect("random grid is valid")
}

/// Uniformly random point inside a random cell.
pub fn random_interior_point(rng: &mut ChaCha8Rng, grid: &AdaptiveGrid) -> Vec2 {
    let c = grid.cells()[rng.gen_range(0..grid.len())];
    let h = c.size / 2.0;
    Vec2::new(c.center.x + rng.gen_range(-h..h), c.center.y + rng.gen_range(-h..h))
}

pub fn square_polygon(x0: f64, y0: f64, x1: f64, y1: f64) -> CascadePolygon {
    CascadePolygon {
        vertices: vec![Vec2::new(x0, y0), Vec2::new(x1, y0), Vec2::new(x1, y1), Vec2::new(x0, y1)],
        near_offset: 0.0,
        far_offset: 1.0,
    }
}

/// Random `res × res` raster over `[0, edge]²`: smooth bumps plus noise, with
/// a random disk of invalid texels.
pub fn random_raster(rng: &mut ChaCha8Rng, res: usize, edge: f64) -> CascadeRaster {
    let layout = fit_layout(1, square_polygon(0.0, 0.0, edge, edge), res, edge / 2.0);
    let grid = AdaptiveGrid::new(
        Rect::new(Vec2::ZERO, Vec2::new(edge, edge)),
        edge,
        vec![Cell::new(Vec2::new(edge / 2.0, edge / 2.0), edge, 0.0, 0.0)],
        true,
    )
    .unwrap();
    let mut r = CascadeRaster::blank(layout, &grid);
    r.sentinel = -1.0;
    let bumps: Vec<(Vec2, f64, f64)> = (0..4)
        .map(|_| {
            (
                Vec2::new(rng.gen_range(0.0..edge), rng.gen_range(0.0..edge)),
                rng.gen_range(0.05..0.3) * edge,
                rng.gen_range(-10.0..30.0),
            )
        })
        .collect();
    let hole = (Vec2::new(rng.gen_range(0.0..edge), rng.gen_range(0.0..edge)), rng.gen_range(0.0..0.2) * edge);
    for iy in 0..res {
        for ix in 0..res {
            let p = r.layout.texel_center(ix, iy);
            let mut h = 20.0 + rng.gen_range(-1.5..1.5);
            for (c, s, a) in &bumps {
                h += a * (-(p - *c).length_squared() / (2.0 * s * s)).exp();
            }
            let k = r.index(ix, iy);
            if (p - hole.0).length() < hole.1 {
                r.valid[k] = false;
                r.terrain[k] = r.sentinel;
                r.water[k] = r.sentinel;
            } else {
                r.valid[k] = true;
                r.terrain[k] = h.max(0.0);
                r.water[k] = h.max(0.0) + rng.gen_range(0.0..2.0);
            }
        }
    }
    r
}

/// Patch-by-patch walk in strict visitation order.
pub fn dda_oracle(ray: &Ray, raster: &CascadeRaster, layer: Layer) -> Option<CascadeHit> {
    let l = &raster.layout;
    let p = (l.resolution - 1) as f64;
    let o = Vec2::new(
        (ray.origin.x - l.world_origin.x) / l.texel_size.x,
        (ray.origin.y - l.world_origin.y) / l.texel_size.y,
    );
    let d = Vec2::new(ray.dir.x / l.texel_size.x, ray.dir.y / l.texel_size.y);
    let mut t_in: f64 = 0.0;
    let mut t_out = f64::INFINITY;
    for (oc, dc) in [(o.x, d.x), (o.y, d.y)] {
        if dc == 0.0 {
            if !(0.0..=p).contains(&oc) {
                return None;
            }
        } else {
            let a = (0.0 - oc) / dc;
            let b = (p - oc) / dc;
            t_in = t_in.max(a.min(b));
            t_out = t_out.min(a.max(b));
        }
    }
    if t_in > t_out {
        return None;
    }
    let start = Vec2::new(o.x + d.x * t_in, o.y + d.y * t_in);
    let first = |x: f64, dx: f64| -> i64 {
        let f = x.floor();
        let c = if dx < 0.0 && f == x { f - 1.0 } else { f };
        (c as i64).clamp(0, p as i64 - 1)
    };
    let (mut i, mut j) = (first(start.x, d.x), first(start.y, d.y));
    let step_i: i64 = if d.x > 0.0 { 1 } else { -1 };
    let step_j: i64 = if d.y > 0.0 { 1 } else { -1 };
    let next_cross = |c: i64, oc: f64, dc: f64| -> f64 {
        if dc > 0.0 {
            ((c + 1) as f64 - oc) / dc
        } else if dc < 0.0 {
            (c as f64 - oc) / dc
        } else {
            f64::INFINITY
        }
    };
    loop {
        if i < 0 || j < 0 || i as f64 >= p || j as f64 >= p {
            return None;
        }
        let (iu, ju) = (i as usize, j as usize);
        let corners = [(iu, ju), (iu + 1, ju), (iu, ju + 1), (iu + 1, ju + 1)];
        if corners.iter().all(|&(a, b)| raster.is_valid(a, b)) {
            let h = patch_heights(raster, layer, iu, ju);
            let (min, size) = patch_footprint(raster, iu, ju);
            if let Some(hit) = intersect_bilinear_patch(ray, &h, min, size) {
                let pos = ray.at(hit.t);
                return Some(CascadeHit {
                    t: hit.t,
                    position: Vec3::new(pos.x, pos.y, bilinear(&h, hit.u, hit.v)),
                    patch: (iu, ju),
                    uv: Vec2::new(hit.u, hit.v),
                });
            }
        }
        let tx = next_cross(i, o.x, d.x);
        let ty = next_cross(j, o.y, d.y);
        if tx.min(ty) > t_out {
            return None;
        }
        if tx <= ty {
            i += step_i;
        } else {
            j += step_j;
        }
    }
}

pub fn random_ray(rng: &mut ChaCha8Rng, edge: f64) -> Ray {
    let origin = Vec3::new(
        rng.gen_range(-0.3 * edge..1.3 * edge),
        rng.gen_range(-0.3 * edge..1.3 * edge),
        rng.gen_range(-5.0..80.0),
    );
    let dir = match rng.gen_range(0..12) {
        // aimed at the raster footprint
        4..=8 => {
            let target = Vec3::new(rng.gen_range(0.0..edge), rng.gen_range(0.0..edge), rng.gen_range(0.0..40.0));
            let o = Vec3::new(origin.x, origin.y, origin.z.max(target.z + 1.0));
            return Ray::new(o, target - o);
        }
        // straight down
        0 => Vec3::new(0.0, 0.0, -1.0),
        // axis-aligned grazing
        1 => Vec3::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0, rng.gen_range(-0.3..0.0)),
        2 => Vec3::new(0.0, if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, rng.gen_range(-0.3..0.0)),
        // upward
        3 => Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..0.5)),
        _ => Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..-0.02)),
    };
    Ray::new(origin, dir)
}

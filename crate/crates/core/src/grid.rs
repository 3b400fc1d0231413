//! Adaptive heightfield data model and per-cell influence lists.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{ceil, floor, log2, round, Vec2};
use crate::rbf::TRUNCATION;

/// Axis-aligned rectangle, inclusive bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub const fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    pub fn from_center(center: Vec2, edge: f64) -> Self {
        let h = edge * 0.5;
        Self::new(Vec2::new(center.x - h, center.y - h), Vec2::new(center.x + h, center.y + h))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Squared distance from `p` to the closest point of the rectangle.
    pub fn distance_squared(&self, p: Vec2) -> f64 {
        let dx = (self.min.x - p.x).max(p.x - self.max.x).max(0.0);
        let dy = (self.min.y - p.y).max(p.y - self.max.y).max(0.0);
        dx * dx + dy * dy
    }

    pub fn corners(&self) -> [Vec2; 4] {
        [
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ]
    }
}

/// One square cell of the adaptive grid; values live at the cell center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub center: Vec2,
    pub size: f64,
    pub terrain_height: f64,
    pub water_depth: f64,
}

impl Cell {
    pub fn new(center: Vec2, size: f64, terrain_height: f64, water_depth: f64) -> Self {
        Self { center, size, terrain_height, water_depth }
    }

    pub fn square(&self) -> Rect {
        Rect::from_center(self.center, self.size)
    }

    pub fn water_surface(&self) -> f64 {
        self.terrain_height + self.water_depth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    InvalidDomain,
    InvalidMinCell(f64),
    NonFinite { cell: usize },
    NegativeDepth { cell: usize, depth: f64 },
    NonPowerOfTwo { cell: usize, size: f64, min_cell: f64 },
    OutsideDomain { cell: usize },
    Misaligned { cell: usize },
    Overlap { first: usize, second: usize },
    TooManyTiles(u64),
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::InvalidDomain => write!(f, "domain rectangle is empty or not finite"),
            GridError::InvalidMinCell(m) => write!(f, "minimum cell size {m} must be positive"),
            GridError::NonFinite { cell } => write!(f, "cell {cell} has a non-finite field"),
            GridError::NegativeDepth { cell, depth } => {
                write!(f, "cell {cell} has negative water depth {depth}")
            }
            GridError::NonPowerOfTwo { cell, size, min_cell } => write!(
                f,
                "cell {cell}: size {size} is a non-power-of-two multiple of min_cell {min_cell}"
            ),
            GridError::OutsideDomain { cell } => write!(f, "cell {cell} lies outside the domain"),
            GridError::Misaligned { cell } => {
                write!(f, "cell {cell} is not aligned to the min_cell lattice of the domain")
            }
            GridError::Overlap { first, second } => {
                write!(f, "cells {first} and {second} overlap")
            }
            GridError::TooManyTiles(n) => write!(f, "lookup index would need {n} tiles"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GridError {}

const NO_CELL: u32 = u32::MAX;
const MAX_TILES: u64 = 1 << 28;

/// Cells that influence some point of a cell square.
///
/// Stored as one flat buffer with per-cell offsets. Each list is sorted by
/// cell index, which fixes the summation order of every approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceTable {
    sigma: f64,
    offsets: Vec<u32>,
    indices: Vec<u32>,
}

impl InfluenceTable {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Influence list of cell `cell`.
    pub fn list(&self, cell: usize) -> &[u32] {
        let a = self.offsets[cell] as usize;
        let b = self.offsets[cell + 1] as usize;
        &self.indices[a..b]
    }

    pub fn total_entries(&self) -> usize {
        self.indices.len()
    }
}

/// The point does not lie inside any cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutsideDomain;

impl fmt::Display for OutsideDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("outside domain")
    }
}

/// Quadtree-style set of non-overlapping square cells.
///
/// Cells must sit on the `min_cell_size` lattice anchored at `domain.min`;
/// point lookup goes through a flat tile index over that lattice.
#[derive(Debug, Clone)]
pub struct AdaptiveGrid {
    domain: Rect,
    min_cell_size: f64,
    cells: Vec<Cell>,
    height_range: (f64, f64),
    tiles_x: usize,
    tiles_y: usize,
    tiles: Vec<u32>,
    // lower tile corner and tile span per cell
    cell_tiles: Vec<(u32, u32, u32)>,
}

impl AdaptiveGrid {
    /// Validates the cells and builds the lookup index. With `check_overlap`
    /// unset, overlapping cells are accepted and the earlier cell wins lookups.
    pub fn new(
        domain: Rect,
        min_cell_size: f64,
        cells: Vec<Cell>,
        check_overlap: bool,
    ) -> Result<Self, GridError> {
        let finite = [domain.min.x, domain.min.y, domain.max.x, domain.max.y]
            .iter()
            .all(|v| v.is_finite());
        if !finite || domain.width() <= 0.0 || domain.height() <= 0.0 {
            return Err(GridError::InvalidDomain);
        }
        if !(min_cell_size > 0.0 && min_cell_size.is_finite()) {
            return Err(GridError::InvalidMinCell(min_cell_size));
        }
        let tiles_x = tile_count(domain.width(), min_cell_size);
        let tiles_y = tile_count(domain.height(), min_cell_size);
        let n_tiles = tiles_x as u64 * tiles_y as u64;
        if n_tiles > MAX_TILES {
            return Err(GridError::TooManyTiles(n_tiles));
        }

        let eps = 1e-9 * domain.width().max(domain.height()).max(1.0);
        let mut tiles = vec![NO_CELL; n_tiles as usize];
        let mut cell_tiles = Vec::with_capacity(cells.len());
        for (i, c) in cells.iter().enumerate() {
            let fields = [c.center.x, c.center.y, c.size, c.terrain_height, c.water_depth];
            if !fields.iter().all(|v| v.is_finite()) {
                return Err(GridError::NonFinite { cell: i });
            }
            if c.water_depth < 0.0 {
                return Err(GridError::NegativeDepth { cell: i, depth: c.water_depth });
            }
            let span = power_of_two_ratio(c.size, min_cell_size).ok_or(GridError::NonPowerOfTwo {
                cell: i,
                size: c.size,
                min_cell: min_cell_size,
            })?;
            let sq = c.square();
            if sq.min.x < domain.min.x - eps
                || sq.min.y < domain.min.y - eps
                || sq.max.x > domain.max.x + eps
                || sq.max.y > domain.max.y + eps
            {
                return Err(GridError::OutsideDomain { cell: i });
            }
            let lx = (sq.min.x - domain.min.x) / min_cell_size;
            let ly = (sq.min.y - domain.min.y) / min_cell_size;
            let (rx, ry) = (round(lx), round(ly));
            if (lx - rx).abs() > 1e-6 || (ly - ry).abs() > 1e-6 {
                return Err(GridError::Misaligned { cell: i });
            }
            let (tx, ty) = (rx.max(0.0) as usize, ry.max(0.0) as usize);
            if tx + span as usize > tiles_x || ty + span as usize > tiles_y {
                return Err(GridError::OutsideDomain { cell: i });
            }
            for y in ty..ty + span as usize {
                let row = &mut tiles[y * tiles_x..(y + 1) * tiles_x];
                for slot in &mut row[tx..tx + span as usize] {
                    if *slot != NO_CELL {
                        if check_overlap {
                            return Err(GridError::Overlap { first: *slot as usize, second: i });
                        }
                    } else {
                        *slot = i as u32;
                    }
                }
            }
            cell_tiles.push((tx as u32, ty as u32, span));
        }

        let height_range = if cells.is_empty() {
            (0.0, 0.0)
        } else {
            cells.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                (lo.min(c.terrain_height), hi.max(c.water_surface()).max(c.terrain_height))
            })
        };

        Ok(Self {
            domain,
            min_cell_size,
            cells,
            height_range,
            tiles_x,
            tiles_y,
            tiles,
            cell_tiles,
        })
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn min_cell_size(&self) -> f64 {
        self.min_cell_size
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `(min, max)` over terrain heights and water-surface heights.
    pub fn height_range(&self) -> (f64, f64) {
        self.height_range
    }

    /// Index of the cell containing `p`, `None` outside the domain or in a hole.
    pub fn locate(&self, p: Vec2) -> Option<usize> {
        if !self.domain.contains(p) {
            return None;
        }
        let tx = self.tile_coord(p.x - self.domain.min.x, self.tiles_x);
        let ty = self.tile_coord(p.y - self.domain.min.y, self.tiles_y);
        match self.tiles[ty * self.tiles_x + tx] {
            NO_CELL => None,
            c => Some(c as usize),
        }
    }

    fn tile_coord(&self, offset: f64, count: usize) -> usize {
        let t = floor(offset / self.min_cell_size);
        if t <= 0.0 {
            0
        } else {
            (t as usize).min(count - 1)
        }
    }

    /// Precomputed influence list for the cell containing `p`.
    pub fn influencers_at<'t>(
        &self,
        table: &'t InfluenceTable,
        p: Vec2,
    ) -> Result<&'t [u32], OutsideDomain> {
        self.locate(p).map(|c| table.list(c)).ok_or(OutsideDomain)
    }

    /// Lists cell `i` for cell `A` iff the distance from `p_i` to the square of
    /// `A` is at most the truncation radius `3.5 * sigma * c_i`. The boundary is
    /// inclusive, where the weight is exactly zero.
    pub fn build_influence_table(&self, sigma: f64) -> InfluenceTable {
        assert!(sigma > 0.0, "sigma must be positive");
        let n = self.cells.len();
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut stamp = vec![u32::MAX; n];
        let m = self.min_cell_size;
        for (i, c) in self.cells.iter().enumerate() {
            let r = TRUNCATION * sigma * c.size;
            let r2 = r * r;
            let lo = c.center - Vec2::new(r, r) - self.domain.min;
            let hi = c.center + Vec2::new(r, r) - self.domain.min;
            // closed tile squares touching the box
            let tx0 = clamp_tile(ceil(lo.x / m) - 1.0, self.tiles_x);
            let ty0 = clamp_tile(ceil(lo.y / m) - 1.0, self.tiles_y);
            let tx1 = clamp_tile(floor(hi.x / m), self.tiles_x);
            let ty1 = clamp_tile(floor(hi.y / m), self.tiles_y);
            for ty in ty0..=ty1 {
                let mut tx = tx0;
                while tx <= tx1 {
                    let a = self.tiles[ty * self.tiles_x + tx];
                    if a == NO_CELL {
                        tx += 1;
                        continue;
                    }
                    let (ax, _, span) = self.cell_tiles[a as usize];
                    tx = (ax + span) as usize;
                    if stamp[a as usize] == i as u32 {
                        continue;
                    }
                    stamp[a as usize] = i as u32;
                    if self.cells[a as usize].square().distance_squared(c.center) <= r2 {
                        lists[a as usize].push(i as u32);
                    }
                }
            }
        }

        let mut offsets = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        offsets.push(0u32);
        for l in &lists {
            indices.extend_from_slice(l);
            offsets.push(indices.len() as u32);
        }
        InfluenceTable { sigma, offsets, indices }
    }
}

fn tile_count(extent: f64, m: f64) -> usize {
    let t = extent / m;
    let r = round(t);
    if (t - r).abs() < 1e-9 * t.max(1.0) {
        (r as usize).max(1)
    } else {
        (ceil(t) as usize).max(1)
    }
}

fn clamp_tile(t: f64, count: usize) -> usize {
    if t <= 0.0 {
        0
    } else {
        (t as usize).min(count - 1)
    }
}

/// `Some(size / min_cell)` when it is `2^k` for an integer `k >= 0`.
fn power_of_two_ratio(size: f64, min_cell: f64) -> Option<u32> {
    if !(size > 0.0) {
        return None;
    }
    let ratio = size / min_cell;
    if ratio < 1.0 - 1e-9 {
        return None;
    }
    let k = round(log2(ratio));
    if !(0.0..=30.0).contains(&k) {
        return None;
    }
    let p = (1u32 << k as u32) as f64;
    if (ratio - p).abs() <= 1e-9 * p {
        Some(p as u32)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_domain(edge: f64) -> Rect {
        Rect::new(Vec2::ZERO, Vec2::new(edge, edge))
    }

    #[test]
    fn single_cell_height_range() {
        let cells = vec![Cell::new(Vec2::new(4.0, 4.0), 8.0, 100.0, 0.0)];
        let g = AdaptiveGrid::new(square_domain(8.0), 8.0, cells, true).unwrap();
        assert_eq!(g.height_range(), (100.0, 100.0));
    }

    #[test]
    fn rejects_non_power_of_two() {
        let cells = vec![Cell::new(Vec2::new(1.5, 1.5), 3.0, 0.0, 0.0)];
        let err = AdaptiveGrid::new(square_domain(8.0), 2.0, cells, true).unwrap_err();
        assert!(matches!(err, GridError::NonPowerOfTwo { cell: 0, .. }));
        assert!(err.to_string().contains("non-power-of-two multiple"));
    }

    #[test]
    fn four_cells_height_range() {
        let terrain = [3.0, -1.0, 7.0, 2.0];
        let cells: Vec<Cell> = [(2.0, 2.0), (6.0, 2.0), (2.0, 6.0), (6.0, 6.0)]
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Cell::new(Vec2::new(x, y), 4.0, terrain[i], i as f64))
            .collect();
        let g = AdaptiveGrid::new(square_domain(8.0), 4.0, cells, true).unwrap();
        // min terrain -1, max surface max(3+0, -1+1, 7+2, 2+3) = 9
        assert_eq!(g.height_range(), (-1.0, 9.0));
    }

    #[test]
    fn overlap_detection_can_be_disabled() {
        let cells = vec![
            Cell::new(Vec2::new(2.0, 2.0), 4.0, 0.0, 0.0),
            Cell::new(Vec2::new(1.0, 1.0), 2.0, 0.0, 0.0),
        ];
        let err = AdaptiveGrid::new(square_domain(8.0), 2.0, cells.clone(), true).unwrap_err();
        assert_eq!(err, GridError::Overlap { first: 0, second: 1 });
        let g = AdaptiveGrid::new(square_domain(8.0), 2.0, cells, false).unwrap();
        assert_eq!(g.locate(Vec2::new(1.0, 1.0)), Some(0));
    }

    #[test]
    fn rejects_cells_outside_domain_or_misaligned() {
        let out = vec![Cell::new(Vec2::new(7.0, 7.0), 4.0, 0.0, 0.0)];
        assert!(matches!(
            AdaptiveGrid::new(square_domain(8.0), 2.0, out, true),
            Err(GridError::OutsideDomain { cell: 0 })
        ));
        let off = vec![Cell::new(Vec2::new(2.5, 2.0), 2.0, 0.0, 0.0)];
        assert!(matches!(
            AdaptiveGrid::new(square_domain(8.0), 2.0, off, true),
            Err(GridError::Misaligned { cell: 0 })
        ));
    }

    #[test]
    fn holes_are_outside_domain() {
        let cells = vec![
            Cell::new(Vec2::new(1.0, 1.0), 2.0, 0.0, 0.0),
            Cell::new(Vec2::new(7.0, 7.0), 2.0, 0.0, 0.0),
        ];
        let g = AdaptiveGrid::new(square_domain(8.0), 2.0, cells, true).unwrap();
        let t = g.build_influence_table(1.0);
        assert_eq!(g.influencers_at(&t, Vec2::new(5.0, 5.0)), Err(OutsideDomain));
        assert_eq!(g.influencers_at(&t, Vec2::new(-1.0, 1.0)), Err(OutsideDomain));
        assert_eq!(g.influencers_at(&t, Vec2::new(1.0, 1.0)).unwrap(), &[0]);
        // domain max edge belongs to the last tile
        assert_eq!(g.locate(Vec2::new(8.0, 8.0)), Some(1));
    }

    #[test]
    fn single_cell_table_lists_itself() {
        let cells = vec![Cell::new(Vec2::new(4.0, 4.0), 8.0, 1.0, 0.0)];
        let g = AdaptiveGrid::new(square_domain(8.0), 8.0, cells, true).unwrap();
        let t = g.build_influence_table(1.0);
        assert_eq!(t.list(0), &[0]);
    }

    #[test]
    fn boundary_distance_is_inclusive() {
        // centers 4.0 apart, closest-point distance 3.5 == truncation radius
        let cells = vec![
            Cell::new(Vec2::new(0.5, 0.5), 1.0, 0.0, 0.0),
            Cell::new(Vec2::new(4.5, 0.5), 1.0, 0.0, 0.0),
        ];
        let g = AdaptiveGrid::new(square_domain(5.0), 1.0, cells, true).unwrap();
        let t = g.build_influence_table(1.0);
        assert_eq!(t.list(0), &[0, 1]);
        assert_eq!(t.list(1), &[0, 1]);
        let t = g.build_influence_table(0.99);
        assert_eq!(t.list(0), &[0]);
    }

    #[test]
    fn larger_cell_reaches_beyond_small_cell_radius() {
        // A small cell next to a large one: the large cell's center is outside
        // the small cell's own radius but the large radius covers the small cell.
        let cells = vec![
            Cell::new(Vec2::new(0.5, 0.5), 1.0, 0.0, 0.0),
            Cell::new(Vec2::new(8.0, 8.0), 8.0, 0.0, 0.0),
        ];
        let g = AdaptiveGrid::new(square_domain(12.0), 1.0, cells, true).unwrap();
        let t = g.build_influence_table(1.0);
        let small = g.influencers_at(&t, Vec2::new(0.5, 0.5)).unwrap();
        assert!(Vec2::new(0.5, 0.5).distance(Vec2::new(8.0, 8.0)) > 3.5);
        assert!(small.contains(&1));
        // the small cell does not reach into the big one
        let big = g.influencers_at(&t, Vec2::new(10.0, 10.0)).unwrap();
        assert_eq!(big, &[1]);
    }
}

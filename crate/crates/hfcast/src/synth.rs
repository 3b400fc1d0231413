//! Seeded synthetic quadtree grids.
//!
//! A square domain of coarse blocks is refined cell by cell, always splitting
//! the cell with the largest height variation (plus a little seeded jitter),
//! until the target cell count is reached. Neighbouring cells never differ by
//! more than a factor of two in size.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::str::FromStr;

use hfcast_core::{AdaptiveGrid, Cell, Rect, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const DEFAULT_CELLS: usize = 20_000;
/// Coarse cells are `2^MAX_LEVEL` minimum cells wide.
pub const MAX_LEVEL: u32 = 6;
pub const MIN_CELL: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthKind {
    Flat,
    Ramp,
    Hill,
    Pond,
}

impl SynthKind {
    pub const ALL: [SynthKind; 4] = [SynthKind::Flat, SynthKind::Ramp, SynthKind::Hill, SynthKind::Pond];

    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Flat => "flat",
            SynthKind::Ramp => "ramp",
            SynthKind::Hill => "hill",
            SynthKind::Pond => "pond",
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown synthetic kind `{0}` (expected flat, ramp, hill or pond)")]
pub struct UnknownKind(pub String);

impl FromStr for SynthKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}

/// Slope of the ramp terrain along x.
pub const RAMP_SLOPE: f64 = 0.25;
pub const BASE_HEIGHT: f64 = 20.0;

#[derive(Debug, Clone, Copy)]
struct Bump {
    center: Vec2,
    radius: f64,
    height: f64,
}

/// Analytic terrain and water depth sampled at cell centers.
#[derive(Debug, Clone)]
pub struct Landscape {
    kind: SynthKind,
    extent: f64,
    bumps: Vec<Bump>,
    pond: Option<(Vec2, f64, f64)>,
}

impl Landscape {
    fn new(kind: SynthKind, extent: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut bumps = Vec::new();
        let mut pond = None;
        if matches!(kind, SynthKind::Hill | SynthKind::Pond) {
            let c = Vec2::new(rng.gen_range(0.4..0.6), rng.gen_range(0.55..0.7)) * extent;
            bumps.push(Bump { center: c, radius: 0.18 * extent, height: 0.2 * extent });
            for _ in 0..4 {
                bumps.push(Bump {
                    center: Vec2::new(rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9)) * extent,
                    radius: rng.gen_range(0.03..0.08) * extent,
                    height: rng.gen_range(-0.02..0.05) * extent,
                });
            }
        }
        if kind == SynthKind::Pond {
            let c = Vec2::new(rng.gen_range(0.3..0.7), rng.gen_range(0.2..0.3)) * extent;
            let radius = rng.gen_range(0.12..0.16) * extent;
            pond = Some((c, radius, 0.04 * extent));
        }
        Self { kind, extent, bumps, pond }
    }

    fn base(&self, p: Vec2) -> f64 {
        match self.kind {
            SynthKind::Flat => BASE_HEIGHT,
            SynthKind::Ramp => BASE_HEIGHT + RAMP_SLOPE * p.x,
            SynthKind::Hill | SynthKind::Pond => {
                let mut h = BASE_HEIGHT + 0.02 * p.y;
                for b in &self.bumps {
                    let r2 = (p - b.center).length_squared() / (b.radius * b.radius);
                    h += b.height * (-0.5 * r2).exp();
                }
                h
            }
        }
    }

    /// `(terrain, water_depth)` at `p`.
    pub fn sample(&self, p: Vec2) -> (f64, f64) {
        let base = self.base(p);
        let Some((c, radius, depth)) = self.pond else {
            return (base, 0.0);
        };
        let r = (p - c).length() / radius;
        if r >= 1.0 {
            return (base, 0.0);
        }
        let bowl = depth * (1.0 - r * r);
        let terrain = base - bowl;
        // still water at the rim level of the near side
        let level = self.base(c) - 0.2 * depth;
        (terrain, (level - terrain).max(0.0))
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Key {
    level: u32,
    ix: i64,
    iy: i64,
}

impl Key {
    fn size(self) -> f64 {
        MIN_CELL * (1u64 << self.level) as f64
    }

    fn center(self) -> Vec2 {
        let s = self.size();
        Vec2::new((self.ix as f64 + 0.5) * s, (self.iy as f64 + 0.5) * s)
    }

    fn children(self) -> [Key; 4] {
        let l = self.level - 1;
        let (x, y) = (2 * self.ix, 2 * self.iy);
        [
            Key { level: l, ix: x, iy: y },
            Key { level: l, ix: x + 1, iy: y },
            Key { level: l, ix: x, iy: y + 1 },
            Key { level: l, ix: x + 1, iy: y + 1 },
        ]
    }
}

struct Candidate {
    score: f64,
    key: Key,
}

impl PartialEq for Candidate {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Candidate {
    fn cmp(&self, o: &Self) -> Ordering {
        self.score.total_cmp(&o.score).then_with(|| o.key.cmp(&self.key))
    }
}

struct Refiner<'a> {
    land: &'a Landscape,
    blocks: i64,
    leaves: HashSet<Key>,
    heap: BinaryHeap<Candidate>,
    rng: ChaCha8Rng,
}

impl Refiner<'_> {
    fn score(&mut self, key: Key) -> f64 {
        let c = key.center();
        let h = key.size() / 2.0;
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let (mut wet, mut dry) = (false, false);
        for (dx, dy) in [(0.0, 0.0), (-h, -h), (h, -h), (-h, h), (h, h), (0.0, h), (0.0, -h), (h, 0.0), (-h, 0.0)] {
            let (t, d) = self.land.sample(c + Vec2::new(dx, dy));
            lo = (lo.0.min(t), lo.1.min(d));
            hi = (hi.0.max(t), hi.1.max(d));
            if d > 0.0 {
                wet = true;
            } else {
                dry = true;
            }
        }
        let shore = if wet && dry { key.size() } else { 0.0 };
        let jitter = self.rng.gen::<f64>() * 0.05 * key.size();
        (hi.0 - lo.0) + 2.0 * (hi.1 - lo.1) + shore + jitter
    }

    fn push(&mut self, key: Key) {
        self.leaves.insert(key);
        if key.level > 0 {
            let score = self.score(key);
            self.heap.push(Candidate { score, key });
        }
    }

    /// Leaf at `level` or coarser that covers block `(ix, iy)` of `level`.
    fn covering_leaf(&self, level: u32, ix: i64, iy: i64) -> Option<Key> {
        let n = self.blocks << (MAX_LEVEL - level);
        if ix < 0 || iy < 0 || ix >= n || iy >= n {
            return None;
        }
        (level..=MAX_LEVEL)
            .map(|l| Key { level: l, ix: ix >> (l - level), iy: iy >> (l - level) })
            .find(|k| self.leaves.contains(k))
    }

    fn split(&mut self, key: Key) {
        if !self.leaves.contains(&key) || key.level == 0 {
            return;
        }
        // neighbours more than twice as large as the children get split first
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(n) = self.covering_leaf(key.level, key.ix + dx, key.iy + dy) {
                    if n.level > key.level {
                        self.split(n);
                    }
                }
            }
        }
        self.leaves.remove(&key);
        for c in key.children() {
            self.push(c);
        }
    }
}

fn setup(kind: SynthKind, seed: u64, target_cells: usize) -> (Landscape, ChaCha8Rng, i64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse = 1i64 << MAX_LEVEL;
    let side = ((2.0 * target_cells.max(1) as f64).sqrt() / coarse as f64).ceil() as i64;
    let blocks = side.max(2);
    let extent = (blocks * coarse) as f64 * MIN_CELL;
    (Landscape::new(kind, extent, &mut rng), rng, blocks)
}

/// Deterministic grid for `(kind, seed, target)`. The domain is sized so
/// that about twice the target count of minimum cells fits.
pub fn generate(kind: SynthKind, seed: u64, target_cells: usize) -> AdaptiveGrid {
    let (land, rng, blocks) = setup(kind, seed, target_cells);
    let mut r = Refiner { land: &land, blocks, leaves: HashSet::new(), heap: BinaryHeap::new(), rng };
    for iy in 0..blocks {
        for ix in 0..blocks {
            r.push(Key { level: MAX_LEVEL, ix, iy });
        }
    }
    while r.leaves.len() < target_cells {
        let Some(c) = r.heap.pop() else { break };
        r.split(c.key);
    }

    let mut keys: Vec<Key> = r.leaves.into_iter().collect();
    keys.sort_by(|a, b| {
        let (ca, cb) = (a.center(), b.center());
        ca.y.total_cmp(&cb.y).then(ca.x.total_cmp(&cb.x))
    });
    let cells = keys
        .into_iter()
        .map(|k| {
            let (t, d) = land.sample(k.center());
            Cell::new(k.center(), k.size(), t, d)
        })
        .collect();
    let domain = Rect::new(Vec2::ZERO, Vec2::new(land.extent, land.extent));
    AdaptiveGrid::new(domain, MIN_CELL, cells, false).expect("synthetic grid is valid")
}

/// Analytic landscape behind [`generate`] for the same arguments.
pub fn landscape(kind: SynthKind, seed: u64, target_cells: usize) -> Landscape {
    setup(kind, seed, target_cells).0
}

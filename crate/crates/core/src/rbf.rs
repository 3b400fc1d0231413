//! Truncated Gaussian weights and the normalized weighted sum over
//! influencing cells.

use core::fmt;

use crate::grid::{AdaptiveGrid, InfluenceTable, OutsideDomain};
use crate::math::{exp, Vec2};

/// Truncation radius in multiples of sigma.
pub const TRUNCATION: f64 = 3.5;

/// Which cell value is interpolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    Terrain,
    /// Terrain height plus water depth.
    WaterSurface,
}

impl Layer {
    pub const BOTH: [Layer; 2] = [Layer::Terrain, Layer::WaterSurface];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfParams {
    sigma: f64,
    remainder: f64,
}

impl Default for RbfParams {
    fn default() -> Self {
        Self::new(1.0)
    }
}

impl RbfParams {
    /// # Panics
    /// If `sigma` is not positive and finite.
    pub fn new(sigma: f64) -> Self {
        assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive, got {sigma}");
        Self { sigma, remainder: exp(-TRUNCATION * TRUNCATION / 2.0) }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Truncation radius for a cell of edge `cell_size`.
    #[inline]
    pub fn radius(&self, cell_size: f64) -> f64 {
        TRUNCATION * self.sigma * cell_size
    }
}

/// Weight of the cell centered at `center` with edge `cell_size` at `p`.
///
/// Zero at and beyond `3.5 * sigma * cell_size`, strictly positive inside.
#[inline]
pub fn weight(center: Vec2, cell_size: f64, p: Vec2, params: &RbfParams) -> f64 {
    let r = params.radius(cell_size);
    let d2 = (center - p).length_squared();
    if d2 >= r * r {
        return 0.0;
    }
    let q = d2 / (cell_size * cell_size);
    (exp(-q / (2.0 * params.sigma * params.sigma)) - params.remainder).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleValue {
    pub value: f64,
    pub weight_sum: f64,
    pub influencer_count: u32,
}

impl SampleValue {
    pub fn is_defined(&self) -> bool {
        self.weight_sum > 0.0
    }
}

/// Both layers at one position; they share weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSample {
    pub terrain: f64,
    pub water_surface: f64,
    pub weight_sum: f64,
    pub influencer_count: u32,
}

impl LayerSample {
    pub fn get(&self, layer: Layer) -> SampleValue {
        let value = match layer {
            Layer::Terrain => self.terrain,
            Layer::WaterSurface => self.water_surface,
        };
        SampleValue { value, weight_sum: self.weight_sum, influencer_count: self.influencer_count }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbfError {
    OutsideDomain,
    /// No positive weight at a point inside a cell.
    CorruptInfluenceTable,
}

impl fmt::Display for RbfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RbfError::OutsideDomain => f.write_str("outside domain"),
            RbfError::CorruptInfluenceTable => {
                f.write_str("no influencing cell with positive weight (corrupt influence table)")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RbfError {}

impl From<OutsideDomain> for RbfError {
    fn from(_: OutsideDomain) -> Self {
        RbfError::OutsideDomain
    }
}

/// Weighted average of terrain heights and of water depths at `p`.
///
/// Terms are accumulated relative to the first contributing cell, so a
/// constant field is reproduced bit-exactly. The water surface is the terrain
/// estimate plus the non-negative depth estimate and never lies below it.
pub fn approximate_layers(
    p: Vec2,
    grid: &AdaptiveGrid,
    table: &InfluenceTable,
    params: &RbfParams,
) -> Result<LayerSample, RbfError> {
    let list = grid.influencers_at(table, p)?;
    let cells = grid.cells();
    let mut reference: Option<(f64, f64)> = None;
    let (mut w_sum, mut t_sum, mut d_sum) = (0.0, 0.0, 0.0);
    let mut count = 0u32;
    for &i in list {
        let c = &cells[i as usize];
        let w = weight(c.center, c.size, p, params);
        if w <= 0.0 {
            continue;
        }
        let (t_ref, d_ref) = *reference.get_or_insert((c.terrain_height, c.water_depth));
        w_sum += w;
        t_sum += w * (c.terrain_height - t_ref);
        d_sum += w * (c.water_depth - d_ref);
        count += 1;
    }
    let Some((t_ref, d_ref)) = reference else {
        return Err(RbfError::CorruptInfluenceTable);
    };
    let terrain = t_ref + t_sum / w_sum;
    let depth = (d_ref + d_sum / w_sum).max(0.0);
    Ok(LayerSample {
        terrain,
        water_surface: terrain + depth,
        weight_sum: w_sum,
        influencer_count: count,
    })
}

/// Approximated value of one layer at `p`.
pub fn approximate(
    p: Vec2,
    layer: Layer,
    grid: &AdaptiveGrid,
    table: &InfluenceTable,
    params: &RbfParams,
) -> Result<SampleValue, RbfError> {
    approximate_layers(p, grid, table, params).map(|s| s.get(layer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Cell, Rect};
    use alloc::vec;

    #[test]
    fn weight_at_center() {
        let p = RbfParams::default();
        let w = weight(Vec2::new(1.0, 2.0), 3.0, Vec2::new(1.0, 2.0), &p);
        assert!((w - 0.997_812_508_881_817).abs() < 1e-15, "{w}");
    }

    #[test]
    fn weight_truncates_exactly() {
        for &(sigma, c) in &[(1.0, 1.0), (0.7, 3.0), (1.3, 0.75), (2.0, 96.0)] {
            let p = RbfParams::new(sigma);
            let r = p.radius(c);
            assert_eq!(weight(Vec2::ZERO, c, Vec2::new(r, 0.0), &p), 0.0);
            assert_eq!(weight(Vec2::ZERO, c, Vec2::new(0.0, -r), &p), 0.0);
            assert!(weight(Vec2::ZERO, c, Vec2::new(0.999 * r, 0.0), &p) > 0.0);
            assert_eq!(weight(Vec2::ZERO, c, Vec2::new(10.0 * c * sigma, 0.0), &p), 0.0);
        }
    }

    #[test]
    fn bisector_of_two_cells_is_mean() {
        let cells = vec![
            Cell::new(Vec2::new(1.0, 1.0), 2.0, 0.0, 0.0),
            Cell::new(Vec2::new(3.0, 1.0), 2.0, 10.0, 0.0),
        ];
        let g = AdaptiveGrid::new(Rect::new(Vec2::ZERO, Vec2::new(4.0, 2.0)), 2.0, cells, true)
            .unwrap();
        let t = g.build_influence_table(1.0);
        let params = RbfParams::default();
        for y in [0.0, 0.3, 1.0, 1.7, 2.0] {
            let s = approximate(Vec2::new(2.0, y), Layer::Terrain, &g, &t, &params).unwrap();
            assert!((s.value - 5.0).abs() < 1e-12, "{}", s.value);
            assert_eq!(s.influencer_count, 2);
        }
    }

    #[test]
    fn single_cell_reproduces_value() {
        let cells = vec![Cell::new(Vec2::new(4.0, 4.0), 8.0, 12.5, 0.75)];
        let g = AdaptiveGrid::new(Rect::new(Vec2::ZERO, Vec2::new(8.0, 8.0)), 8.0, cells, true)
            .unwrap();
        let t = g.build_influence_table(1.0);
        let params = RbfParams::default();
        for p in [Vec2::new(0.0, 0.0), Vec2::new(4.0, 4.0), Vec2::new(7.9, 0.1)] {
            let s = approximate_layers(p, &g, &t, &params).unwrap();
            assert_eq!(s.terrain, 12.5);
            assert_eq!(s.water_surface, 13.25);
        }
    }

    #[test]
    fn outside_domain_propagates() {
        let cells = vec![Cell::new(Vec2::new(4.0, 4.0), 8.0, 1.0, 0.0)];
        let g = AdaptiveGrid::new(Rect::new(Vec2::ZERO, Vec2::new(8.0, 8.0)), 8.0, cells, true)
            .unwrap();
        let t = g.build_influence_table(1.0);
        let e = approximate(Vec2::new(9.0, 1.0), Layer::Terrain, &g, &t, &RbfParams::default());
        assert_eq!(e, Err(RbfError::OutsideDomain));
    }
}

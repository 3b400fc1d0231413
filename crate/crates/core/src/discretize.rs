//! The approximation pass: evaluates the weighted sum at every visible texel
//! of a cascade.

use alloc::vec;
use alloc::vec::Vec;

use crate::cascade::CascadeLayout;
use crate::grid::{AdaptiveGrid, InfluenceTable};
use crate::rbf::{approximate_layers, Layer, RbfParams, RbfError};

/// Cached approximation of both layers over one cascade texture.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeRaster {
    pub layout: CascadeLayout,
    pub terrain: Vec<f64>,
    /// Water-surface elevation.
    pub water: Vec<f64>,
    pub valid: Vec<bool>,
    /// Stored in every invalid texel; below the grid's height range.
    pub sentinel: f64,
    /// Number of texels that read grid data.
    pub evaluated: usize,
}

impl CascadeRaster {
    /// Raster with every texel invalid.
    pub fn blank(layout: CascadeLayout, grid: &AdaptiveGrid) -> Self {
        let n = layout.resolution * layout.resolution;
        let sentinel = grid.height_range().0 - 1.0;
        Self {
            layout,
            terrain: vec![sentinel; n],
            water: vec![sentinel; n],
            valid: vec![false; n],
            sentinel,
            evaluated: 0,
        }
    }

    pub fn resolution(&self) -> usize {
        self.layout.resolution
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.layout.resolution + ix
    }

    pub fn layer(&self, layer: Layer) -> &[f64] {
        match layer {
            Layer::Terrain => &self.terrain,
            Layer::WaterSurface => &self.water,
        }
    }

    #[inline]
    pub fn height(&self, layer: Layer, ix: usize, iy: usize) -> f64 {
        self.layer(layer)[self.index(ix, iy)]
    }

    #[inline]
    pub fn is_valid(&self, ix: usize, iy: usize) -> bool {
        self.valid[self.index(ix, iy)]
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// `(min, max)` over valid texels of a layer, `None` if nothing is valid.
    pub fn valid_range(&self, layer: Layer) -> Option<(f64, f64)> {
        self.layer(layer)
            .iter()
            .zip(&self.valid)
            .filter(|(_, &v)| v)
            .map(|(&h, _)| h)
            .fold(None, |acc, h| match acc {
                None => Some((h, h)),
                Some((lo, hi)) => Some((lo.min(h), hi.max(h))),
            })
    }

    /// Layout plus the three output buffers, for filling rows in parallel.
    pub fn parts_mut(&mut self) -> (&CascadeLayout, &mut [f64], &mut [f64], &mut [bool]) {
        (&self.layout, &mut self.terrain, &mut self.water, &mut self.valid)
    }
}

/// Fills one texel row. Masked-out texels are left untouched. Returns the
/// number of texels that read grid data.
#[allow(clippy::too_many_arguments)]
pub fn discretize_row(
    layout: &CascadeLayout,
    iy: usize,
    grid: &AdaptiveGrid,
    table: &InfluenceTable,
    params: &RbfParams,
    terrain: &mut [f64],
    water: &mut [f64],
    valid: &mut [bool],
) -> usize {
    let res = layout.resolution;
    let mut evaluated = 0;
    for ix in 0..res {
        if !layout.is_visible(ix, iy) {
            continue;
        }
        evaluated += 1;
        let p = layout.texel_center(ix, iy);
        match approximate_layers(p, grid, table, params) {
            Ok(s) => {
                terrain[ix] = s.terrain;
                water[ix] = s.water_surface;
                valid[ix] = true;
            }
            Err(RbfError::OutsideDomain) => {}
            Err(RbfError::CorruptInfluenceTable) => {
                debug_assert!(false, "no positive weight at {p:?}");
            }
        }
    }
    evaluated
}

/// Sequential approximation pass over one cascade.
pub fn discretize_cascade(
    layout: &CascadeLayout,
    grid: &AdaptiveGrid,
    table: &InfluenceTable,
    params: &RbfParams,
) -> CascadeRaster {
    let mut raster = CascadeRaster::blank(layout.clone(), grid);
    let res = raster.resolution();
    let (layout, terrain, water, valid) = raster.parts_mut();
    let mut evaluated = 0;
    for (iy, ((t, w), v)) in terrain
        .chunks_mut(res)
        .zip(water.chunks_mut(res))
        .zip(valid.chunks_mut(res))
        .enumerate()
    {
        evaluated += discretize_row(layout, iy, grid, table, params, t, w, v);
    }
    raster.evaluated = evaluated;
    raster
}

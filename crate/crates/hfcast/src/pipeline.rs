//! Parallel, timed frame pipeline.
//!
//! The approximation pass (cascade fitting and discretization) and the ray
//! casting pass (mipmaps and per-pixel casts) are timed separately. Work is
//! split by texel rows and image rows; every output value is computed by
//! exactly one task, so frames are identical at any thread count.

use std::time::Instant;

use hfcast_core::discretize::discretize_row;
use hfcast_core::raycast::PreparedCascade;
use hfcast_core::render::Shader;
use hfcast_core::{
    AdaptiveGrid, CameraView, CascadeError, CascadeLayout, CascadeRaster, CascadeSet, CascadeSettings, Frame,
    FrameConfig, InfluenceTable, PreparedFrame, RbfParams,
};
use rayon::prelude::*;
use rayon::ThreadPool;

#[derive(Debug, Clone, PartialEq)]
pub struct TimedFrame {
    pub frame: Frame,
    pub approximation_ms: f64,
    pub raycast_ms: f64,
    pub visible_texels: usize,
    /// `None` when the camera sees nothing.
    pub prepared: Option<PreparedFrame>,
}

impl TimedFrame {
    pub fn nothing_visible(&self) -> bool {
        self.prepared.is_none()
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub struct Pipeline {
    pool: ThreadPool,
}

impl Pipeline {
    /// `threads = 0` uses one worker per core.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn discretize(
        &self,
        layout: &CascadeLayout,
        grid: &AdaptiveGrid,
        table: &InfluenceTable,
        params: &RbfParams,
    ) -> CascadeRaster {
        let mut raster = CascadeRaster::blank(layout.clone(), grid);
        let res = raster.resolution();
        let (layout, terrain, water, valid) = raster.parts_mut();
        let evaluated = self.pool.install(|| {
            terrain
                .par_chunks_mut(res)
                .zip(water.par_chunks_mut(res))
                .zip(valid.par_chunks_mut(res))
                .enumerate()
                .map(|(iy, ((t, w), v))| discretize_row(layout, iy, grid, table, params, t, w, v))
                .sum()
        });
        raster.evaluated = evaluated;
        raster
    }

    /// Cascade geometry and both layers of every cascade.
    pub fn approximate(
        &self,
        camera: &CameraView,
        grid: &AdaptiveGrid,
        table: &InfluenceTable,
        params: &RbfParams,
        settings: &CascadeSettings,
    ) -> Result<(CascadeSet, [Option<CascadeRaster>; 3]), CascadeError> {
        let set = CascadeSet::compute(camera, grid, settings)?;
        let rasters = set.layouts.each_ref().map(|l| l.as_ref().map(|l| self.discretize(l, grid, table, params)));
        Ok((set, rasters))
    }

    pub fn build_mipmaps(&self, rasters: [Option<CascadeRaster>; 3]) -> [Option<PreparedCascade>; 3] {
        let [a, b, c] = rasters;
        let ((a, b), c) = self.pool.install(|| {
            rayon::join(
                || rayon::join(|| a.map(PreparedCascade::new), || b.map(PreparedCascade::new)),
                || c.map(PreparedCascade::new),
            )
        });
        [a, b, c]
    }

    pub fn cast(&self, config: &FrameConfig, prepared: &PreparedFrame, shader: &Shader) -> Frame {
        let mut frame = Frame::filled(config.width, config.height, config.background);
        let stride = 3 * config.width as usize;
        frame.rays_hit = self.pool.install(|| {
            frame
                .pixels
                .par_chunks_mut(stride)
                .enumerate()
                .map(|(py, row)| prepared.render_row(config, shader, py as u32, row))
                .sum()
        });
        frame
    }

    pub fn render(
        &self,
        config: &FrameConfig,
        grid: &AdaptiveGrid,
        table: &InfluenceTable,
        params: &RbfParams,
        settings: &CascadeSettings,
    ) -> TimedFrame {
        let t0 = Instant::now();
        let approx = self.approximate(&config.camera, grid, table, params, settings);
        let approximation_ms = elapsed_ms(t0);
        let Ok((set, rasters)) = approx else {
            return TimedFrame {
                frame: Frame::filled(config.width, config.height, config.background),
                approximation_ms,
                raycast_ms: 0.0,
                visible_texels: 0,
                prepared: None,
            };
        };
        let visible_texels = set.visible_texels();

        let t1 = Instant::now();
        let prepared = PreparedFrame { set, cascades: self.build_mipmaps(rasters) };
        let frame = self.cast(config, &prepared, &Shader::new(config, grid));
        let raycast_ms = elapsed_ms(t1);
        TimedFrame { frame, approximation_ms, raycast_ms, visible_texels, prepared: Some(prepared) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SynthKind};
    use hfcast_core::render::render_frame;
    use hfcast_core::Vec3;

    #[test]
    fn matches_sequential_renderer() {
        let grid = generate(SynthKind::Pond, 5, 3000);
        let table = grid.build_influence_table(1.0);
        let cam = CameraView::look_at(
            Vec3::new(40.0, -30.0, 70.0),
            Vec3::new(64.0, 80.0, 20.0),
            Vec3::Z,
            50.0,
            1.5,
            1.0,
            1000.0,
        )
        .unwrap();
        let config = FrameConfig::new(48, 32, cam, (0.0, 4.0), [1, 2, 3]).unwrap();
        let settings = CascadeSettings { resolution: 64, ..Default::default() };
        let params = RbfParams::default();
        let reference = render_frame(&config, &grid, &table, &params, &settings);
        for threads in [1, 3] {
            let t = Pipeline::new(threads).unwrap().render(&config, &grid, &table, &params, &settings);
            assert_eq!(t.frame, reference);
            assert!(t.frame.rays_hit > 0);
            assert!(t.visible_texels > 0);
        }
    }
}

//! Per-pixel hit resolution and shading, plus a sequential reference frame
//! renderer.

use alloc::vec::Vec;
use core::fmt;

use crate::cascade::{CameraView, CascadeError, CascadeSet, CascadeSettings, CASCADE_COUNT};
use crate::discretize::discretize_cascade;
use crate::grid::{AdaptiveGrid, InfluenceTable};
use crate::math::{round, Vec3};
use crate::raycast::{cast_through_cascades, HitRecord, PreparedCascade, Ray};
use crate::rbf::{Layer, RbfParams};

pub type Rgb = [u8; 3];

/// Colormap stops for shallow, medium and deep water.
pub const COLORMAP_STOPS: [Rgb; 3] = [[0, 0, 128], [0, 180, 220], [240, 248, 255]];

pub const DEFAULT_BACKGROUND: Rgb = [135, 170, 205];

#[derive(Debug, Clone, PartialEq)]
pub enum FrameError {
    EmptyImage,
    InvalidColormap,
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameError::EmptyImage => write!(f, "image width and height must be at least 1"),
            FrameError::InvalidColormap => write!(f, "colormap range must satisfy min < max"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FrameError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    pub width: u32,
    pub height: u32,
    pub camera: CameraView,
    /// Water depth mapped to the first and last colormap stop.
    pub colormap: (f64, f64),
    pub background: Rgb,
}

impl FrameConfig {
    pub fn new(
        width: u32,
        height: u32,
        camera: CameraView,
        colormap: (f64, f64),
        background: Rgb,
    ) -> Result<Self, FrameError> {
        if width == 0 || height == 0 {
            return Err(FrameError::EmptyImage);
        }
        if !(colormap.0 < colormap.1) || !colormap.0.is_finite() || !colormap.1.is_finite() {
            return Err(FrameError::InvalidColormap);
        }
        Ok(Self { width, height, camera, colormap, background })
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn pixel_ray(&self, px: u32, py: u32) -> Ray {
        let d = self.camera.pixel_direction(px, py, self.width, self.height);
        Ray::new(self.camera.eye, d)
    }
}

fn mix_channel(a: u8, b: u8, t: f64) -> u8 {
    round(a as f64 + (b as f64 - a as f64) * t) as u8
}

/// Clamped affine map of `depth` over `range` onto the three colormap stops.
/// NaN maps to `background`.
pub fn depth_colormap(depth: f64, range: (f64, f64), background: Rgb) -> Rgb {
    if depth.is_nan() {
        return background;
    }
    let t = ((depth - range.0) / (range.1 - range.0)).clamp(0.0, 1.0);
    let (a, b, s) = if t <= 0.5 {
        (COLORMAP_STOPS[0], COLORMAP_STOPS[1], 2.0 * t)
    } else {
        (COLORMAP_STOPS[1], COLORMAP_STOPS[2], 2.0 * t - 1.0)
    };
    [mix_channel(a[0], b[0], s), mix_channel(a[1], b[1], s), mix_channel(a[2], b[2], s)]
}

/// What a camera ray sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PixelSample {
    Miss,
    Terrain(HitRecord),
    /// Water hit with the depth below it.
    Water(HitRecord, f64),
}

impl PixelSample {
    pub fn is_hit(&self) -> bool {
        !matches!(self, PixelSample::Miss)
    }

    pub fn hit(&self) -> Option<&HitRecord> {
        match self {
            PixelSample::Miss => None,
            PixelSample::Terrain(h) | PixelSample::Water(h, _) => Some(h),
        }
    }
}

/// Terrain grayscale and Lambert term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shader {
    pub height_range: (f64, f64),
    pub colormap: (f64, f64),
    pub background: Rgb,
    /// Unit vector towards the light.
    pub light: Vec3,
}

impl Shader {
    pub fn new(config: &FrameConfig, grid: &AdaptiveGrid) -> Self {
        Self {
            height_range: grid.height_range(),
            colormap: config.colormap,
            background: config.background,
            light: Vec3::new(-0.35, -0.45, 0.82).normalize(),
        }
    }

    pub fn terrain(&self, hit: &HitRecord) -> Rgb {
        let (lo, hi) = self.height_range;
        let hn = if hi > lo { ((hit.world_pos.z - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
        let base = 0.35 + 0.65 * hn;
        let lambert = 0.25 + 0.75 * hit.normal.dot(self.light).max(0.0);
        let g = round(255.0 * (base * lambert).clamp(0.0, 1.0)) as u8;
        [g, g, g]
    }

    pub fn shade(&self, sample: &PixelSample) -> Rgb {
        match sample {
            PixelSample::Miss => self.background,
            PixelSample::Terrain(h) => self.terrain(h),
            PixelSample::Water(_, depth) => depth_colormap(*depth, self.colormap, self.background),
        }
    }
}

/// Cascade geometry and discretized rasters for one camera pose.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedFrame {
    pub set: CascadeSet,
    pub cascades: [Option<PreparedCascade>; CASCADE_COUNT],
}

impl PreparedFrame {
    /// Sequential approximation pass and mipmap construction.
    pub fn build(
        camera: &CameraView,
        grid: &AdaptiveGrid,
        table: &InfluenceTable,
        params: &RbfParams,
        settings: &CascadeSettings,
    ) -> Result<Self, CascadeError> {
        let set = CascadeSet::compute(camera, grid, settings)?;
        let cascades = set
            .layouts
            .each_ref()
            .map(|l| l.as_ref().map(|l| PreparedCascade::new(discretize_cascade(l, grid, table, params))));
        Ok(Self { set, cascades })
    }

    /// Terrain and water casts; water wins only when strictly nearer.
    pub fn trace(&self, ray: &Ray) -> PixelSample {
        let terrain = cast_through_cascades(ray, Layer::Terrain, &self.set, &self.cascades);
        let water = cast_through_cascades(ray, Layer::WaterSurface, &self.set, &self.cascades);
        match (terrain, water) {
            (t, Some(w)) if t.is_none_or(|t| w.t < t.t) => {
                PixelSample::Water(w, w.world_pos.z - w.terrain_height)
            }
            (Some(t), _) => PixelSample::Terrain(t),
            (None, _) => PixelSample::Miss,
        }
    }

    /// Shades image row `py` into `out` (3 bytes per pixel). Returns the
    /// number of pixels whose ray hit a surface.
    pub fn render_row(&self, config: &FrameConfig, shader: &Shader, py: u32, out: &mut [u8]) -> usize {
        let mut hits = 0;
        for (px, rgb) in (0..config.width).zip(out.chunks_exact_mut(3)) {
            let sample = self.trace(&config.pixel_ray(px, py));
            hits += sample.is_hit() as usize;
            rgb.copy_from_slice(&shader.shade(&sample));
        }
        hits
    }
}

/// Interleaved 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
    pub rays_hit: usize,
}

impl Frame {
    pub fn filled(width: u32, height: u32, color: Rgb) -> Self {
        let n = width as usize * height as usize;
        let mut pixels = Vec::with_capacity(3 * n);
        for _ in 0..n {
            pixels.extend_from_slice(&color);
        }
        Self { width, height, pixels, rays_hit: 0 }
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }
}

/// Single-threaded frame. A camera that sees nothing yields a background frame.
pub fn render_frame(
    config: &FrameConfig,
    grid: &AdaptiveGrid,
    table: &InfluenceTable,
    params: &RbfParams,
    settings: &CascadeSettings,
) -> Frame {
    let mut frame = Frame::filled(config.width, config.height, config.background);
    let Ok(prepared) = PreparedFrame::build(&config.camera, grid, table, params, settings) else {
        return frame;
    };
    let shader = Shader::new(config, grid);
    let stride = 3 * config.width as usize;
    for (py, row) in frame.pixels.chunks_exact_mut(stride).enumerate() {
        frame.rays_hit += prepared.render_row(config, &shader, py as u32, row);
    }
    frame
}

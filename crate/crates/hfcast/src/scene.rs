//! Scene files: flat `key = value` text with `#` comments.
//!
//! ```text
//! grid = terrain.ahf        # or synth:<kind>
//! seed = 42
//! eye = 128 -40 90
//! look_at = 128 120 20
//! ```
//!
//! `grid` is resolved relative to the scene file. Every other key has a
//! default; see [`Scene::default_for`].

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hfcast_core::cascade::Overlap;
use hfcast_core::render::DEFAULT_BACKGROUND;
use hfcast_core::{CameraView, CascadeSettings, FrameConfig, Rgb, Vec3};
use thiserror::Error;

use crate::synth::{SynthKind, DEFAULT_CELLS};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("key `{key}`: {msg}")]
    Invalid { key: &'static str, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn invalid(key: &'static str, msg: impl Into<String>) -> SceneError {
    SceneError::Invalid { key, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridSource {
    File(PathBuf),
    Synthetic(SynthKind),
}

impl fmt::Display for GridSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSource::File(p) => write!(f, "{}", p.display()),
            GridSource::Synthetic(k) => write!(f, "synth:{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub grid: GridSource,
    /// Seed and target cell count for synthetic grids.
    pub seed: u64,
    pub cells: usize,
    pub eye: Vec3,
    pub look_at: Vec3,
    pub up: Vec3,
    pub fov_y: f64,
    pub near: f64,
    pub far: f64,
    pub width: u32,
    pub height: u32,
    pub cascade_res: usize,
    pub sigma: f64,
    pub overlap: Overlap,
    pub colormap: (f64, f64),
    pub background: Rgb,
}

const KEYS: [&str; 16] = [
    "grid", "seed", "cells", "eye", "look_at", "up", "fov_y", "near", "far", "width", "height",
    "cascade_res", "sigma", "overlap", "colormap", "background",
];

fn parse_floats<const N: usize>(key: &'static str, v: &str) -> Result<[f64; N], SceneError> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() != N {
        return Err(invalid(key, format!("expected {N} numbers, found `{v}`")));
    }
    let mut out = [0.0f64; N];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| invalid(key, format!("invalid number `{p}`")))?;
        if !o.is_finite() {
            return Err(invalid(key, format!("`{p}` is not finite")));
        }
    }
    Ok(out)
}

fn parse_one<T: FromStr>(key: &'static str, v: &str) -> Result<T, SceneError> {
    v.parse().map_err(|_| invalid(key, format!("invalid value `{v}`")))
}

fn vec3(key: &'static str, v: &str) -> Result<Vec3, SceneError> {
    let [x, y, z] = parse_floats::<3>(key, v)?;
    Ok(Vec3::new(x, y, z))
}

pub fn parse_overlap(v: &str) -> Result<Overlap, String> {
    if v == "auto" {
        return Ok(Overlap::Auto);
    }
    match v.parse::<f64>() {
        Ok(m) if m >= 0.0 && m.is_finite() => Ok(Overlap::Meters(m)),
        _ => Err(format!("expected `auto` or a non-negative distance, found `{v}`")),
    }
}

impl Scene {
    /// Defaults for every optional key.
    pub fn default_for(grid: GridSource, eye: Vec3, look_at: Vec3) -> Self {
        Self {
            grid,
            seed: 42,
            cells: DEFAULT_CELLS,
            eye,
            look_at,
            up: Vec3::Z,
            fov_y: 50.0,
            near: 1.0,
            far: 5000.0,
            width: 640,
            height: 360,
            cascade_res: CascadeSettings::default().resolution,
            sigma: 1.0,
            overlap: Overlap::Auto,
            colormap: (0.0, 4.0),
            background: DEFAULT_BACKGROUND,
        }
    }

    pub fn parse(text: &str) -> Result<Self, SceneError> {
        let mut values: [Option<(usize, &str)>; KEYS.len()] = [None; KEYS.len()];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| SceneError::Syntax { line, msg: format!("expected `key = value`, found `{l}`") })?;
            let (k, v) = (k.trim(), v.trim());
            let slot = KEYS
                .iter()
                .position(|&key| key == k)
                .ok_or_else(|| SceneError::Syntax { line, msg: format!("unknown key `{k}`") })?;
            if values[slot].is_some() {
                return Err(SceneError::Syntax { line, msg: format!("duplicate key `{k}`") });
            }
            values[slot] = Some((line, v));
        }
        let get = |key: &str| values[KEYS.iter().position(|&k| k == key).unwrap()].map(|(_, v)| v);
        let required = |key: &'static str| get(key).ok_or_else(|| invalid(key, "missing"));

        let grid = match required("grid")? {
            s if s.starts_with("synth:") => {
                GridSource::Synthetic(s["synth:".len()..].parse().map_err(|e| invalid("grid", format!("{e}")))?)
            }
            "" => return Err(invalid("grid", "empty path")),
            s => GridSource::File(PathBuf::from(s)),
        };
        let mut scene = Self::default_for(grid, vec3("eye", required("eye")?)?, vec3("look_at", required("look_at")?)?);
        if let Some(v) = get("seed") {
            scene.seed = parse_one("seed", v)?;
        }
        if let Some(v) = get("cells") {
            scene.cells = parse_one("cells", v)?;
        }
        if let Some(v) = get("up") {
            scene.up = vec3("up", v)?;
        }
        if let Some(v) = get("fov_y") {
            scene.fov_y = parse_floats::<1>("fov_y", v)?[0];
        }
        if let Some(v) = get("near") {
            scene.near = parse_floats::<1>("near", v)?[0];
        }
        if let Some(v) = get("far") {
            scene.far = parse_floats::<1>("far", v)?[0];
        }
        if let Some(v) = get("width") {
            scene.width = parse_one("width", v)?;
        }
        if let Some(v) = get("height") {
            scene.height = parse_one("height", v)?;
        }
        if let Some(v) = get("cascade_res") {
            scene.cascade_res = parse_one("cascade_res", v)?;
        }
        if let Some(v) = get("sigma") {
            scene.sigma = parse_floats::<1>("sigma", v)?[0];
        }
        if let Some(v) = get("overlap") {
            scene.overlap = parse_overlap(v).map_err(|m| invalid("overlap", m))?;
        }
        if let Some(v) = get("colormap") {
            let [a, b] = parse_floats::<2>("colormap", v)?;
            scene.colormap = (a, b);
        }
        if let Some(v) = get("background") {
            let parts: Vec<&str> = v.split_whitespace().collect();
            let rgb: Vec<u8> = parts.iter().filter_map(|p| p.parse().ok()).collect();
            match rgb.as_slice() {
                &[r, g, b] if parts.len() == 3 => scene.background = [r, g, b],
                _ => return Err(invalid("background", format!("expected three values 0..255, found `{v}`"))),
            }
        }
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Self, SceneError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SceneError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Checks numeric constraints, naming the offending key.
    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.near > 0.0) {
            return Err(invalid("near", format!("must be positive, found {}", self.near)));
        }
        if !(self.far > self.near) {
            return Err(invalid("far", format!("must exceed near ({} <= {})", self.far, self.near)));
        }
        if !(self.fov_y > 0.0 && self.fov_y < 180.0) {
            return Err(invalid("fov_y", format!("must lie in (0, 180), found {}", self.fov_y)));
        }
        if self.width == 0 {
            return Err(invalid("width", "must be at least 1"));
        }
        if self.height == 0 {
            return Err(invalid("height", "must be at least 1"));
        }
        if self.cascade_res < 2 {
            return Err(invalid("cascade_res", "must be at least 2"));
        }
        if !(self.sigma > 0.0) {
            return Err(invalid("sigma", "must be positive"));
        }
        if !(self.colormap.0 < self.colormap.1) {
            return Err(invalid("colormap", "min must be below max"));
        }
        if self.cells == 0 {
            return Err(invalid("cells", "must be at least 1"));
        }
        self.camera().map(|_| ())
    }

    pub fn camera(&self) -> Result<CameraView, SceneError> {
        self.camera_at(self.eye, self.look_at)
    }

    pub fn camera_at(&self, eye: Vec3, look_at: Vec3) -> Result<CameraView, SceneError> {
        let aspect = self.width as f64 / self.height as f64;
        CameraView::look_at(eye, look_at, self.up, self.fov_y, aspect, self.near, self.far)
            .map_err(|e| invalid("eye", e.to_string()))
    }

    pub fn frame_config(&self, camera: CameraView) -> FrameConfig {
        FrameConfig::new(self.width, self.height, camera, self.colormap, self.background)
            .expect("scene was validated")
    }

    pub fn cascade_settings(&self) -> CascadeSettings {
        CascadeSettings { resolution: self.cascade_res, overlap: self.overlap }
    }

    /// Grid path resolved against the directory of the scene file.
    pub fn grid_path(&self, scene_path: &Path) -> Option<PathBuf> {
        match &self.grid {
            GridSource::File(p) if p.is_relative() => {
                Some(scene_path.parent().unwrap_or(Path::new(".")).join(p))
            }
            GridSource::File(p) => Some(p.clone()),
            GridSource::Synthetic(_) => None,
        }
    }

    /// Canonical text with every key, in a fixed order.
    pub fn serialize(&self) -> String {
        let v3 = |v: Vec3| format!("{} {} {}", v.x, v.y, v.z);
        let mut s = String::new();
        let _ = writeln!(s, "grid = {}", self.grid);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "cells = {}", self.cells);
        let _ = writeln!(s, "eye = {}", v3(self.eye));
        let _ = writeln!(s, "look_at = {}", v3(self.look_at));
        let _ = writeln!(s, "up = {}", v3(self.up));
        let _ = writeln!(s, "fov_y = {}", self.fov_y);
        let _ = writeln!(s, "near = {}", self.near);
        let _ = writeln!(s, "far = {}", self.far);
        let _ = writeln!(s, "width = {}", self.width);
        let _ = writeln!(s, "height = {}", self.height);
        let _ = writeln!(s, "cascade_res = {}", self.cascade_res);
        let _ = writeln!(s, "sigma = {}", self.sigma);
        match self.overlap {
            Overlap::Auto => s.push_str("overlap = auto\n"),
            Overlap::Meters(m) => {
                let _ = writeln!(s, "overlap = {m}");
            }
        }
        let _ = writeln!(s, "colormap = {} {}", self.colormap.0, self.colormap.1);
        let [r, g, b] = self.background;
        let _ = writeln!(s, "background = {r} {g} {b}");
        s
    }
}

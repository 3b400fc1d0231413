//! Command-line front end. [`run`] returns the process exit code.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hfcast_core::cascade::Overlap;
use hfcast_core::rbf::weight;
use hfcast_core::{AdaptiveGrid, CascadeSet, Layer, RbfParams, Vec2, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ahf::{load_ahf, save_ahf};
use crate::image::{raster_to_gray16, write_pgm16, write_ppm};
use crate::pipeline::{Pipeline, TimedFrame};
use crate::scene::{parse_overlap, GridSource, Scene};
use crate::synth::{generate, SynthKind, DEFAULT_CELLS};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_NOTHING_VISIBLE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "hfcast", version, about = "Cascaded ray casting of adaptive heightfields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render one frame of a scene to a binary PPM.
    Render {
        scene: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        opts: RenderOpts,
        /// Write each cascade polygon and widened box as `k x y` vertex lines.
        #[arg(long, value_name = "PATH")]
        dump_cascades: Option<PathBuf>,
        /// Write the terrain layer of cascade K (1-3) as a 16-bit PGM.
        #[arg(long, num_args = 2, value_names = ["K", "PATH"])]
        dump_raster: Option<Vec<String>>,
    },
    /// Render a camera path and print per-frame pass timings as CSV.
    Benchmark {
        scene: PathBuf,
        #[arg(long, default_value_t = 10)]
        frames: usize,
        /// End pose `ex,ey,ez,lx,ly,lz`; the path interpolates eye and look-at linearly.
        #[arg(long, value_parser = parse_pose)]
        pose2: Option<(Vec3, Vec3)>,
        #[command(flatten)]
        opts: RenderOpts,
    },
    /// Check grid invariants and the influence table of an AHF file.
    Validate { grid: PathBuf },
    /// Write a seeded synthetic grid (flat, ramp, hill or pond).
    Synth {
        kind: SynthKind,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CELLS)]
        cells: usize,
    },
}

/// Overrides applied on top of the scene file.
#[derive(Debug, Clone, Default, Args)]
pub struct RenderOpts {
    #[arg(long, value_name = "N")]
    pub cascade_res: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Overlap between cascades in meters, or `auto`.
    #[arg(long, value_parser = parse_overlap)]
    pub overlap: Option<Overlap>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

fn parse_pose(s: &str) -> Result<(Vec3, Vec3), String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("invalid number `{p}`")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        &[ex, ey, ez, lx, ly, lz] => Ok((Vec3::new(ex, ey, ez), Vec3::new(lx, ly, lz))),
        _ => Err(format!("expected 6 comma-separated numbers, found {}", v.len())),
    }
}

struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_INVALID, e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure(EXIT_INVALID, format!("{}: {e}", path.display()))
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Render { scene, output, opts, dump_cascades, dump_raster } => {
            cmd_render(&scene, &output, &opts, dump_cascades.as_deref(), dump_raster.as_deref(), out)
        }
        Command::Benchmark { scene, frames, pose2, opts } => cmd_benchmark(&scene, frames, pose2, &opts, out),
        Command::Validate { grid } => cmd_validate(&grid, out),
        Command::Synth { kind, seed, output, cells } => cmd_synth(kind, seed, cells, &output, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

/// Scene with command-line overrides applied, its grid and influence table.
pub struct LoadedScene {
    pub scene: Scene,
    pub grid: AdaptiveGrid,
    pub table: hfcast_core::InfluenceTable,
    pub params: RbfParams,
}

pub fn load_scene(path: &Path, opts: &RenderOpts) -> Result<LoadedScene, String> {
    let mut scene = Scene::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(r) = opts.cascade_res {
        scene.cascade_res = r;
    }
    if let Some(s) = opts.sigma {
        scene.sigma = s;
    }
    if let Some(o) = opts.overlap {
        scene.overlap = o;
    }
    scene.validate().map_err(|e| format!("{}: {e}", path.display()))?;
    let grid = match &scene.grid {
        GridSource::Synthetic(kind) => generate(*kind, scene.seed, scene.cells),
        GridSource::File(_) => {
            let p = scene.grid_path(path).expect("file source");
            load_ahf(&p, true).map_err(|e| format!("{}: {e}", p.display()))?
        }
    };
    let table = grid.build_influence_table(scene.sigma);
    let params = RbfParams::new(scene.sigma);
    Ok(LoadedScene { scene, grid, table, params })
}

fn print_timings(out: &mut dyn Write, t: &TimedFrame) -> std::io::Result<()> {
    writeln!(out, "approximation_ms={:.3}", t.approximation_ms)?;
    writeln!(out, "raycast_ms={:.3}", t.raycast_ms)?;
    writeln!(out, "visible_texels={}", t.visible_texels)?;
    writeln!(out, "rays_hit={}", t.frame.rays_hit)
}

fn write_pgm_file(path: &Path, raster: &hfcast_core::CascadeRaster, layer: Layer, range: (f64, f64)) -> Result<(), Failure> {
    let res = raster.resolution();
    let f = File::create(path).map_err(|e| io_error(path, e))?;
    write_pgm16(BufWriter::new(f), res, res, &raster_to_gray16(raster, layer, range)).map_err(|e| io_error(path, e))
}

fn cmd_render(
    scene_path: &Path,
    output: &Path,
    opts: &RenderOpts,
    dump_cascades: Option<&Path>,
    dump_raster: Option<&[String]>,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    let dump_raster = match dump_raster {
        Some([k, p]) => match k.parse::<usize>() {
            Ok(k @ 1..=3) => Some((k, PathBuf::from(p))),
            _ => return Err(Failure(EXIT_INVALID, format!("--dump-raster: cascade `{k}` must be 1, 2 or 3"))),
        },
        _ => None,
    };
    let s = load_scene(scene_path, opts).map_err(|m| Failure(EXIT_INVALID, m))?;
    let pipeline = Pipeline::new(opts.threads)?;
    let config = s.scene.frame_config(s.scene.camera()?);
    let timed = pipeline.render(&config, &s.grid, &s.table, &s.params, &s.scene.cascade_settings());

    let f = File::create(output).map_err(|e| io_error(output, e))?;
    write_ppm(BufWriter::new(f), &timed.frame).map_err(|e| io_error(output, e))?;
    print_timings(out, &timed)?;

    let Some(prepared) = &timed.prepared else {
        return Err(Failure(EXIT_NOTHING_VISIBLE, "nothing visible: wrote a background frame".into()));
    };
    let range = s.grid.height_range();
    if let Some(path) = dump_cascades {
        std::fs::write(path, cascade_table(&prepared.set)).map_err(|e| io_error(path, e))?;
    }
    if let Some((k, path)) = dump_raster {
        match &prepared.cascades[k - 1] {
            Some(c) => write_pgm_file(&path, &c.raster, Layer::Terrain, range)?,
            None => return Err(Failure(EXIT_INVALID, format!("cascade {k} is empty for this view"))),
        }
    }
    Ok(EXIT_OK)
}

/// Polygon vertices, then widened-box corners, of every non-empty cascade.
pub fn cascade_table(set: &CascadeSet) -> String {
    let mut s = String::new();
    for l in set.layouts.iter().flatten() {
        let k = l.index;
        s.push_str(&format!("# cascade {k} polygon\n"));
        for v in &l.polygon.vertices {
            s.push_str(&format!("{k} {} {}\n", v.x, v.y));
        }
        s.push_str(&format!("# cascade {k} box\n"));
        for v in l.bounds.corners() {
            s.push_str(&format!("{k} {} {}\n", v.x, v.y));
        }
    }
    s
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn cmd_benchmark(
    scene_path: &Path,
    frames: usize,
    pose2: Option<(Vec3, Vec3)>,
    opts: &RenderOpts,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    if frames == 0 {
        return Err(Failure(EXIT_INVALID, "--frames must be at least 1".into()));
    }
    let s = load_scene(scene_path, opts).map_err(|m| Failure(EXIT_INVALID, m))?;
    let (eye0, look0) = (s.scene.eye, s.scene.look_at);
    let (eye1, look1) = pose2.unwrap_or((eye0, look0));
    let cameras = (0..frames)
        .map(|i| {
            let w = if frames > 1 { i as f64 / (frames - 1) as f64 } else { 0.0 };
            s.scene.camera_at(eye0.lerp(eye1, w), look0.lerp(look1, w))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let pipeline = Pipeline::new(opts.threads)?;
    let settings = s.scene.cascade_settings();

    writeln!(out, "frame,approximation_ms,raycast_ms,visible_texels,rays_hit")?;
    let mut cols: [Vec<f64>; 4] = Default::default();
    let mut blind = false;
    for (i, cam) in cameras.into_iter().enumerate() {
        let t = pipeline.render(&s.scene.frame_config(cam), &s.grid, &s.table, &s.params, &settings);
        blind |= t.nothing_visible();
        writeln!(
            out,
            "{i},{:.3},{:.3},{},{}",
            t.approximation_ms, t.raycast_ms, t.visible_texels, t.frame.rays_hit
        )?;
        for (c, v) in cols.iter_mut().zip([
            t.approximation_ms,
            t.raycast_ms,
            t.visible_texels as f64,
            t.frame.rays_hit as f64,
        ]) {
            c.push(v);
        }
    }
    let [a, r, v, h] = cols.each_ref().map(|c| median(c));
    writeln!(out, "median,{a:.3},{r:.3},{v},{h}")?;
    if blind {
        return Err(Failure(EXIT_NOTHING_VISIBLE, "nothing visible in at least one frame".into()));
    }
    Ok(EXIT_OK)
}

/// Brute-force influence check on a subsample of cells and points.
fn influence_oracle(grid: &AdaptiveGrid) -> Result<(usize, usize), String> {
    let table = grid.build_influence_table(1.0);
    let params = RbfParams::default();
    let cells = grid.cells();
    let stride = (cells.len() / 64).max(1);
    let mut checked_cells = 0;
    for a in (0..cells.len()).step_by(stride) {
        let sq = cells[a].square();
        let expected: Vec<u32> = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                let r = params.radius(c.size);
                sq.distance_squared(c.center) <= r * r
            })
            .map(|(i, _)| i as u32)
            .collect();
        if table.list(a) != expected.as_slice() {
            return Err(format!("influence list of cell {a} differs from brute force"));
        }
        checked_cells += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let d = grid.domain();
    let mut points = 0;
    for _ in 0..4096 {
        if points == 256 {
            break;
        }
        let p = Vec2::new(rng.gen_range(d.min.x..d.max.x), rng.gen_range(d.min.y..d.max.y));
        let Ok(list) = grid.influencers_at(&table, p) else { continue };
        for (i, c) in cells.iter().enumerate() {
            if weight(c.center, c.size, p, &params) > 0.0 && list.binary_search(&(i as u32)).is_err() {
                return Err(format!("cell {i} influences {p:?} but is missing from its list"));
            }
        }
        points += 1;
    }
    Ok((checked_cells, points))
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<u8, Failure> {
    let grid = match load_ahf(path, true) {
        Ok(g) => g,
        Err(e) => {
            writeln!(out, "fail  grid invariants: {e}")?;
            return Err(Failure(EXIT_INVALID, format!("{}: {e}", path.display())));
        }
    };
    let (lo, hi) = grid.height_range();
    let plural = if grid.len() == 1 { "" } else { "s" };
    writeln!(out, "pass  grid invariants: {} cell{plural}, heights {lo} to {hi}", grid.len())?;
    match influence_oracle(&grid) {
        Ok((c, p)) => {
            writeln!(out, "pass  influence table: {c} cell lists and {p} points match brute force")?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(out, "fail  influence table: {e}")?;
            Err(Failure(EXIT_INVALID, e))
        }
    }
}

fn cmd_synth(kind: SynthKind, seed: u64, cells: usize, output: &Path, out: &mut dyn Write) -> Result<u8, Failure> {
    if cells == 0 {
        return Err(Failure(EXIT_INVALID, "--cells must be at least 1".into()));
    }
    let grid = generate(kind, seed, cells);
    save_ahf(&grid, output)?;
    let d = grid.domain();
    writeln!(out, "wrote {} cells over {} x {} m to {}", grid.len(), d.width(), d.height(), output.display())?;
    Ok(EXIT_OK)
}

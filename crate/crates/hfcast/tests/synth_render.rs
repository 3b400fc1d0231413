use hfcast::pipeline::Pipeline;
use hfcast::synth::{generate, SynthKind, BASE_HEIGHT, RAMP_SLOPE};
use hfcast_core::rbf::approximate;
use hfcast_core::render::Shader;
use hfcast_core::{CameraView, CascadeSettings, FrameConfig, Layer, PixelSample, Ray, RbfParams, Vec3};

fn ramp_camera(edge: f64) -> CameraView {
    CameraView::look_at(
        Vec3::new(0.5 * edge, -0.2 * edge, 80.0),
        Vec3::new(0.5 * edge, 0.5 * edge, 30.0),
        Vec3::Z,
        60.0,
        1.0,
        0.5,
        1000.0,
    )
    .unwrap()
}

#[test]
fn ramp_is_reproduced_in_the_interior() {
    let grid = generate(SynthKind::Ramp, 3, 2000);
    let params = RbfParams::default();
    let table = grid.build_influence_table(params.sigma());
    let d = grid.domain();
    let span = RAMP_SLOPE * d.width();
    let margin = 16.0;
    let settings = CascadeSettings { resolution: 256, ..Default::default() };
    let (_, rasters) =
        Pipeline::new(1).unwrap().approximate(&ramp_camera(d.width()), &grid, &table, &params, &settings).unwrap();
    let (mut checked, mut worst) = (0, 0.0f64);
    for r in rasters.iter().flatten() {
        for iy in 0..r.resolution() {
            for ix in 0..r.resolution() {
                let p = r.layout.texel_center(ix, iy);
                let interior = p.x > d.min.x + margin
                    && p.x < d.max.x - margin
                    && p.y > d.min.y + margin
                    && p.y < d.max.y - margin;
                if !r.is_valid(ix, iy) || !interior {
                    continue;
                }
                let err = (r.height(Layer::Terrain, ix, iy) - (BASE_HEIGHT + RAMP_SLOPE * p.x)).abs();
                worst = worst.max(err);
                checked += 1;
            }
        }
    }
    assert!(checked > 10_000, "{checked}");
    assert!(worst <= 0.05 * span, "worst error {worst} m over a {span} m span");
}

#[test]
fn hill_generation_is_deterministic() {
    let a = generate(SynthKind::Hill, 42, 5000);
    let b = generate(SynthKind::Hill, 42, 5000);
    assert_eq!(a.cells(), b.cells());
    assert_ne!(a.cells(), generate(SynthKind::Hill, 43, 5000).cells());
}

/// First crossing of the ray below the approximated surface, by marching
/// and bisection on the continuous field.
fn march(ray: &Ray, grid: &hfcast_core::AdaptiveGrid, table: &hfcast_core::InfluenceTable) -> Option<f64> {
    let params = RbfParams::default();
    let above = |t: f64| -> Option<bool> {
        let p = ray.at(t);
        approximate(p.xy(), Layer::Terrain, grid, table, &params).ok().map(|s| p.z > s.value)
    };
    let step = 0.01;
    let mut t = 0.0;
    let mut inside = false;
    while t < 2000.0 {
        let next = t + step;
        match (above(t), above(next)) {
            (Some(true), Some(false)) => {
                let (mut lo, mut hi) = (t, next);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if above(mid) == Some(true) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
            (Some(_), _) => inside = true,
            (None, _) if inside => return None,
            _ => {}
        }
        t = next;
    }
    None
}

#[test]
fn single_pixel_matches_a_marched_ray() {
    let grid = generate(SynthKind::Ramp, 9, 2000);
    let params = RbfParams::default();
    let table = grid.build_influence_table(params.sigma());
    let cam = ramp_camera(grid.domain().width());
    let config = FrameConfig::new(1, 1, cam, (0.0, 1.0), [0, 0, 0]).unwrap();
    let settings = CascadeSettings { resolution: 512, ..Default::default() };
    let timed = Pipeline::new(1).unwrap().render(&config, &grid, &table, &params, &settings);
    assert_eq!(timed.frame.rays_hit, 1);

    let ray = config.pixel_ray(0, 0);
    let prepared = timed.prepared.as_ref().unwrap();
    let sample = prepared.trace(&ray);
    let PixelSample::Terrain(hit) = sample else { panic!("{sample:?}") };
    let t = march(&ray, &grid, &table).expect("marched ray hits");
    let gap = (hit.world_pos - ray.at(t)).length();
    assert!(gap < 0.05, "cast hit {:?} vs marched {:?} ({gap} m)", hit.world_pos, ray.at(t));
    assert_eq!(timed.frame.pixel(0, 0), Shader::new(&config, &grid).shade(&sample));
}

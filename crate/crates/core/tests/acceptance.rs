//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Correctness criteria fail the run. Latency criteria depend on the host
//! and only fail it when `LIDOMAUG_STRICT_PERF=1`.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lidomaug::distortion::{distort, resample_columns, DistortOptions, MotionParams};
use lidomaug::mixer::{mix, sample_sectors, Sector};
use lidomaug::render::{render_posed, render_winners, RangeMap, RenderOptions};
use lidomaug::sampling::stream;
use lidomaug::synth::{scene, SceneParams};
use lidomaug::world::{
    accumulate_dynamic, aggregate_static, select_adjacent, vote_and_propagate, BoxTrack, LabeledFrame,
    OrientedBox, TrackObservation, VOXEL_SIZE,
};
use lidomaug::{augment, AugmentSpec, LidarConfig, PointCloud, Pose, Preset, WorldModel};

// Tolerances, pinned.
const ROUND_TRIP_SLACK: f64 = 1e-9;
const RIGID_TOL: f64 = 1e-9;
const DISPLACEMENT_TOL: f64 = 1e-6;
const PARTITION_TOL: f64 = 1e-12;
const SINGLE_THREAD_BUDGET_MS: f64 = 25.0;
const EIGHT_WORKER_BUDGET_MS: f64 = 10.0;
const REFERENCE_FPS: f64 = 330.0;

type Outcome = Result<String, String>;

struct Report {
    failed_gating: usize,
    failed_perf: usize,
}

impl Report {
    fn line(&mut self, name: &str, gating: bool, started: Instant, outcome: Outcome) {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name:<28} {detail} ({secs:.2}s)"),
            Err(detail) => {
                println!("FAIL  {name:<28} {detail} ({secs:.2}s)");
                if gating {
                    self.failed_gating += 1;
                } else {
                    self.failed_perf += 1;
                }
            }
        }
    }
}

fn main() {
    let mut r = Report {
        failed_gating: 0,
        failed_perf: 0,
    };
    let checks: [(&str, fn() -> Outcome); 8] = [
        ("projection_round_trip", projection_round_trip),
        ("zbuffer_oracle", zbuffer_oracle),
        ("adjacency_oracle", adjacency_oracle),
        ("dynamic_collapse", dynamic_collapse),
        ("label_vote_oracle", label_vote_oracle),
        ("distortion", distortion),
        ("mix_provenance", mix_provenance),
        ("cli_determinism", cli_determinism),
    ];
    for (name, f) in checks {
        let t = Instant::now();
        r.line(name, true, t, f());
    }
    let t = Instant::now();
    let (single, eight) = throughput();
    r.line("throughput_single_thread", false, t, single);
    r.line("throughput_eight_workers", false, Instant::now(), eight);

    println!(
        "summary: {} correctness failure(s), {} latency failure(s)",
        r.failed_gating, r.failed_perf
    );
    let strict = std::env::var("LIDOMAUG_STRICT_PERF").is_ok_and(|v| v == "1");
    if r.failed_gating > 0 || (strict && r.failed_perf > 0) {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// Cylindrical projection written out independently of the library.
struct Oracle {
    h: f64,
    w: f64,
    f_up: f64,
    f_down: f64,
    max_range: f64,
}

impl Oracle {
    fn new(c: &LidarConfig) -> Self {
        Oracle {
            h: c.channels() as f64,
            w: c.width() as f64,
            f_up: c.f_up(),
            f_down: c.f_down(),
            max_range: c.max_range(),
        }
    }

    fn fov(&self) -> f64 {
        self.f_up.abs() + self.f_down.abs()
    }

    /// (pixel index, stored range) or None.
    fn pixel(&self, x: f64, y: f64, z: f64) -> Option<(usize, f32)> {
        let r = (x * x + y * y + z * z).sqrt();
        let rf = r as f32;
        if !(rf > 0.0 && rf as f64 <= self.max_range) {
            return None;
        }
        let u = 0.5 * (1.0 - y.atan2(x) / PI) * self.w;
        let v = (1.0 - ((z / r).asin() - self.f_down) / self.fov()) * self.h;
        if !(v >= 0.0 && v < self.h) {
            return None;
        }
        let col = (u.floor() as i64).rem_euclid(self.w as i64) as usize;
        Some((v as usize * self.w as usize + col, rf))
    }

    fn center_direction(&self, col: usize, row: usize) -> Vector3<f64> {
        let az = PI * (1.0 - 2.0 * (col as f64 + 0.5) / self.w);
        let el = self.f_up - (row as f64 + 0.5) / self.h * self.fov();
        Vector3::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin())
    }
}

fn projection_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let started = Instant::now();
    let mut checked = 0;
    for preset in Preset::ALL {
        let cfg = preset.config();
        let o = Oracle::new(&cfg);
        for _ in 0..10_000 {
            let az = rng.gen_range(-PI..PI);
            let el = rng.gen_range(cfg.f_down()..cfg.f_up());
            let r = rng.gen_range(0.5..cfg.max_range());
            let p = Vector3::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin()) * r;
            let proj = cfg.project(&p).map_err(|e| e.to_string())?;
            let (col, row) = cfg
                .pixel(proj.u, proj.v)
                .ok_or_else(|| format!("{}: in-FOV point {p:?} has no pixel", preset.name()))?;
            let back = cfg
                .back_project(col as f64 + 0.5, row as f64 + 0.5, proj.r)
                .map_err(|e| e.to_string())?;
            let expected_pixel = o.pixel(p.x, p.y, p.z).map(|(i, _)| i);
            ensure(expected_pixel == Some(row as usize * cfg.width() as usize + col as usize), || {
                format!("{}: pixel of {p:?} disagrees with the oracle", preset.name())
            })?;
            let oracle_back = o.center_direction(col as usize, row as usize) * proj.r;
            ensure((back - oracle_back).norm() <= ROUND_TRIP_SLACK * r, || {
                format!("{}: back-projection disagrees with the oracle", preset.name())
            })?;
            let err = (back - p).norm();
            let bound = r * (TAU / o.w + o.fov() / o.h);
            ensure(err <= bound + ROUND_TRIP_SLACK, || {
                format!("{}: error {err:e} > bound {bound:e} at {p:?}", preset.name())
            })?;
            checked += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}, budget 1 s"))?;
    Ok(format!("{checked} points, 5 presets, error <= r(2pi/W + f/H), {elapsed:.0?}"))
}

fn random_config(rng: &mut ChaCha8Rng) -> LidarConfig {
    LidarConfig::new(
        rng.gen_range(1..=32),
        rng.gen_range(1..=512),
        rng.gen_range(0.0..0.6),
        rng.gen_range(-0.8..-0.01),
        rng.gen_range(5.0..60.0),
        10.0,
    )
    .expect("valid random config")
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize) -> PointCloud {
    let mut c = PointCloud::with_capacity(n);
    while c.len() < n {
        let k = c.len();
        if k > 10 && rng.gen_bool(0.1) {
            // exact duplicate of an earlier point, possibly from another source
            let j = rng.gen_range(0..k);
            let p = c.point(j);
            c.push(p, rng.gen(), rng.gen_range(0..30), rng.gen_range(0..4));
            continue;
        }
        let p = Vector3::new(rng.gen_range(-40.0..40.0), rng.gen_range(-40.0..40.0), rng.gen_range(-8.0..8.0));
        c.push(p, rng.gen(), rng.gen_range(0..30), rng.gen_range(0..4));
    }
    c
}

fn zbuffer_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let started = Instant::now();
    let mut pixels = 0;
    for case in 0..100 {
        let cfg = random_config(&mut rng);
        let n = rng.gen_range(1..=5000);
        let world = WorldModel::from_cloud(random_cloud(&mut rng, n)).map_err(|e| e.to_string())?;
        let pose = if case % 2 == 0 {
            Pose::identity()
        } else {
            Pose::from_yaw(rng.gen_range(-PI..PI), Vector3::new(rng.gen_range(-2.0..2.0), rng.gen(), 0.3))
        };
        let o = Oracle::new(&cfg);
        let c = world.cloud();
        // brute force: nearest stored range per pixel, ties to the lower world index
        let mut best: Vec<Option<(f32, u32)>> = vec![None; cfg.pixel_count()];
        for i in 0..c.len() {
            let [x, y, z] = pose.apply_xyz(c.xs()[i], c.ys()[i], c.zs()[i]);
            if let Some((pix, rf)) = o.pixel(x, y, z) {
                let cand = (rf, i as u32);
                best[pix] = Some(match best[pix] {
                    Some(b) if (b.0, b.1) <= cand => b,
                    _ => cand,
                });
            }
        }
        let options = RenderOptions { threads: 1 + case % 3 };
        let map = render_posed(&world, &pose, &cfg, options);
        let winners = render_winners(&world, &pose, &cfg, options);
        for (pix, b) in best.iter().enumerate() {
            let got = winners[pix];
            ensure(got == b.map(|b| b.1), || {
                format!("case {case} {cfg}: pixel {pix} winner {got:?}, expected {:?}", b.map(|b| b.1))
            })?;
            match b {
                Some((rf, i)) => {
                    ensure(map.ranges()[pix].to_bits() == rf.to_bits(), || {
                        format!("case {case}: pixel {pix} range {} != {rf}", map.ranges()[pix])
                    })?;
                    ensure(map.labels()[pix] == c.labels()[*i as usize], || format!("case {case}: label"))?;
                    pixels += 1;
                }
                None => ensure(!map.valid_mask()[pix], || format!("case {case}: pixel {pix} should be empty"))?,
            }
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}, budget 30 s"))?;
    Ok(format!("100 clouds, {pixels} filled pixels bit-identical, ties to lower index"))
}

fn random_pose(rng: &mut ChaCha8Rng, spread: f64) -> Pose {
    let axis = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let rot = nalgebra::Rotation3::from_scaled_axis(axis.normalize() * rng.gen_range(-PI..PI));
    let t = Vector3::new(
        rng.gen_range(-spread..spread),
        rng.gen_range(-spread..spread),
        rng.gen_range(-spread..spread) * 0.1,
    );
    Pose::new(*rot.matrix(), t).expect("rotation")
}

fn adjacency_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let len = rng.gen_range(1..=12);
        let poses: Vec<Pose> = (0..len).map(|_| random_pose(&mut rng, 20.0)).collect();
        let t = rng.gen_range(0..len);
        let n = rng.gen_range(1..=len);
        let got = select_adjacent(&poses, t, n).map_err(|e| e.to_string())?;

        // exhaustive: minimum over all N-subsets of summed center distances
        let c = |i: usize| poses[i].rotation().transpose() * poses[i].translation();
        let d: Vec<f64> = (0..len).map(|i| (c(i) - c(t)).norm()).collect();
        let mut best = f64::INFINITY;
        let mut best_set = 0u32;
        for mask in 0u32..(1 << len) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let s: f64 = (0..len).filter(|i| mask >> i & 1 == 1).map(|i| d[i]).sum();
            if s < best {
                best = s;
                best_set = mask;
            }
        }
        let want: Vec<isize> = (0..len)
            .filter(|i| best_set >> i & 1 == 1)
            .map(|i| i as isize - t as isize)
            .collect();
        ensure(got == want, || format!("case {case}: got {got:?}, exhaustive {want:?}"))?;

        // aggregation is unchanged when every pose is moved by the same rigid G
        let frames: Vec<LabeledFrame> = poses
            .iter()
            .enumerate()
            .map(|(i, p)| LabeledFrame::new(random_cloud(&mut rng, 20), *p, i as u32))
            .collect();
        let g = random_pose(&mut rng, 100.0);
        let moved: Vec<LabeledFrame> = frames
            .iter()
            .map(|f| LabeledFrame::new(f.cloud.clone(), g.compose(&f.pose), f.time_index))
            .collect();
        let a = aggregate_static(&frames, t, &got).map_err(|e| e.to_string())?;
        let b = aggregate_static(&moved, t, &got).map_err(|e| e.to_string())?;
        ensure(a.len() == b.len(), || format!("case {case}: sizes differ"))?;
        for i in 0..a.len() {
            worst = worst.max((a.cloud().point(i) - b.cloud().point(i)).norm());
        }
        ensure(worst <= RIGID_TOL, || format!("case {case}: G moved the world by {worst:e}"))?;
    }
    Ok(format!("200 sequences match exhaustive search; G-invariance max deviation {worst:.1e} <= 1e-9"))
}

fn dynamic_collapse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let size = Vector3::new(4.2, 1.8, 1.5);
    let local: Vec<Vector3<f64>> = (0..300)
        .map(|_| {
            Vector3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-0.85..0.85),
                rng.gen_range(-0.7..0.7),
            )
        })
        .collect();
    let start = Pose::from_yaw(0.4, Vector3::new(12.0, 3.0, 0.8));
    let steps = 12;
    let mut object = start;
    let mut frames = Vec::new();
    let mut observations = Vec::new();
    for n in 0..steps {
        let motion = if n == 0 {
            Pose::identity()
        } else {
            Pose::from_yaw(rng.gen_range(-0.08..0.08), Vector3::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.3..0.3), 0.0))
        };
        // motion acts in world coordinates: object ← motion ∘ object
        object = motion.compose(&object);
        let sensor = Pose::from_yaw(0.02 * n as f64, Vector3::new(0.8 * n as f64, -0.1 * n as f64, 1.7));
        let to_sensor = sensor.inverse();
        let mut cloud = PointCloud::new();
        for p in &local {
            cloud.push(to_sensor.apply(&object.apply(p)), 0.5, 10, n);
        }
        // background outside the box
        for _ in 0..100 {
            let p = Vector3::new(rng.gen_range(-60.0..-20.0), rng.gen_range(-30.0..30.0), 0.0);
            cloud.push(to_sensor.apply(&p), 0.1, 40, n);
        }
        frames.push(LabeledFrame::new(cloud, sensor, n));
        let yaw = object.rotation()[(1, 0)].atan2(object.rotation()[(0, 0)]);
        let bbox = OrientedBox::new(*object.translation(), size * 1.05, yaw).map_err(|e| e.to_string())?;
        observations.push(TrackObservation { time_index: n, bbox, motion });
    }
    let track = BoxTrack::new(1, observations).map_err(|e| e.to_string())?;
    let acc = accumulate_dynamic(&frames, &track).map_err(|e| e.to_string())?;
    ensure(acc.len() == local.len() * steps as usize, || {
        format!("{} accumulated points, expected {}", acc.len(), local.len() * steps as usize)
    })?;
    let mut worst: f64 = 0.0;
    for (k, p) in acc.points().enumerate() {
        let want = start.apply(&local[k % local.len()]);
        worst = worst.max((p - want).norm());
    }
    ensure(worst <= RIGID_TOL, || format!("points spread by {worst:e}"))?;
    Ok(format!("{steps} frames x {} points collapse, max spread {worst:.1e} <= 1e-9", local.len()))
}

// Majority over labeled members; ties to the smaller class id.
fn brute_vote(labels: &[u16]) -> u16 {
    let mut counts: HashMap<u16, usize> = HashMap::new();
    for &l in labels.iter().filter(|&&l| l != 0) {
        *counts.entry(l).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map_or(0, |(l, _)| l)
}

fn label_vote_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut voxels_seen = 0;
    for case in 0..100 {
        let mut cloud = PointCloud::new();
        let cells = rng.gen_range(1..40);
        for _ in 0..rng.gen_range(1..600) {
            let cell = Vector3::new(
                rng.gen_range(0..cells) as f64,
                rng.gen_range(-2..2) as f64,
                rng.gen_range(0..2) as f64,
            );
            let off = Vector3::new(rng.gen(), rng.gen(), rng.gen()) * (VOXEL_SIZE * 0.98) + Vector3::repeat(0.001);
            let label = if rng.gen_bool(0.2) { 0 } else { rng.gen_range(1..5) };
            cloud.push(cell * VOXEL_SIZE + off, 0.0, label, 0);
        }
        let queries: PointCloud = {
            let mut q = PointCloud::new();
            for _ in 0..200 {
                let p = Vector3::new(
                    rng.gen_range(-0.1..cells as f64 * VOXEL_SIZE + 0.1),
                    rng.gen_range(-0.3..0.3),
                    rng.gen_range(-0.1..0.3),
                );
                q.push(p, 0.0, 0, 0);
            }
            q
        };
        let world = WorldModel::from_cloud(cloud).map_err(|e| e.to_string())?;
        let out = vote_and_propagate(&world, &queries).map_err(|e| e.to_string())?;

        let key = |p: Vector3<f64>| {
            (
                (p.x / VOXEL_SIZE).floor() as i64,
                (p.y / VOXEL_SIZE).floor() as i64,
                (p.z / VOXEL_SIZE).floor() as i64,
            )
        };
        let wc = world.cloud();
        let mut groups: HashMap<(i64, i64, i64), Vec<u16>> = HashMap::new();
        for i in 0..wc.len() {
            groups.entry(key(wc.point(i))).or_default().push(wc.labels()[i]);
        }
        voxels_seen += groups.len();
        let modal: HashMap<_, u16> = groups.iter().map(|(k, v)| (*k, brute_vote(v))).collect();
        for i in 0..wc.len() {
            let m = modal[&key(wc.point(i))];
            let want = if m == 0 { wc.labels()[i] } else { m };
            ensure(out.world.cloud().labels()[i] == want, || format!("case {case}: point {i} label"))?;
        }
        for i in 0..queries.len() {
            let want = modal.get(&key(queries.point(i))).copied().unwrap_or(0);
            ensure(out.propagated[i] == want, || format!("case {case}: query {i} propagated label"))?;
        }
        let again = vote_and_propagate(&out.world, &queries).map_err(|e| e.to_string())?;
        ensure(again.world.cloud().labels() == out.world.cloud().labels(), || {
            format!("case {case}: second vote changed labels")
        })?;
        ensure(again.propagated == out.propagated, || format!("case {case}: propagation not idempotent"))?;
    }
    Ok(format!("100 populations, {voxels_seen} voxels match brute force; idempotent"))
}

fn distortion() -> Outcome {
    let world = scene(&SceneParams { target_points: 200_000, seed: 6 });
    let cfg = Preset::V64.config();
    let map = render_posed(&world, &Pose::identity(), &cfg, RenderOptions::default());
    let still = MotionParams::stationary(cfg.spin_omega()).map_err(|e| e.to_string())?;
    let same = distort(&map, &still, DistortOptions::default());
    let bits = |m: &RangeMap| m.ranges().iter().map(|r| r.to_bits()).collect::<Vec<_>>();
    ensure(same == map && bits(&same) == bits(&map), || "V=0, w=0 changed the map".into())?;

    let fast = MotionParams::from_kmh(72.0, 0.0, Preset::V64.config().spin_omega()).map_err(|e| e.to_string())?;
    let full = fast.displacement(TAU);
    ensure((full - 1.0).abs() <= DISPLACEMENT_TOL, || format!("full-scan displacement {full} m"))?;
    let full_cols = fast.displacement_at(cfg.width() as f64, cfg.width());
    ensure((full_cols - 1.0).abs() <= DISPLACEMENT_TOL, || format!("full-width displacement {full_cols} m"))?;

    let spin = MotionParams::new(0.0, cfg.spin_omega(), cfg.spin_omega()).map_err(|e| e.to_string())?;
    ensure(spin.column_scale() == 2.0, || format!("scale {}", spin.column_scale()))?;
    let doubled = resample_columns(&map, spin.column_scale());
    let via_distort = distort(&map, &spin, DistortOptions::default());
    ensure(doubled == via_distort, || "distort differs from column resampling".into())?;
    let w = map.width();
    for row in 0..map.height() {
        for u in 0..w.div_ceil(2) {
            ensure(doubled.get(2 * u, row) == map.get(u, row), || format!("column {u} did not move to {}", 2 * u))?;
        }
        for u in (1..w).step_by(2) {
            ensure(doubled.get(u, row).is_none(), || format!("odd column {u} should be empty"))?;
        }
    }
    Ok(format!(
        "identity bit-exact; 72 km/h @ 20 Hz -> {full:.9} m (tol 1e-6); w=w0 maps u -> 2u exactly"
    ))
}

fn mix_provenance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let cfg = random_config(&mut rng);
        let n = rng.gen_range(1..=5);
        let maps: Vec<RangeMap> = (0..n)
            .map(|k| {
                let mut m = RangeMap::empty(cfg);
                for i in 0..cfg.pixel_count() {
                    if rng.gen_bool(0.7) {
                        let px = lidomaug::render::Pixel {
                            range: rng.gen_range(0.5..cfg.max_range() as f32),
                            label: rng.gen_range(1..30),
                            intensity: rng.gen(),
                            source: k as u32,
                        };
                        m.set_index(i, px);
                    }
                }
                m
            })
            .collect();
        let sectors = sample_sectors(&mut stream(case, 2), n).map_err(|e| e.to_string())?;
        let total: f64 = sectors.iter().map(Sector::width).sum();
        worst = worst.max((total - TAU).abs());
        ensure(sectors[0].start == 0.0 && sectors[n - 1].end == TAU, || format!("case {case}: arcs do not span [0, 2pi)"))?;
        for w in sectors.windows(2) {
            ensure(w[0].end == w[1].start, || format!("case {case}: gap or overlap between arcs"))?;
        }
        ensure((total - TAU).abs() <= PARTITION_TOL, || format!("case {case}: arcs sum to {total}"))?;
        let refs: Vec<&RangeMap> = maps.iter().collect();
        let out = mix(&refs, &sectors).map_err(|e| e.to_string())?;
        let width = cfg.width() as usize;
        for i in 0..cfg.pixel_count() {
            let Some(px) = out.get_index(i) else { continue };
            let matches: Vec<usize> = maps
                .iter()
                .enumerate()
                .filter(|(_, m)| m.get_index(i).is_some_and(|q| {
                    q.range.to_bits() == px.range.to_bits()
                        && q.label == px.label
                        && q.intensity.to_bits() == px.intensity.to_bits()
                        && q.source == px.source
                }))
                .map(|(k, _)| k)
                .collect();
            ensure(matches.len() == 1, || format!("case {case}: pixel {i} matches inputs {matches:?}"))?;
            let alpha = ((i % width) as f64 + 0.5) * TAU / width as f64;
            let owner = sectors.iter().find(|s| s.start <= alpha && alpha < s.end).map(|s| s.source);
            ensure(owner == Some(matches[0]), || {
                format!("case {case}: pixel {i} from map {} but its sector belongs to {owner:?}", matches[0])
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} valid pixels each from exactly one input; arcs sum to 2pi within {worst:.0e}"))
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_lidomaug");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = dir.path().join("a.ldw");
    let b = dir.path().join("b.ldw");
    lidomaug::io::save_world(&scene(&SceneParams { target_points: 40_000, seed: 8 }), &a).map_err(|e| e.to_string())?;
    lidomaug::io::save_world(&scene(&SceneParams { target_points: 40_000, seed: 9 }), &b).map_err(|e| e.to_string())?;
    let run = |seed: u64, out: &Path| -> Result<Vec<Vec<u8>>, String> {
        let o = Command::new(bin)
            .args(["augment", "--world"])
            .arg(&a)
            .arg("--world")
            .arg(&b)
            .args(["--seed", &seed.to_string(), "--ply", "--save-spec", "--out-dir"])
            .arg(out)
            .env_remove("LIDOMAUG_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(String::from_utf8_lossy(&o.stderr).into_owned());
        }
        ["frame.bin", "frame.label", "frame.png", "frame.ply", "frame.spec"]
            .iter()
            .map(|f| std::fs::read(out.join(f)).map_err(|e| format!("{f}: {e}")))
            .collect()
    };
    let mut mismatches = 0;
    let mut distinct = std::collections::HashSet::new();
    for seed in 0..20u64 {
        let first = run(seed, &dir.path().join(format!("{seed}a")))?;
        let second = run(seed, &dir.path().join(format!("{seed}b")))?;
        if first != second {
            mismatches += 1;
        }
        distinct.insert(first[0].clone());
    }
    ensure(mismatches == 0, || format!("{mismatches} of 20 seeds produced different files"))?;
    ensure(distinct.len() == 20, || format!("only {} distinct outputs over 20 seeds", distinct.len()))?;
    Ok("20 seeds x 2 runs, 5 files each, zero mismatches".into())
}

fn throughput() -> (Outcome, Outcome) {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let path = dir.path().join("bench.ldw");
    let generated = scene(&SceneParams { target_points: 1_000_000, seed: 0 });
    if let Err(e) = lidomaug::io::save_world(&generated, &path) {
        return (Err(e.to_string()), Err(e.to_string()));
    }
    drop(generated);
    let world = match lidomaug::io::load_world(&path) {
        Ok(w) => w,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let measure = |threads: usize, budget: f64| -> Outcome {
        let spec = AugmentSpec {
            fixed_config: Some(Preset::V64.config()),
            threads,
            ..Default::default()
        };
        let refs = [&world, &world];
        let mut samples = Vec::new();
        for i in 0..23u64 {
            let s = AugmentSpec { seed: i, ..spec.clone() };
            let t = Instant::now();
            augment(&refs, &s).map_err(|e| e.to_string())?;
            if i >= 3 {
                samples.push(t.elapsed().as_secs_f64() * 1e3);
            }
        }
        samples.sort_by(f64::total_cmp);
        let median = samples[samples.len() / 2];
        let fps = 1000.0 / median;
        let detail = format!(
            "median {median:.1} ms (budget {budget} ms), {fps:.1} FPS vs reference {REFERENCE_FPS} FPS; \
             {} points, 64x2048, n_mix 2, {threads} worker(s) on {cores} core(s)",
            world.len()
        );
        if median <= budget {
            Ok(detail)
        } else {
            Err(detail)
        }
    };
    (measure(1, SINGLE_THREAD_BUDGET_MS), measure(8, EIGHT_WORKER_BUDGET_MS))
}

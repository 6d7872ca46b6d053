use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use nalgebra::Vector3;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use lidomaug::distortion::{DepthMode, DistortOptions, DistortionOrder};
use lidomaug::io;
use lidomaug::mixer::{sample_sectors, Sector};
use lidomaug::pipeline::{parse_seed, seed_from_env};
use lidomaug::render::{render_posed, RenderOptions};
use lidomaug::sampling::{stream, STREAM_SECTORS};
use lidomaug::synth;
use lidomaug::textcfg::{self, Document};
use lidomaug::world::{DynamicPolicy, WorldBuilder, SEMANTIC_KITTI_DYNAMIC_CLASSES};
use lidomaug::{
    augment, distort, extract_cloud, mix, AugmentSpec, Error, LidarConfig, MotionParams, PointCloud, Pose,
    RangeMap, Result, WorldModel,
};

use crate::args::*;

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::BuildWorld(a) => build_world(a),
        Command::Render(a) => render_cmd(a),
        Command::Distort(a) => distort_cmd(a),
        Command::Mix(a) => mix_cmd(a),
        Command::Augment(a) => augment_cmd(a),
        Command::Bench(a) => bench(a),
        Command::Inspect(a) => inspect(a),
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn build_world(a: BuildWorldArgs) -> Result<()> {
    let seq = io::load_sequence(&a.sequence)?;
    let n = seq.frames.len();
    let dynamic = if let Some(path) = &a.dynamic_tracks {
        DynamicPolicy::Tracks(io::read_tracks(path)?)
    } else {
        match a.dynamic {
            DynamicArg::AsStatic => DynamicPolicy::AsStatic,
            DynamicArg::Window => DynamicPolicy::TemporalWindow {
                window: a.window,
                classes: SEMANTIC_KITTI_DYNAMIC_CLASSES.to_vec(),
            },
        }
    };
    if a.aggregate == 0 {
        return Err(usage("--aggregate must be at least 1"));
    }
    let builder = WorldBuilder {
        aggregation_count: a.aggregate,
        dynamic,
        vote: !a.no_vote,
    };
    let references: Vec<usize> = match a.stride {
        Some(0) => return Err(usage("--stride must be at least 1")),
        Some(s) => (0..n).step_by(s).collect(),
        None if a.frame >= n => {
            return Err(usage(format!("--frame {} outside sequence of {n} frames", a.frame)))
        }
        None => vec![a.frame],
    };
    if a.stride.is_some() {
        std::fs::create_dir_all(&a.out).map_err(|e| Error::Io { path: a.out.clone(), source: e })?;
    }
    let tracks_digest = match &a.dynamic_tracks {
        Some(p) => hex(&Sha256::digest(std::fs::read(p).map_err(|e| Error::Io { path: p.clone(), source: e })?)),
        None => String::new(),
    };
    for t in references {
        let (world, stats) = builder.build(&seq.frames, t)?;
        let params = format!(
            "aggregate={} dynamic={:?} window={} tracks={} vote={} frame={t}",
            a.aggregate, a.dynamic, a.window, tracks_digest, !a.no_vote
        );
        let params_hash: [u8; 32] = Sha256::digest(params.as_bytes()).into();
        let out = if a.stride.is_some() {
            a.out.join(format!("world_{t:06}.ldm"))
        } else {
            a.out.clone()
        };
        io::write_world(&world, &params_hash, &out)?;
        let v = &stats.voxels;
        println!("cache={}", out.display());
        println!("reference={}", stats.reference);
        println!("frames_used={}", stats.frames_used.len());
        println!("points={}", world.len());
        println!("static_points={}", stats.static_points);
        println!("object_points={}", stats.object_points);
        println!("objects={}", stats.objects);
        println!("voxels={}", v.voxels);
        println!("labeled_voxels={}", v.labeled_voxels);
        println!("labeled_points_per_labeled_voxel={:.3}", v.labeled_points_per_labeled_voxel);
        println!("world_hash={}", hex(&world.content_hash()));
    }
    Ok(())
}

fn sensor_config(s: &SensorArgs) -> Result<LidarConfig> {
    match &s.sensor {
        Some(p) => LidarConfig::from_sensor_file(p),
        None => LidarConfig::preset(&s.preset),
    }
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| usage(format!("{what}: `{v}` is not a number")))
        })
        .collect()
}

fn pose_arg(p: &PoseArgs) -> Result<Pose> {
    let t = parse_floats(&p.translate, "--translate")?;
    if t.len() != 3 {
        return Err(usage("--translate expects x,y,z"));
    }
    Ok(Pose::from_yaw(p.yaw, Vector3::new(t[0], t[1], t[2])))
}

fn load_worlds(paths: &[PathBuf]) -> Result<Vec<WorldModel>> {
    paths.iter().map(|p| io::load_world(p)).collect()
}

fn output_dir(o: &OutputArgs) -> Result<()> {
    std::fs::create_dir_all(&o.out_dir).map_err(|e| Error::Io { path: o.out_dir.clone(), source: e })
}

/// Writes `<stem>.bin`, `.label`, `.png` and optionally `.ply`.
fn write_frame(cloud: &PointCloud, map: &RangeMap, dir: &Path, stem: &str, ply: bool) -> Result<Vec<PathBuf>> {
    let base = dir.join(stem);
    let files = [
        base.with_extension("bin"),
        base.with_extension("label"),
        base.with_extension("png"),
    ];
    io::write_scan(cloud, &files[0])?;
    let words: Vec<u32> = cloud.labels().iter().map(|&l| l as u32).collect();
    io::write_labels(&words, &files[1])?;
    io::write_range_png(map, &files[2])?;
    let mut out = files.to_vec();
    if ply {
        let p = base.with_extension("ply");
        io::write_ply(cloud, &p)?;
        out.push(p);
    }
    Ok(out)
}

fn report_frame(cloud: &PointCloud, map: &RangeMap, files: &[PathBuf]) {
    println!("config={}", map.config());
    println!("valid_pixels={}", map.valid_count());
    println!("points={}", cloud.len());
    for f in files {
        println!("file={}", f.display());
    }
}

fn render_cmd(a: RenderArgs) -> Result<()> {
    let cfg = sensor_config(&a.sensor)?;
    let pose = pose_arg(&a.pose)?;
    let world = io::load_world(&a.world)?;
    let map = render_posed(&world, &pose, &cfg, RenderOptions { threads: a.threads });
    let cloud = extract_cloud(&map);
    output_dir(&a.output)?;
    let files = write_frame(&cloud, &map, &a.output.out_dir, &a.output.prefix, a.output.ply)?;
    report_frame(&cloud, &map, &files);
    Ok(())
}

fn distortion_options(order: Option<OrderArg>, depth: Option<DepthArg>, base: DistortOptions) -> DistortOptions {
    DistortOptions {
        order: match order {
            Some(OrderArg::ResampleFirst) => DistortionOrder::ResampleFirst,
            Some(OrderArg::TravelFirst) => DistortionOrder::TravelFirst,
            None => base.order,
        },
        depth: match depth {
            Some(DepthArg::Translate) => DepthMode::Translate,
            Some(DepthArg::RangeAdd) => DepthMode::RangeAdd,
            None => base.depth,
        },
    }
}

fn distort_cmd(a: DistortArgs) -> Result<()> {
    let r = &a.render;
    let cfg = sensor_config(&r.sensor)?;
    let pose = pose_arg(&r.pose)?;
    let motion = MotionParams::from_kmh(a.speed_kmh, a.yaw_rate, cfg.spin_omega())
        .map_err(|e| usage(e.to_string()))?;
    let world = io::load_world(&r.world)?;
    let map = render_posed(&world, &pose, &cfg, RenderOptions { threads: r.threads });
    let opts = distortion_options(a.distortion_order, a.depth_mode, DistortOptions::default());
    let map = distort(&map, &motion, opts);
    let cloud = extract_cloud(&map);
    output_dir(&r.output)?;
    let files = write_frame(&cloud, &map, &r.output.out_dir, &r.output.prefix, r.output.ply)?;
    println!("speed_mps={}", motion.speed);
    println!("yaw_rate={}", motion.yaw_rate);
    report_frame(&cloud, &map, &files);
    Ok(())
}

/// Flag > LIDOMAUG_SEED > spec file > fresh seed from the clock.
fn resolve_seed(flag: Option<&str>, file_seed: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return parse_seed(s).map_err(|_| usage(format!("--seed `{s}` is not a 64-bit unsigned integer")));
    }
    if let Some(s) = seed_from_env()? {
        return Ok(s);
    }
    if let Some(s) = file_seed {
        return Ok(s);
    }
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    Ok((nanos as u64) ^ ((nanos >> 64) as u64) ^ (std::process::id() as u64).rotate_left(32))
}

fn mix_cmd(a: MixArgs) -> Result<()> {
    let cfg = sensor_config(&a.sensor)?;
    let worlds = load_worlds(&a.worlds)?;
    let n = worlds.len();
    let sectors = match &a.cuts {
        Some(c) => {
            let mut cuts = parse_floats(c, "--cuts")?;
            if cuts.len() + 1 != n {
                return Err(usage(format!("--cuts needs {} values for {n} worlds", n - 1)));
            }
            cuts.sort_by(f64::total_cmp);
            let mut bounds = vec![0.0];
            bounds.extend(cuts);
            bounds.push(std::f64::consts::TAU);
            bounds
                .windows(2)
                .enumerate()
                .map(|(source, b)| Sector { start: b[0], end: b[1], source })
                .collect()
        }
        None => {
            let seed = resolve_seed(a.seed.as_deref(), None)?;
            println!("seed={seed}");
            sample_sectors(&mut stream(seed, STREAM_SECTORS), n)?
        }
    };
    let maps: Vec<RangeMap> = worlds
        .iter()
        .map(|w| render_posed(w, &Pose::identity(), &cfg, RenderOptions::default()))
        .collect();
    let refs: Vec<&RangeMap> = maps.iter().collect();
    let map = mix(&refs, &sectors).map_err(|e| usage(e.to_string()))?;
    let cloud = extract_cloud(&map);
    output_dir(&a.output)?;
    let files = write_frame(&cloud, &map, &a.output.out_dir, &a.output.prefix, a.output.ply)?;
    for s in &sectors {
        println!("sector={} {} {}", s.source, s.start, s.end);
    }
    report_frame(&cloud, &map, &files);
    Ok(())
}

/// Spec from file, environment and flags, in increasing precedence.
fn build_spec(a: &SpecArgs) -> Result<AugmentSpec> {
    let (mut spec, file_seed) = match &a.config {
        Some(path) => {
            let doc = textcfg::read(path)?;
            let has_seed = doc.root().get("seed").is_some();
            let spec = AugmentSpec::from_document(&doc)?;
            let seed = has_seed.then_some(spec.seed);
            (spec, seed)
        }
        None => (AugmentSpec::default(), None),
    };
    let mut lines = String::new();
    let mut put = |key: &str, v: &Option<String>| {
        if let Some(v) = v {
            let _ = writeln!(lines, "{key} = {v}");
        }
    };
    put("widths", &a.widths);
    put("channels", &a.channels);
    put("f_up", &a.f_up);
    put("f_down", &a.f_down);
    put("yaw", &a.yaw);
    put("tx", &a.tx);
    put("ty", &a.ty);
    put("tz", &a.tz);
    put("speed_kmh", &a.speed_kmh);
    put("yaw_rate", &a.yaw_rate);
    put("n_mix", &a.n_mix.map(|v| v.to_string()));
    put("threads", &a.threads.map(|v| v.to_string()));
    let doc = Document::parse(&lines, Path::new("<flags>")).map_err(|e| usage(e.to_string()))?;
    spec.update_from(doc.root()).map_err(|e| usage(e.to_string()))?;
    spec.distortion = distortion_options(a.distortion_order, a.depth_mode, spec.distortion);

    let preset = a.preset.as_deref().map(LidarConfig::preset).transpose()?;
    if let Some(p) = preset {
        spec.max_range = p.max_range();
        spec.spin_hz = p.spin_rate_hz();
    }
    let fixed = match (&a.sensor, preset) {
        (Some(path), _) => Some(LidarConfig::from_sensor_file(path)?),
        (None, p) => p,
    };
    if a.no_random_config || a.identity {
        spec.fixed_config = Some(fixed.or(spec.fixed_config).unwrap_or(lidomaug::Preset::V64.config()));
    } else if a.sensor.is_some() {
        return Err(usage("--sensor takes effect only with --no-random-config or --identity"));
    }
    if a.identity {
        let keep = (spec.seed, spec.threads);
        spec = AugmentSpec::identity(spec.fixed_config.expect("set above"));
        (spec.seed, spec.threads) = keep;
    }
    spec.seed = resolve_seed(a.seed.as_deref(), file_seed)?;
    spec.validate().map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

/// `worlds` repeated in turn up to `n`.
fn cycle<'a>(worlds: &'a [WorldModel], n: usize) -> Vec<&'a WorldModel> {
    (0..n.max(1)).map(|i| &worlds[i % worlds.len()]).collect()
}

fn augment_cmd(a: AugmentArgs) -> Result<()> {
    let spec = build_spec(&a.spec)?;
    if a.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let worlds = load_worlds(&a.worlds)?;
    let refs = cycle(&worlds, spec.n_mix);
    output_dir(&a.output)?;
    println!("seed={}", spec.seed);
    if a.save_spec {
        let p = a.output.out_dir.join(format!("{}.spec", a.output.prefix));
        std::fs::write(&p, spec.to_text()).map_err(|e| Error::Io { path: p.clone(), source: e })?;
        println!("spec={}", p.display());
    }
    let results: Vec<Result<(u64, Duration, Vec<PathBuf>, RangeMap, usize)>> = (0..a.count)
        .into_par_iter()
        .map(|i| {
            let s = AugmentSpec { seed: spec.seed.wrapping_add(i as u64), ..spec.clone() };
            let out = augment(&refs, &s)?;
            let stem = if a.count == 1 {
                a.output.prefix.clone()
            } else {
                format!("{}_{i:06}", a.output.prefix)
            };
            let files = write_frame(&out.cloud, &out.map, &a.output.out_dir, &stem, a.output.ply)?;
            Ok((s.seed, out.latency, files, out.map, out.cloud.len()))
        })
        .collect();
    for r in results {
        let (seed, latency, files, map, points) = r?;
        if a.count > 1 {
            println!("frame_seed={seed}");
        }
        println!("config={}", map.config());
        println!("points={points}");
        println!("latency_ms={:.3}", latency.as_secs_f64() * 1e3);
        for f in files {
            println!("file={}", f.display());
        }
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let mut spec = build_spec(&a.spec)?;
    if !a.random_config && spec.fixed_config.is_none() {
        spec.fixed_config = Some(lidomaug::Preset::V64.config());
    }
    let worlds = if a.worlds.is_empty() {
        eprintln!("generating synthetic world of {} points", a.synthetic_points);
        vec![synth::scene(&synth::SceneParams {
            target_points: a.synthetic_points,
            seed: 0,
        })]
    } else {
        load_worlds(&a.worlds)?
    };
    if a.iterations == 0 {
        return Err(usage("--iterations must be at least 1"));
    }
    let refs = cycle(&worlds, spec.n_mix);
    let world_points: usize = refs.iter().map(|w| w.len()).sum();
    for i in 0..a.warmup {
        augment(&refs, &AugmentSpec { seed: spec.seed.wrapping_add(i as u64), ..spec.clone() })?;
    }
    let mut samples = Vec::with_capacity(a.iterations);
    let mut output_hash = String::new();
    let mut last_points = 0;
    let mut last_config = None;
    for _ in 0..a.iterations {
        let t = Instant::now();
        let out = augment(&refs, &spec)?;
        samples.push(t.elapsed().as_secs_f64() * 1e3);
        last_points = out.cloud.len();
        last_config = Some(out.config);
        let mut h = Sha256::new();
        for v in out.map.ranges() {
            h.update(v.to_le_bytes());
        }
        output_hash = hex(&h.finalize());
    }
    samples.sort_by(f64::total_cmp);
    let pct = |q: f64| samples[((samples.len() - 1) as f64 * q).round() as usize];
    let median = pct(0.5);
    println!("iterations={}", samples.len());
    println!("threads={}", spec.threads);
    println!("seed={}", spec.seed);
    println!("n_mix={}", spec.n_mix);
    println!("world_points={world_points}");
    println!("target_config={}", last_config.expect("at least one iteration"));
    println!("output_points={last_points}");
    println!("min_ms={:.3}", samples[0]);
    println!("median_ms={median:.3}");
    println!("p99_ms={:.3}", pct(0.99));
    println!("fps={:.1}", 1000.0 / median);
    println!("reference_fps=330");
    println!("output_hash={output_hash}");
    Ok(())
}

fn inspect(a: InspectArgs) -> Result<()> {
    let p = &a.path;
    let head = {
        use std::io::Read;
        let mut f = std::fs::File::open(p).map_err(|e| Error::Io { path: p.clone(), source: e })?;
        let mut b = [0u8; 8];
        let n = f.read(&mut b).map_err(|e| Error::Io { path: p.clone(), source: e })?;
        b[..n].to_vec()
    };
    let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("");
    if head.starts_with(io::CACHE_MAGIC) {
        let (w, params) = io::read_world(p)?;
        let s = w.stats();
        println!("kind=world");
        println!("points={}", w.len());
        println!("voxels={}", s.voxels);
        println!("labeled_voxels={}", s.labeled_voxels);
        println!("labeled_points_per_labeled_voxel={:.3}", s.labeled_points_per_labeled_voxel);
        println!("params_hash={}", hex(&params));
        println!("world_hash={}", hex(&w.content_hash()));
        print_classes(w.cloud().labels().iter().copied());
    } else if head.starts_with(b"\x89PNG") {
        let (w, h, mm) = io::read_range_png(p)?;
        println!("kind=range_png");
        println!("width={w}");
        println!("height={h}");
        println!("valid_pixels={}", mm.iter().filter(|&&v| v != 0).count());
        if let Some(max) = mm.iter().max() {
            println!("max_range_mm={max}");
        }
    } else if head.starts_with(b"ply") {
        let c = io::read_ply(p)?;
        println!("kind=ply");
        println!("points={}", c.len());
        print_classes(c.labels().iter().copied());
    } else if ext == "label" {
        let words = io::read_labels(p)?;
        println!("kind=labels");
        println!("labels={}", words.len());
        print_classes(words.iter().map(|&w| io::class_of(w)));
    } else if ext == "bin" {
        let c = io::read_scan(p)?;
        println!("kind=scan");
        println!("points={}", c.len());
        if !c.is_empty() {
            let r: Vec<f64> = c.points().map(|q| q.norm()).collect();
            println!("max_range_m={:.3}", r.iter().cloned().fold(0.0, f64::max));
        }
    } else {
        let spec = AugmentSpec::read(p)?;
        println!("kind=spec");
        print!("{}", spec.to_text());
    }
    Ok(())
}

fn print_classes(labels: impl Iterator<Item = u16>) {
    let mut counts: BTreeMap<u16, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    for (k, v) in counts {
        println!("class_{k}={v}");
    }
}

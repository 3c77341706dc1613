//! Command-line front end for the marker-to-splats pipeline.
//!
//! Every stage is file-mediated and deterministic: identical invocations
//! produce byte-identical artifacts (timing lives in one clearly marked
//! report field, removable with --no-timing).
//!
//! Exit codes: 0 success, 1 i/o-or-data error, 2 usage/config error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use splatmark_core::error::Error as CoreError;
use splatmark_core::eval::{angle_sweep, bit_readback, report_counts_and_time, SweepParams};
use splatmark_core::grid::{detect_format, load_bitgrid, BitGrid};
use splatmark_core::image::{read_image, write_image, ImageBuffer, ImageFormat};
use splatmark_core::metrics::{psnr, ssim};
use splatmark_core::partition::{partition_marker, PartitionColors};
use splatmark_core::render::{
    default_focal, default_view_distance, marker_camera, render, RenderConfig,
};
use splatmark_core::splat::{
    export_ply, import_ply, marker_to_splats, ApproxConfig, LevelPolicy, MarkerPlane, SplatSet,
};

#[derive(Parser)]
#[command(name = "splatmark", version, about = "Fiducial markers as 2D Gaussian splats")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a marker bitmap into a minimum set of rectangles.
    Partition(PartitionArgs),
    /// Expand a marker into a Gaussian splat set (.ply or .json).
    Generate(GenerateArgs),
    /// Render a splat set under a pinhole view.
    Render(RenderArgs),
    /// Sweep viewing angles and report bit readback per angle.
    Sweep(SweepArgs),
    /// PSNR/SSIM between two images, plus optional bit accuracy.
    Metrics(MetricsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColorsArg {
    Dark,
    Both,
}

impl From<ColorsArg> for PartitionColors {
    fn from(c: ColorsArg) -> Self {
        match c {
            ColorsArg::Dark => PartitionColors::DarkOnly,
            ColorsArg::Both => PartitionColors::Both,
        }
    }
}

#[derive(Args)]
struct PartitionArgs {
    /// Marker bitmap (textgrid or PBM; format sniffed from content).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    colors: ColorsArg,
    /// Output path for the partition JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Refinement levels per rectangle; omit for the size-adaptive
    /// default.
    #[arg(long)]
    levels: Option<u32>,
    /// Seed replication factor.
    #[arg(long, default_value_t = 1)]
    rho: u32,
    /// Construction and render cutoff.
    #[arg(long, default_value_t = 3.0)]
    gamma: f64,
    /// Splat opacity.
    #[arg(long, default_value_t = 0.999)]
    opacity: f64,
    /// Drop duplicate mirror-axis Gaussians.
    #[arg(long, default_value_t = true)]
    dedup: bool,
    #[arg(long, value_enum, default_value = "both")]
    colors: ColorsArg,
    /// Output splat file; extension selects .ply or .json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ViewArgs {
    /// Viewing angle from the plane normal, degrees in [0, 90).
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Azimuth around the plane normal, degrees.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Camera distance from the marker center (default: three plane
    /// diagonals).
    #[arg(long)]
    distance: Option<f64>,
    /// Focal length in pixels (default: 1.8 x the larger resolution).
    #[arg(long)]
    focal: Option<f64>,
    /// Output resolution, WxH.
    #[arg(long, default_value = "512x512")]
    res: String,
}

#[derive(Args)]
struct RenderArgs {
    /// Splat set (.ply or .json).
    #[arg(long)]
    splats: PathBuf,
    #[command(flatten)]
    view: ViewArgs,
    /// Background gray level.
    #[arg(long, default_value_t = 1.0)]
    bg: f64,
    /// Output image; extension selects .pgm or .ppm.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    splats: PathBuf,
    /// Ground-truth marker bitmap.
    #[arg(long)]
    truth: PathBuf,
    /// Angle range START:STOP:STEP, inclusive of aligned STOP.
    #[arg(long, default_value = "0:85:5")]
    angles: String,
    #[arg(long, default_value = "800x800")]
    res: String,
    /// Bit accuracy needed to count as decodable.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    #[arg(long)]
    distance: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    azimuth: f64,
    #[arg(long)]
    focal: Option<f64>,
    /// Report output path (JSON).
    #[arg(long)]
    report: PathBuf,
    /// Also write frame_{theta}.ppm per angle into this directory.
    #[arg(long)]
    dump_frames: Option<PathBuf>,
    /// Omit the wall-clock field so reports compare byte-for-byte.
    #[arg(long, default_value_t = false)]
    no_timing: bool,
}

#[derive(Args)]
struct MetricsArgs {
    /// Reference image (PGM/PPM).
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Test image.
    #[arg(long)]
    test: PathBuf,
    /// Marker bitmap for bit accuracy (requires the view options used
    /// to render the test image).
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long)]
    distance: Option<f64>,
    #[arg(long)]
    focal: Option<f64>,
}

/// Errors mapped to process exit codes.
#[derive(Debug)]
enum CliError {
    /// I/O or bad data: exit 1.
    Data(String),
    /// Bad usage or configuration: exit 2.
    Usage(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Partition(args) => cmd_partition(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Render(args) => cmd_render(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Metrics(args) => cmd_metrics(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_grid(path: &Path) -> CliResult<BitGrid> {
    let format = detect_format(path)?;
    Ok(load_bitgrid(path, format)?)
}

fn load_splats(path: &Path) -> CliResult<SplatSet> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("ply") => Ok(import_ply(path)?),
        Some("json") => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            Ok(SplatSet::from_json(&text).map_err(|e| CliError::Data(e.to_string()))?)
        }
        _ => Err(CliError::Usage(format!(
            "{}: splat files must end in .ply or .json",
            path.display()
        ))),
    }
}

fn parse_resolution(spec: &str) -> CliResult<(usize, usize)> {
    let parts: Vec<&str> = spec.split('x').collect();
    let parse = |s: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| CliError::Usage(format!("bad resolution {spec:?}, expected WxH")))
    };
    match parts.as_slice() {
        [w, h] => Ok((parse(w)?, parse(h)?)),
        _ => Err(CliError::Usage(format!(
            "bad resolution {spec:?}, expected WxH"
        ))),
    }
}

/// Parse START:STOP:STEP into an inclusive-of-aligned-STOP angle list.
fn parse_angles(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad angle range {spec:?}")))
    };
    let [start, stop, step] = match parts.as_slice() {
        [a, b, c] => [parse(a)?, parse(b)?, parse(c)?],
        _ => {
            return Err(CliError::Usage(format!(
                "bad angle range {spec:?}, expected START:STOP:STEP"
            )))
        }
    };
    if step <= 0.0 {
        return Err(CliError::Usage("angle STEP must be positive".into()));
    }
    if start < 0.0 || stop >= 90.0 || start > stop {
        return Err(CliError::Usage(
            "angle range must satisfy 0 <= START <= STOP < 90".into(),
        ));
    }
    let mut angles = Vec::new();
    let mut k = 0u32;
    loop {
        let a = start + step * k as f64;
        if a > stop + 1e-9 {
            break;
        }
        angles.push(a);
        k += 1;
    }
    Ok(angles)
}

fn approx_config(args: &GenerateArgs) -> CliResult<ApproxConfig> {
    let cfg = ApproxConfig {
        levels: match args.levels {
            Some(l) => LevelPolicy::Fixed(l),
            None => LevelPolicy::Adaptive,
        },
        density: args.rho,
        cutoff: args.gamma,
        dedup_mirrors: args.dedup,
        base_opacity: args.opacity,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_partition(args: PartitionArgs) -> CliResult<()> {
    let grid = load_grid(&args.input)?;
    let result = partition_marker(&grid, args.colors.into())?;
    std::fs::write(&args.out, result.to_json())
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    println!("rects: {}", result.total_rects);
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> CliResult<()> {
    let cfg = approx_config(&args)?;
    let grid = load_grid(&args.input)?;
    let source = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "marker".into());
    let part = partition_marker(&grid, args.colors.into())?;
    let start = std::time::Instant::now();
    let set = marker_to_splats(&part, &cfg, &MarkerPlane::default(), &source)?;
    let elapsed = start.elapsed().as_secs_f64();
    match args.out.extension().and_then(|e| e.to_str()) {
        Some("ply") => export_ply(&set, &args.out)?,
        Some("json") => std::fs::write(&args.out, set.to_json())
            .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?,
        _ => {
            return Err(CliError::Usage(format!(
                "{}: output must end in .ply or .json",
                args.out.display()
            )))
        }
    }
    println!("primitives: {}", set.len());
    println!("construction_time_s: {elapsed:.4}");
    Ok(())
}

fn view_camera(view: &ViewArgs) -> CliResult<splatmark_core::render::Camera> {
    let (w, h) = parse_resolution(&view.res)?;
    let focal = view.focal.unwrap_or_else(|| default_focal(w, h));
    let distance = view.distance.unwrap_or_else(default_view_distance);
    Ok(marker_camera(w, h, focal, distance, view.theta, view.phi)?)
}

fn write_frame(img: &ImageBuffer, path: &Path) -> CliResult<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => Ok(write_image(&img.to_gray(), path, ImageFormat::PgmBinary)?),
        Some("ppm") => Ok(write_image(&img.to_rgb(), path, ImageFormat::PpmBinary)?),
        _ => Err(CliError::Usage(format!(
            "{}: image output must end in .pgm or .ppm",
            path.display()
        ))),
    }
}

fn cmd_render(args: RenderArgs) -> CliResult<()> {
    if !(0.0..=1.0).contains(&args.bg) {
        return Err(CliError::Usage("background must be in [0, 1]".into()));
    }
    let set = load_splats(&args.splats)?;
    let cam = view_camera(&args.view)?;
    let cfg = RenderConfig {
        background: args.bg,
        ..RenderConfig::default()
    };
    let img = render(&set, &cam, &cfg)?;
    write_frame(&img, &args.out)
}

fn cmd_sweep(args: SweepArgs) -> CliResult<()> {
    let set = load_splats(&args.splats)?;
    let truth = load_grid(&args.truth)?;
    let (w, h) = parse_resolution(&args.res)?;
    if !(0.0..=1.0).contains(&args.threshold) {
        return Err(CliError::Usage("threshold must be in [0, 1]".into()));
    }
    let params = SweepParams {
        angles: parse_angles(&args.angles)?,
        distance: args.distance.unwrap_or_else(default_view_distance),
        azimuth: args.azimuth,
        focal_px: args.focal.unwrap_or_else(|| default_focal(w, h)),
        resolution: (w, h),
        decode_threshold: args.threshold,
        render_cfg: RenderConfig::default(),
        collect_frames: args.dump_frames.is_some(),
    };
    let marker_name = args
        .truth
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "marker".into());
    let (mut report, frames) = angle_sweep(&set, &truth, &params, &marker_name)?;
    if !args.no_timing {
        // re-measure construction for the echoed config on the truth
        // marker; isolated here so --no-timing reports are golden-stable
        let (_, secs) = report_counts_and_time(&truth, &set.meta.config, PartitionColors::Both)?;
        report.construction_time_s = Some(secs);
    }
    if let Some(dir) = &args.dump_frames {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
        for (theta, img) in &frames {
            let path = dir.join(format!("frame_{theta}.ppm"));
            write_frame(img, &path)?;
        }
    }
    std::fs::write(&args.report, report.to_json())
        .map_err(|e| CliError::Data(format!("{}: {e}", args.report.display())))?;
    match report.theta_decode {
        Some(t) => println!("theta_decode: {t}"),
        None => println!("theta_decode: none"),
    }
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> CliResult<()> {
    let reference = read_image(&args.reference)?;
    let test = read_image(&args.test)?;
    let psnr_db = psnr(&reference, &test)?;
    let ssim_val = ssim(&reference, &test)?;
    let mut record = serde_json::json!({
        "psnr_db": if psnr_db.is_finite() { Some(psnr_db) } else { None },
        "psnr_infinite": !psnr_db.is_finite(),
        "ssim": ssim_val,
        "lpips": serde_json::Value::Null,
    });
    if let Some(truth_path) = &args.truth {
        let truth = load_grid(truth_path)?;
        let (w, h) = (test.width(), test.height());
        let cam = marker_camera(
            w,
            h,
            args.focal.unwrap_or_else(|| default_focal(w, h)),
            args.distance.unwrap_or_else(default_view_distance),
            args.theta,
            args.phi,
        )?;
        let accuracy = bit_readback(&test, &cam, &MarkerPlane::default(), &truth)?;
        record["bit_accuracy"] = serde_json::json!(accuracy);
    }
    println!("{}", serde_json::to_string(&record).expect("metrics record"));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_ranges_parse_inclusively() {
        assert_eq!(parse_angles("0:10:5").unwrap(), vec![0.0, 5.0, 10.0]);
        assert_eq!(parse_angles("0:85:5").unwrap().len(), 18);
        assert_eq!(parse_angles("10:11:5").unwrap(), vec![10.0]);
    }

    #[test]
    fn bad_angle_ranges_rejected() {
        assert!(parse_angles("0:10:0").is_err());
        assert!(parse_angles("0:90:5").is_err());
        assert!(parse_angles("20:10:5").is_err());
        assert!(parse_angles("nope").is_err());
    }

    #[test]
    fn resolutions_parse() {
        assert_eq!(parse_resolution("640x480").unwrap(), (640, 480));
        assert!(parse_resolution("640").is_err());
        assert!(parse_resolution("0x10").is_err());
    }
}

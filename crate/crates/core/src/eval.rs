//! Readability harness: module-center bit readback, viewing-angle
//! sweeps, and primitive-count / construction-time reports.
//!
//! The readback oracle projects every module center through the known
//! camera and plane, samples the rendered image bilinearly and
//! thresholds at 0.5 (dark iff the sample is strictly below). A marker
//! counts as decodable at an angle when the fraction of correct modules
//! reaches the decode threshold (1.0 by default: QR error correction
//! would only loosen this, and modeling it is out of scope).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::BitGrid;
use crate::image::ImageBuffer;
use crate::partition::{partition_marker, PartitionColors};
use crate::render::{marker_camera, render, Camera, RenderConfig};
use crate::splat::{marker_to_splats, ApproxConfig, MarkerPlane, SplatSet};

/// Fraction of marker modules whose thresholded center sample matches
/// the ground truth.
pub fn bit_readback(
    img: &ImageBuffer,
    cam: &Camera,
    plane: &MarkerPlane,
    truth: &BitGrid,
) -> Result<f64> {
    let (w, h) = (truth.width() as f64, truth.height() as f64);
    let side = 2.0 / w.max(h);
    let mut correct = 0usize;
    for row in 0..truth.height() {
        for col in 0..truth.width() {
            let px = (col as f64 + 0.5 - w / 2.0) * side;
            let py = (h / 2.0 - (row as f64 + 0.5)) * side;
            let world = plane.lift([px, py]);
            let (x, y) = cam.project(world).ok_or_else(|| {
                Error::Dimension(format!("module ({row},{col}) is behind the camera"))
            })?;
            if x < 0.0 || x > img.width() as f64 || y < 0.0 || y > img.height() as f64 {
                return Err(Error::Dimension(format!(
                    "module ({row},{col}) projects outside the image at ({x:.1},{y:.1})"
                )));
            }
            let sample = img.sample_bilinear(x, y);
            let read_dark = sample < 0.5;
            if read_dark == (truth.get(row, col) == 1) {
                correct += 1;
            }
        }
    }
    Ok(correct as f64 / (truth.width() * truth.height()) as f64)
}

/// One sweep record.
#[derive(Debug, Clone, Serialize)]
pub struct SweepAngle {
    pub theta: f64,
    pub bit_accuracy: f64,
    pub decodable: bool,
}

/// Result of a viewing-angle sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub marker: String,
    pub config: ApproxConfig,
    pub distance: f64,
    pub azimuth: f64,
    pub focal_px: f64,
    pub resolution: [usize; 2],
    pub decode_threshold: f64,
    pub primitive_count: usize,
    pub angles: Vec<SweepAngle>,
    /// Largest decodable angle in the sweep, absent when none decodes.
    pub theta_decode: Option<f64>,
    /// Wall-clock seconds for partition + splat generation; omitted in
    /// timing-free (golden-comparable) reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction_time_s: Option<f64>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep report serializes")
    }
}

/// Sweep parameters beyond the splats and truth.
#[derive(Debug, Clone)]
pub struct SweepParams {
    pub angles: Vec<f64>,
    pub distance: f64,
    pub azimuth: f64,
    pub focal_px: f64,
    pub resolution: (usize, usize),
    pub decode_threshold: f64,
    pub render_cfg: RenderConfig,
    /// Keep the per-angle frames (for dumping); costs memory.
    pub collect_frames: bool,
}

/// Render the marker at each angle and measure bit accuracy;
/// `theta_decode` is the largest angle at or above the threshold.
pub fn angle_sweep(
    set: &SplatSet,
    truth: &BitGrid,
    params: &SweepParams,
    marker_name: &str,
) -> Result<(SweepReport, Vec<(f64, ImageBuffer)>)> {
    if params.angles.is_empty() {
        return Err(Error::Config("angle list is empty".into()));
    }
    if params
        .angles
        .windows(2)
        .any(|w| w[1] <= w[0])
        || params.angles.iter().any(|&a| !(0.0..90.0).contains(&a))
    {
        return Err(Error::Config(
            "angles must be strictly increasing within [0, 90)".into(),
        ));
    }
    let mut records = Vec::with_capacity(params.angles.len());
    let mut frames = Vec::new();
    let mut theta_decode = None;
    for &theta in &params.angles {
        let cam = marker_camera(
            params.resolution.0,
            params.resolution.1,
            params.focal_px,
            params.distance,
            theta,
            params.azimuth,
        )?;
        let img = render(set, &cam, &params.render_cfg)?;
        let accuracy = bit_readback(&img, &cam, &set.plane, truth)?;
        let decodable = accuracy >= params.decode_threshold;
        if decodable {
            theta_decode = Some(theta);
        }
        records.push(SweepAngle {
            theta,
            bit_accuracy: accuracy,
            decodable,
        });
        if params.collect_frames {
            frames.push((theta, img));
        }
    }
    Ok((
        SweepReport {
            marker: marker_name.to_string(),
            config: set.meta.config,
            distance: params.distance,
            azimuth: params.azimuth,
            focal_px: params.focal_px,
            resolution: [params.resolution.0, params.resolution.1],
            decode_threshold: params.decode_threshold,
            primitive_count: set.len(),
            angles: records,
            theta_decode,
            construction_time_s: None,
        },
        frames,
    ))
}

/// Primitive count and construction wall-clock (partition plus splat
/// generation, no i/o) for a marker under a config.
pub fn report_counts_and_time(
    grid: &BitGrid,
    cfg: &ApproxConfig,
    colors: PartitionColors,
) -> Result<(usize, f64)> {
    let start = std::time::Instant::now();
    let part = partition_marker(grid, colors)?;
    let set = marker_to_splats(&part, cfg, &MarkerPlane::default(), "timing")?;
    let elapsed = start.elapsed().as_secs_f64();
    Ok((set.len(), elapsed))
}

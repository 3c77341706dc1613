//! Expansion of partition rectangles into planar Gaussian mixtures.
//!
//! Each rectangle becomes a multi-level mixture: a single anisotropic
//! seed at the center (level 0), then per level l >= 1 four mirrored
//! corner Gaussians at the level offset together with arm Gaussians
//! marching toward them, so that mass concentrates near the rectangle
//! edges while the interior stays solid. With mirror deduplication off
//! and density 1 the per-rectangle count is 4L + 2^(L+2) - 11.

mod ply;

pub use ply::{export_ply, import_ply};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::PartitionResult;

/// How many refinement levels a rectangle receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelPolicy {
    /// One fixed level count for every rectangle.
    Fixed(u32),
    /// Per-rectangle levels: the smallest L whose outermost corner
    /// Gaussians reach the rectangle's edge cells (single-cell
    /// rectangles need only their seed). Keeps large markers compact
    /// without sacrificing module readability.
    Adaptive,
}

impl LevelPolicy {
    pub fn levels_for(&self, max_dim_cells: i64) -> u32 {
        match *self {
            LevelPolicy::Fixed(l) => l,
            LevelPolicy::Adaptive => {
                // smallest L with max_dim * 2^-L <= 0.654: the corner
                // Gaussians then land within 0.707 sigma of the edge-cell
                // centers per axis, so even diagonal corner cells stay
                // solidly covered (their Mahalanobis distance sums both
                // axes)
                let mut l = 1;
                while (max_dim_cells as f64) * 0.5f64.powi(l as i32) > 0.654 && l < 6 {
                    l += 1;
                }
                l
            }
        }
    }
}

/// Mixture construction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxConfig {
    pub levels: LevelPolicy,
    /// Density modifier rho >= 1: the level-0 seed is replicated rho
    /// times to keep the interior solid under blending.
    pub density: u32,
    /// Render cutoff gamma shared between construction and rasterizer.
    pub cutoff: f64,
    /// Drop arm Gaussians that land exactly on a mirror axis twice.
    pub dedup_mirrors: bool,
    /// Opacity assigned to every generated splat.
    pub base_opacity: f64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            levels: LevelPolicy::Adaptive,
            density: 1,
            cutoff: 3.0,
            dedup_mirrors: true,
            base_opacity: 0.999,
        }
    }
}

impl ApproxConfig {
    pub fn validate(&self) -> Result<()> {
        if let LevelPolicy::Fixed(l) = self.levels {
            if l < 1 {
                return Err(Error::Config("levels must be >= 1".into()));
            }
        }
        if self.density < 1 {
            return Err(Error::Config("density must be >= 1".into()));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::Config("cutoff must be positive".into()));
        }
        if !(self.base_opacity > 0.0 && self.base_opacity <= 1.0) {
            return Err(Error::Config("opacity must be in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Axis-aligned Gaussian in marker-plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarGaussian {
    pub mean: [f64; 2],
    pub sigma: [f64; 2],
    pub color: f64,
    pub opacity: f64,
}

/// Rectangle in plane coordinates: center and positive half-sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneRect {
    pub center: [f64; 2],
    pub half: [f64; 2],
    pub color: f64,
}

/// Oriented planar Gaussian primitive in world space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian2D {
    pub center: [f64; 3],
    pub tangent_u: [f64; 3],
    pub tangent_v: [f64; 3],
    /// Standard deviations along the tangents.
    pub scale: [f64; 2],
    /// Grayscale color in [0, 1].
    pub color: f64,
    pub opacity: f64,
}

impl Gaussian2D {
    pub fn normal(&self) -> [f64; 3] {
        cross(self.tangent_u, self.tangent_v)
    }

    pub fn validate(&self) -> Result<()> {
        let nu = dot(self.tangent_u, self.tangent_u).sqrt();
        let nv = dot(self.tangent_v, self.tangent_v).sqrt();
        let uv = dot(self.tangent_u, self.tangent_v);
        if (nu - 1.0).abs() > 1e-9 || (nv - 1.0).abs() > 1e-9 || uv.abs() > 1e-9 {
            return Err(Error::Dimension(
                "tangent frame is not orthonormal".into(),
            ));
        }
        if !(self.scale[0] > 0.0 && self.scale[1] > 0.0)
            || !self.scale[0].is_finite()
            || !self.scale[1].is_finite()
        {
            return Err(Error::Dimension("scales must be positive finite".into()));
        }
        Ok(())
    }
}

/// Plane the marker lives on: origin plus an orthonormal tangent basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkerPlane {
    pub origin: [f64; 3],
    pub u: [f64; 3],
    pub v: [f64; 3],
}

impl Default for MarkerPlane {
    fn default() -> Self {
        MarkerPlane {
            origin: [0.0, 0.0, 0.0],
            u: [1.0, 0.0, 0.0],
            v: [0.0, 1.0, 0.0],
        }
    }
}

impl MarkerPlane {
    pub fn normal(&self) -> [f64; 3] {
        cross(self.u, self.v)
    }

    /// Lift plane coordinates to a world point.
    pub fn lift(&self, p: [f64; 2]) -> [f64; 3] {
        [
            self.origin[0] + p[0] * self.u[0] + p[1] * self.v[0],
            self.origin[1] + p[0] * self.u[1] + p[1] * self.v[1],
            self.origin[2] + p[0] * self.u[2] + p[1] * self.v[2],
        ]
    }

    /// Signed distance of a world point from the plane.
    pub fn distance(&self, p: [f64; 3]) -> f64 {
        let n = self.normal();
        let d = [
            p[0] - self.origin[0],
            p[1] - self.origin[1],
            p[2] - self.origin[2],
        ];
        dot(n, d)
    }
}

/// Provenance and construction parameters carried with a splat set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplatMeta {
    pub source: String,
    pub config: ApproxConfig,
}

/// An ordered collection of splats on a common marker plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplatSet {
    pub plane: MarkerPlane,
    pub meta: SplatMeta,
    pub splats: Vec<Gaussian2D>,
}

impl SplatSet {
    pub fn len(&self) -> usize {
        self.splats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.splats.is_empty()
    }

    /// Deterministic JSON dump, one record per splat.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("splat set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("invalid splat json: {e}")))
    }
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Expand one rectangle into its Gaussian mixture. `levels` is the
/// resolved level count for this rectangle.
pub fn rect_to_gaussians(rect: &PlaneRect, levels: u32, cfg: &ApproxConfig) -> Vec<PlanarGaussian> {
    let gamma = cfg.cutoff;
    let (sx, sy) = (rect.half[0], rect.half[1]);
    let (cx, cy) = (rect.center[0], rect.center[1]);
    let mut out = Vec::new();
    let mut push = |mean: [f64; 2], sigma: [f64; 2]| {
        out.push(PlanarGaussian {
            mean,
            sigma,
            color: rect.color,
            opacity: cfg.base_opacity,
        });
    };

    // level 0: interior seed, replicated `density` times; replicas are
    // intentional duplicates and exempt from mirror deduplication
    let mut seeds = Vec::with_capacity(cfg.density as usize);
    for _ in 0..cfg.density {
        seeds.push(PlanarGaussian {
            mean: [cx, cy],
            sigma: [sx / gamma, sy / gamma],
            color: rect.color,
            opacity: cfg.base_opacity,
        });
    }

    for l in 1..levels {
        let scale = 1.0 - 0.5f64.powi(l as i32);
        let (dx, dy) = (sx * scale, sy * scale);
        let corner_sigma = [
            sx / (gamma * 2f64.powi(l as i32)),
            sy / (gamma * 2f64.powi(l as i32)),
        ];
        let arm_count = 1u32 << (l - 1);
        // mirror the first-quadrant set across both axes through the center
        for (mx, my) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            push([cx + mx * dx, cy + my * dy], corner_sigma);
            for i in 0..arm_count {
                let offset_x = dx * i as f64 / arm_count as f64;
                // horizontal arm: marches along x toward the corner
                push(
                    [cx + mx * offset_x, cy + my * dy],
                    [(sx - offset_x) / gamma, corner_sigma[1]],
                );
                let offset_y = dy * i as f64 / arm_count as f64;
                // vertical arm: marches along y
                push(
                    [cx + mx * dx, cy + my * offset_y],
                    [corner_sigma[0], (sy - offset_y) / gamma],
                );
            }
        }
    }

    if cfg.dedup_mirrors {
        dedup_means(&mut out, 1e-12);
    }
    seeds.extend(out);
    seeds
}

/// Remove later Gaussians whose means coincide with an earlier one
/// (mirror-axis duplicates).
fn dedup_means(gaussians: &mut Vec<PlanarGaussian>, tol: f64) {
    let mut kept: Vec<PlanarGaussian> = Vec::with_capacity(gaussians.len());
    for g in gaussians.iter() {
        let duplicate = kept.iter().any(|k| {
            (k.mean[0] - g.mean[0]).abs() <= tol && (k.mean[1] - g.mean[1]).abs() <= tol
        });
        if !duplicate {
            kept.push(*g);
        }
    }
    *gaussians = kept;
}

/// Per-rectangle splat count under the construction rules.
pub fn expected_rect_count(levels: u32, density: u32, dedup_mirrors: bool) -> usize {
    let l = levels as usize;
    let base = 4 * l + (1usize << (l + 2)) - 11;
    let deduped = if dedup_mirrors { base - 4 * (l - 1) } else { base };
    deduped + (density as usize - 1)
}

/// Assemble the full splat set for a partitioned marker. The grid maps
/// to a square of side 2 on the plane (cell side 2/max(w,h)), row 0 at
/// the top edge (+v), column 0 at the left edge (-u). Dark rectangles
/// keep color 0, light ones color 1.
pub fn marker_to_splats(
    part: &PartitionResult,
    cfg: &ApproxConfig,
    plane: &MarkerPlane,
    source: &str,
) -> Result<SplatSet> {
    cfg.validate()?;
    let (w, h) = (part.grid_width as f64, part.grid_height as f64);
    let side = 2.0 / w.max(h);
    let mut splats = Vec::new();
    for rect in part.rects() {
        let center_cells = [
            (rect.x0 + rect.x1) as f64 / 2.0,
            (rect.y0 + rect.y1) as f64 / 2.0,
        ];
        let plane_rect = PlaneRect {
            center: [
                (center_cells[0] - w / 2.0) * side,
                (h / 2.0 - center_cells[1]) * side,
            ],
            half: [
                rect.width() as f64 / 2.0 * side,
                rect.height() as f64 / 2.0 * side,
            ],
            color: rect.intensity,
        };
        let levels = cfg.levels.levels_for(rect.width().max(rect.height()));
        for g in rect_to_gaussians(&plane_rect, levels, cfg) {
            splats.push(Gaussian2D {
                center: plane.lift(g.mean),
                tangent_u: plane.u,
                tangent_v: plane.v,
                scale: g.sigma,
                color: g.color,
                opacity: g.opacity,
            });
        }
    }
    Ok(SplatSet {
        plane: *plane,
        meta: SplatMeta {
            source: source.to_string(),
            config: *cfg,
        },
        splats,
    })
}

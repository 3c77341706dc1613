//! CPU rasterizer for planar Gaussian splats under a pinhole camera.
//!
//! Every pixel casts a ray through its center, intersects it with each
//! candidate splat's plane, sorts the hits by intersection depth (ties
//! by splat index, so replicated seeds composite deterministically) and
//! alpha-blends front to back onto the background. Candidate lists come
//! from binning conservative screen-space bounding boxes of the gamma-
//! sigma splat supports into tiles; contributions outside the support
//! are exactly zero, so the culling does not change the image. The
//! whole render is a pure single-threaded function of its inputs and is
//! reproducible bit for bit.

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::splat::{cross, dot, Gaussian2D, SplatSet};

/// World-to-camera rigid transform; `x_cam = rotation * x_world +
/// translation`, camera looks along +z with +y down the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl Pose {
    pub fn camera_center(&self) -> [f64; 3] {
        let r = &self.rotation;
        let t = self.translation;
        // -R^T t
        [
            -(r[0][0] * t[0] + r[1][0] * t[1] + r[2][0] * t[2]),
            -(r[0][1] * t[0] + r[1][1] * t[1] + r[2][1] * t[2]),
            -(r[0][2] * t[0] + r[1][2] * t[1] + r[2][2] * t[2]),
        ]
    }

    /// Optical axis direction in world coordinates (camera +z).
    pub fn forward(&self) -> [f64; 3] {
        self.rotation[2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub pose: Pose,
}

impl Camera {
    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::Config("focal lengths must be positive".into()));
        }
        if self.cx < 0.0
            || self.cx > self.width as f64
            || self.cy < 0.0
            || self.cy > self.height as f64
        {
            return Err(Error::Config("principal point outside image".into()));
        }
        let r = &self.pose.rotation;
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                let d = dot(r[i], r[j]);
                if (d - expect).abs() > 1e-9 {
                    return Err(Error::Config("rotation is not orthonormal".into()));
                }
            }
        }
        Ok(())
    }

    fn to_camera(&self, p: [f64; 3]) -> [f64; 3] {
        let r = &self.pose.rotation;
        let t = self.pose.translation;
        [
            r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2] + t[0],
            r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2] + t[1],
            r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2] + t[2],
        ]
    }

    /// Continuous image coordinates of a world point (pixel (i, j)
    /// covers [i, i+1] x [j, j+1]); `None` behind the camera.
    pub fn project(&self, p: [f64; 3]) -> Option<(f64, f64)> {
        let c = self.to_camera(p);
        if c[2] <= 1e-12 {
            return None;
        }
        Some((
            self.fx * c[0] / c[2] + self.cx,
            self.fy * c[1] / c[2] + self.cy,
        ))
    }

    /// World-space ray through the center of pixel (i, j): unit
    /// direction from the camera center.
    pub fn pixel_ray(&self, i: usize, j: usize) -> ([f64; 3], [f64; 3]) {
        let dx = (i as f64 + 0.5 - self.cx) / self.fx;
        let dy = (j as f64 + 0.5 - self.cy) / self.fy;
        let norm = (dx * dx + dy * dy + 1.0).sqrt();
        let d_cam = [dx / norm, dy / norm, 1.0 / norm];
        let r = &self.pose.rotation;
        // R^T * d_cam
        let dir = [
            r[0][0] * d_cam[0] + r[1][0] * d_cam[1] + r[2][0] * d_cam[2],
            r[0][1] * d_cam[0] + r[1][1] * d_cam[1] + r[2][1] * d_cam[2],
            r[0][2] * d_cam[0] + r[1][2] * d_cam[1] + r[2][2] * d_cam[2],
        ];
        (self.pose.camera_center(), dir)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderConfig {
    /// Grayscale the remaining transmittance composites onto.
    pub background: f64,
    /// Mahalanobis cutoff shared with the splat construction.
    pub cutoff: f64,
    /// Stop blending once transmittance falls below this.
    pub alpha_epsilon: f64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            background: 1.0,
            cutoff: 3.0,
            alpha_epsilon: 1e-4,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.background) {
            return Err(Error::Config("background must be in [0, 1]".into()));
        }
        if !(self.cutoff > 0.0) {
            return Err(Error::Config("cutoff must be positive".into()));
        }
        if !(self.alpha_epsilon > 0.0 && self.alpha_epsilon < 1.0) {
            return Err(Error::Config("alpha_epsilon must be in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Camera pose on a sphere of `distance` around the plane origin:
/// `theta` is the angle between optical axis and plane normal (+z),
/// zero means fronto-parallel; at `phi` = 0 the camera tilts toward +x
/// and the marker's +y points up in the image.
pub fn pose_from_view(distance: f64, theta_deg: f64, phi_deg: f64) -> Result<Pose> {
    if !(0.0..90.0).contains(&theta_deg) {
        return Err(Error::Config(format!(
            "view angle must be in [0, 90), got {theta_deg}"
        )));
    }
    if !(distance > 0.0) {
        return Err(Error::Config("distance must be positive".into()));
    }
    let theta = theta_deg.to_radians();
    let (st, ct) = (theta.sin(), theta.cos());
    // camera axes in world coordinates, before azimuth
    let cam_x = [ct, 0.0, -st];
    let cam_y = [0.0, -1.0, 0.0];
    let cam_z = [-st, 0.0, -ct];
    let center = [distance * st, 0.0, distance * ct];

    let phi = phi_deg.to_radians();
    let (sp, cp) = (phi.sin(), phi.cos());
    let rot_z = |v: [f64; 3]| [cp * v[0] - sp * v[1], sp * v[0] + cp * v[1], v[2]];
    let (cam_x, cam_y, cam_z) = (rot_z(cam_x), rot_z(cam_y), rot_z(cam_z));
    let center = rot_z(center);

    let rotation = [cam_x, cam_y, cam_z];
    // t = -R c
    let translation = [
        -dot(cam_x, center),
        -dot(cam_y, center),
        -dot(cam_z, center),
    ];
    Ok(Pose {
        rotation,
        translation,
    })
}

/// Intrinsics for rendering the 2x2 marker plane: principal point at
/// the image center, focal `focal_px`.
pub fn marker_camera(
    width: usize,
    height: usize,
    focal_px: f64,
    distance: f64,
    theta_deg: f64,
    phi_deg: f64,
) -> Result<Camera> {
    let cam = Camera {
        fx: focal_px,
        fy: focal_px,
        cx: width as f64 / 2.0,
        cy: height as f64 / 2.0,
        width,
        height,
        pose: pose_from_view(distance, theta_deg, phi_deg)?,
    };
    cam.validate()?;
    Ok(cam)
}

/// Default sweep distance: three marker-plane diagonals, which keeps the
/// full 2x2 plane visible at every supported angle with the default
/// focal length.
pub fn default_view_distance() -> f64 {
    6.0 * 2f64.sqrt()
}

/// Default focal length in pixels for a given resolution: fills the
/// frame without clipping the plane at any supported angle (at 85
/// degrees the near edge subtends 2 * focal / (distance - 1) pixels,
/// still inside the image at this scale).
pub fn default_focal(width: usize, height: usize) -> f64 {
    3.0 * width.max(height) as f64
}

/// Ray-plane intersection in splat-local coordinates; `None` when the
/// ray is parallel to the plane or the hit lies behind the origin.
pub fn ray_splat_intersect(
    origin: [f64; 3],
    dir: [f64; 3],
    splat: &Gaussian2D,
) -> Option<(f64, f64, f64)> {
    let n = cross(splat.tangent_u, splat.tangent_v);
    let denom = dot(dir, n);
    if denom.abs() < 1e-12 {
        return None;
    }
    let offset = [
        splat.center[0] - origin[0],
        splat.center[1] - origin[1],
        splat.center[2] - origin[2],
    ];
    let t = dot(offset, n) / denom;
    if t <= 0.0 {
        return None;
    }
    let hit = [
        origin[0] + t * dir[0] - splat.center[0],
        origin[1] + t * dir[1] - splat.center[1],
        origin[2] + t * dir[2] - splat.center[2],
    ];
    Some((dot(hit, splat.tangent_u), dot(hit, splat.tangent_v), t))
}

/// Gaussian-modulated opacity at local coordinates, with hard cutoff.
pub fn splat_alpha(u: f64, v: f64, splat: &Gaussian2D, cutoff: f64) -> f64 {
    let q = (u / splat.scale[0]).powi(2) + (v / splat.scale[1]).powi(2);
    if q > cutoff * cutoff {
        0.0
    } else {
        splat.opacity * (-q / 2.0).exp()
    }
}

/// Conservative pixel-space bounding box of a splat's support, or None
/// when the splat cannot contribute (fully behind the camera) or must be
/// tested everywhere (support crosses the camera plane).
enum SplatBounds {
    Box { x0: usize, y0: usize, x1: usize, y1: usize },
    Everywhere,
    Nowhere,
}

fn splat_bounds(cam: &Camera, splat: &Gaussian2D, cutoff: f64) -> SplatBounds {
    let eu = cutoff * splat.scale[0];
    let ev = cutoff * splat.scale[1];
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let mut behind = 0;
    for (su, sv) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
        let corner = [
            splat.center[0] + su * eu * splat.tangent_u[0] + sv * ev * splat.tangent_v[0],
            splat.center[1] + su * eu * splat.tangent_u[1] + sv * ev * splat.tangent_v[1],
            splat.center[2] + su * eu * splat.tangent_u[2] + sv * ev * splat.tangent_v[2],
        ];
        match cam.project(corner) {
            Some((x, y)) => {
                min_x = min_x.min(x);
                max_x = max_x.max(x);
                min_y = min_y.min(y);
                max_y = max_y.max(y);
            }
            None => behind += 1,
        }
    }
    if behind == 4 {
        return SplatBounds::Nowhere;
    }
    if behind > 0 {
        // support straddles the camera plane; no reliable screen bound
        return SplatBounds::Everywhere;
    }
    // pixel (i, j) samples at (i + 0.5, j + 0.5)
    let x0 = (min_x - 0.5).ceil().max(0.0);
    let y0 = (min_y - 0.5).ceil().max(0.0);
    let x1 = (max_x - 0.5).floor();
    let y1 = (max_y - 0.5).floor();
    if x1 < x0 || y1 < y0 || x0 >= cam.width as f64 || y0 >= cam.height as f64 {
        return SplatBounds::Nowhere;
    }
    SplatBounds::Box {
        x0: x0 as usize,
        y0: y0 as usize,
        x1: (x1 as usize).min(cam.width - 1),
        y1: (y1 as usize).min(cam.height - 1),
    }
}

const TILE: usize = 32;

/// Render the splat set to a grayscale image.
pub fn render(set: &SplatSet, cam: &Camera, cfg: &RenderConfig) -> Result<ImageBuffer> {
    cam.validate()?;
    cfg.validate()?;

    let tiles_x = cam.width.div_ceil(TILE);
    let tiles_y = cam.height.div_ceil(TILE);
    let mut tile_lists: Vec<Vec<u32>> = vec![Vec::new(); tiles_x * tiles_y];
    let mut everywhere: Vec<u32> = Vec::new();
    for (idx, splat) in set.splats.iter().enumerate() {
        match splat_bounds(cam, splat, cfg.cutoff) {
            SplatBounds::Nowhere => {}
            SplatBounds::Everywhere => everywhere.push(idx as u32),
            SplatBounds::Box { x0, y0, x1, y1 } => {
                for ty in y0 / TILE..=y1 / TILE {
                    for tx in x0 / TILE..=x1 / TILE {
                        tile_lists[ty * tiles_x + tx].push(idx as u32);
                    }
                }
            }
        }
    }

    let mut img = ImageBuffer::new_gray(cam.width, cam.height, cfg.background);
    let mut hits: Vec<(f64, u32, f64)> = Vec::new();
    for j in 0..cam.height {
        for i in 0..cam.width {
            let (origin, dir) = cam.pixel_ray(i, j);
            hits.clear();
            let tile = &tile_lists[(j / TILE) * tiles_x + i / TILE];
            for &idx in tile.iter().chain(everywhere.iter()) {
                let splat = &set.splats[idx as usize];
                if let Some((u, v, depth)) = ray_splat_intersect(origin, dir, splat) {
                    let alpha = splat_alpha(u, v, splat, cfg.cutoff);
                    if alpha > 0.0 {
                        hits.push((depth, idx, alpha));
                    }
                }
            }
            if hits.is_empty() {
                continue;
            }
            hits.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut color = 0.0;
            let mut transmittance = 1.0;
            for &(_, idx, alpha) in hits.iter() {
                color += set.splats[idx as usize].color * alpha * transmittance;
                transmittance *= 1.0 - alpha;
                if transmittance < cfg.alpha_epsilon {
                    break;
                }
            }
            color += cfg.background * transmittance;
            img.set(i, j, color.clamp(0.0, 1.0));
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splat::{ApproxConfig, MarkerPlane, SplatMeta};

    fn plain_splat(center: [f64; 3], scale: [f64; 2], color: f64, opacity: f64) -> Gaussian2D {
        Gaussian2D {
            center,
            tangent_u: [1.0, 0.0, 0.0],
            tangent_v: [0.0, 1.0, 0.0],
            scale,
            color,
            opacity,
        }
    }

    fn set_of(splats: Vec<Gaussian2D>) -> SplatSet {
        SplatSet {
            plane: MarkerPlane::default(),
            meta: SplatMeta {
                source: "test".into(),
                config: ApproxConfig::default(),
            },
            splats,
        }
    }

    #[test]
    fn ray_at_center_hits_origin_of_local_frame() {
        let s = plain_splat([0.0, 0.0, 0.0], [0.1, 0.1], 0.0, 1.0);
        let (u, v, depth) = ray_splat_intersect([0.0, 0.0, 5.0], [0.0, 0.0, -1.0], &s).unwrap();
        assert_eq!((u, v), (0.0, 0.0));
        assert_eq!(depth, 5.0);
    }

    #[test]
    fn offset_ray_reads_local_u() {
        let s = plain_splat([0.0, 0.0, 0.0], [0.1, 0.1], 0.0, 1.0);
        let delta = 0.3;
        let (u, v, _) = ray_splat_intersect([delta, 0.0, 5.0], [0.0, 0.0, -1.0], &s).unwrap();
        assert!((u - delta).abs() < 1e-12);
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn parallel_ray_misses() {
        let s = plain_splat([0.0, 0.0, 0.0], [0.1, 0.1], 0.0, 1.0);
        assert!(ray_splat_intersect([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], &s).is_none());
        // hit behind the origin
        assert!(ray_splat_intersect([0.0, 0.0, 5.0], [0.0, 0.0, 1.0], &s).is_none());
    }

    #[test]
    fn alpha_formula() {
        let s = plain_splat([0.0; 3], [0.2, 0.4], 0.0, 0.999);
        assert_eq!(splat_alpha(0.0, 0.0, &s, 3.0), 0.999);
        let s1 = plain_splat([0.0; 3], [0.2, 0.4], 0.0, 1.0);
        let a = splat_alpha(0.2, 0.0, &s1, 3.0);
        assert!((a - (-0.5f64).exp()).abs() < 1e-12, "one sigma: {a}");
        // hard cutoff
        let q_edge = 3.0 * 0.2 * (1.0 + 1e-9);
        assert_eq!(splat_alpha(q_edge, 0.0, &s1, 3.0), 0.0);
    }

    #[test]
    fn empty_set_renders_background() {
        let cam = marker_camera(32, 24, 48.0, 5.0, 0.0, 0.0).unwrap();
        let cfg = RenderConfig {
            background: 0.25,
            ..RenderConfig::default()
        };
        let img = render(&set_of(vec![]), &cam, &cfg).unwrap();
        assert!(img.samples().iter().all(|&s| s == 0.25));
    }

    #[test]
    fn single_splat_center_pixel_matches_closed_form() {
        // odd resolution puts a pixel center exactly on the optical axis
        let cam = marker_camera(65, 65, 100.0, 5.0, 0.0, 0.0).unwrap();
        let alpha = 0.999;
        let set = set_of(vec![plain_splat([0.0, 0.0, 0.0], [0.2, 0.2], 0.0, alpha)]);
        let img = render(&set, &cam, &RenderConfig::default()).unwrap();
        let center = img.get(32, 32);
        let expect = 1.0 - alpha; // 0*alpha + bg*(1-alpha)
        assert!((center - expect).abs() < 1e-6, "{center} vs {expect}");
    }

    #[test]
    fn disjoint_splats_commute() {
        let a = plain_splat([-0.5, 0.0, 0.0], [0.05, 0.05], 0.2, 0.9);
        let b = plain_splat([0.5, 0.0, 0.0], [0.05, 0.05], 0.8, 0.9);
        let cam = marker_camera(64, 64, 80.0, 4.0, 20.0, 0.0).unwrap();
        let img_ab = render(&set_of(vec![a, b]), &cam, &RenderConfig::default()).unwrap();
        let img_ba = render(&set_of(vec![b, a]), &cam, &RenderConfig::default()).unwrap();
        assert_eq!(img_ab, img_ba);
    }

    #[test]
    fn output_stays_in_unit_range() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let splats: Vec<Gaussian2D> = (0..50)
            .map(|_| {
                plain_splat(
                    [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0],
                    [rng.gen_range(0.01..0.5), rng.gen_range(0.01..0.5)],
                    rng.gen_range(0.0..1.0),
                    rng.gen_range(0.1..1.0),
                )
            })
            .collect();
        let cam = marker_camera(48, 48, 60.0, 4.0, 35.0, 120.0).unwrap();
        let img = render(&set_of(splats), &cam, &RenderConfig::default()).unwrap();
        assert!(img
            .samples()
            .iter()
            .all(|&s| (0.0..=1.0).contains(&s) && s.is_finite()));
    }

    #[test]
    fn pose_fronto_parallel_sits_on_axis() {
        let pose = pose_from_view(7.0, 0.0, 0.0).unwrap();
        let c = pose.camera_center();
        assert!((c[0] - 0.0).abs() < 1e-12);
        assert!((c[1] - 0.0).abs() < 1e-12);
        assert!((c[2] - 7.0).abs() < 1e-12);
        // looking along -z
        assert!((pose.forward()[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pose_angle_matches_normal_dot() {
        let pose = pose_from_view(5.0, 60.0, 0.0).unwrap();
        let n = [0.0, 0.0, 1.0];
        let d = dot(pose.forward(), n).abs();
        assert!((d - 0.5).abs() < 1e-12, "cos 60 = 0.5, got {d}");
    }

    #[test]
    fn pose_rejects_90_and_beyond() {
        assert!(pose_from_view(5.0, 90.0, 0.0).is_err());
        assert!(pose_from_view(5.0, 120.0, 0.0).is_err());
        assert!(pose_from_view(5.0, 89.9, 0.0).is_ok());
    }

    #[test]
    fn tilt_foreshortens_by_cosine() {
        let theta = 80.0f64;
        let cam = marker_camera(801, 801, 1000.0, 8.0, theta, 0.0).unwrap();
        let eps = 1e-4;
        // displacement along the tilt direction (+x) vs across it (+y)
        let (ox, oy) = cam.project([0.0, 0.0, 0.0]).unwrap();
        let (px, py) = cam.project([eps, 0.0, 0.0]).unwrap();
        let (qx, qy) = cam.project([0.0, eps, 0.0]).unwrap();
        let along = ((px - ox).powi(2) + (py - oy).powi(2)).sqrt();
        let across = ((qx - ox).powi(2) + (qy - oy).powi(2)).sqrt();
        let ratio = along / across;
        let expect = theta.to_radians().cos();
        assert!(
            (ratio - expect).abs() < 1e-3,
            "foreshortening {ratio} vs cos(theta) = {expect}"
        );
    }

    #[test]
    fn marker_y_points_up_in_image() {
        let cam = marker_camera(100, 100, 120.0, 6.0, 30.0, 0.0).unwrap();
        let (_, y_top) = cam.project([0.0, 0.5, 0.0]).unwrap();
        let (_, y_bottom) = cam.project([0.0, -0.5, 0.0]).unwrap();
        assert!(y_top < y_bottom, "+y must project to smaller row index");
    }
}

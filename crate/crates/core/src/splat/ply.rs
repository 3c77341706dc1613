//! Binary PLY interchange using the field layout common to Gaussian
//! splatting viewers.
//!
//! One `vertex` element per splat, all properties `float` (little
//! endian), in this order:
//!
//! | property              | encoding                                      |
//! |-----------------------|-----------------------------------------------|
//! | `x y z`               | splat center                                  |
//! | `nx ny nz`            | written as zeros                              |
//! | `f_dc_0 f_dc_1 f_dc_2`| zeroth-order SH: `(color - 0.5) / 0.2820948`  |
//! | `opacity`             | inverse sigmoid, clamped to [-12, 12]         |
//! | `scale_0 scale_1`     | `ln` of the tangent standard deviations       |
//! | `rot_0..rot_3`        | quaternion (w, x, y, z) of [t_u t_v t_u x t_v]|
//!
//! Import accepts any property order and ignores extras; missing
//! required properties are reported by name.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{cross, ApproxConfig, Gaussian2D, MarkerPlane, SplatMeta, SplatSet};
use crate::error::{Error, Result};

const SH_C0: f64 = 0.28209479177387814;
const OPACITY_CLAMP: f64 = 12.0;

const PROPERTIES: [&str; 16] = [
    "x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2", "opacity", "scale_0",
    "scale_1", "rot_0", "rot_1", "rot_2", "rot_3",
];

fn inverse_sigmoid(a: f64) -> f64 {
    (a / (1.0 - a)).ln().clamp(-OPACITY_CLAMP, OPACITY_CLAMP)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Quaternion (w, x, y, z) of the rotation whose columns are
/// [t_u, t_v, t_u x t_v], sign-canonicalized.
fn basis_to_quaternion(u: [f64; 3], v: [f64; 3]) -> [f64; 4] {
    let w = cross(u, v);
    // column-major rotation matrix entries m[row][col]
    let m = [
        [u[0], v[0], w[0]],
        [u[1], v[1], w[1]],
        [u[2], v[2], w[2]],
    ];
    let trace = m[0][0] + m[1][1] + m[2][2];
    let mut q = if trace > 0.0 {
        let s = (trace + 1.0).sqrt() * 2.0;
        [
            0.25 * s,
            (m[2][1] - m[1][2]) / s,
            (m[0][2] - m[2][0]) / s,
            (m[1][0] - m[0][1]) / s,
        ]
    } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
        let s = (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt() * 2.0;
        [
            (m[2][1] - m[1][2]) / s,
            0.25 * s,
            (m[0][1] + m[1][0]) / s,
            (m[0][2] + m[2][0]) / s,
        ]
    } else if m[1][1] > m[2][2] {
        let s = (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt() * 2.0;
        [
            (m[0][2] - m[2][0]) / s,
            (m[0][1] + m[1][0]) / s,
            0.25 * s,
            (m[1][2] + m[2][1]) / s,
        ]
    } else {
        let s = (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt() * 2.0;
        [
            (m[1][0] - m[0][1]) / s,
            (m[0][2] + m[2][0]) / s,
            (m[1][2] + m[2][1]) / s,
            0.25 * s,
        ]
    };
    let norm = (q.iter().map(|c| c * c).sum::<f64>()).sqrt();
    for c in &mut q {
        *c /= norm;
    }
    // canonical sign: first component of significant magnitude positive
    let lead = q.iter().find(|c| c.abs() > 1e-9).copied().unwrap_or(1.0);
    if lead < 0.0 {
        for c in &mut q {
            *c = -*c;
        }
    }
    q
}

/// Tangent columns of the rotation encoded by quaternion (w, x, y, z).
fn quaternion_to_basis(q: [f64; 4]) -> ([f64; 3], [f64; 3]) {
    let [w, x, y, z] = q;
    let u = [
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y + w * z),
        2.0 * (x * z - w * y),
    ];
    let v = [
        2.0 * (x * y - w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z + w * x),
    ];
    (u, v)
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Write the splat set as binary little-endian PLY.
pub fn export_ply(set: &SplatSet, path: &Path) -> Result<()> {
    let mut header = String::from("ply\nformat binary_little_endian 1.0\n");
    header.push_str(&format!("element vertex {}\n", set.splats.len()));
    for name in PROPERTIES {
        header.push_str(&format!("property float {name}\n"));
    }
    header.push_str("end_header\n");

    let mut data: Vec<u8> = header.into_bytes();
    data.reserve(set.splats.len() * PROPERTIES.len() * 4);
    for s in &set.splats {
        let q = basis_to_quaternion(s.tangent_u, s.tangent_v);
        let f_dc = (s.color - 0.5) / SH_C0;
        let fields: [f64; 16] = [
            s.center[0],
            s.center[1],
            s.center[2],
            0.0,
            0.0,
            0.0,
            f_dc,
            f_dc,
            f_dc,
            inverse_sigmoid(s.opacity),
            s.scale[0].ln(),
            s.scale[1].ln(),
            q[0],
            q[1],
            q[2],
            q[3],
        ];
        for f in fields {
            data.extend_from_slice(&(f as f32).to_le_bytes());
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&data).map_err(|e| Error::io(path, e))
}

/// Read a PLY written by [`export_ply`] or any file with a matching
/// vertex schema.
pub fn import_ply(path: &Path) -> Result<SplatSet> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let header_end = find_header_end(&bytes)
        .ok_or_else(|| Error::parse(path, 1, "missing end_header"))?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| Error::parse(path, 1, "header is not utf-8"))?;

    let mut lines = header.lines();
    if lines.next() != Some("ply") {
        return Err(Error::parse(path, 1, "expected magic 'ply'"));
    }
    let mut vertex_count: Option<usize> = None;
    let mut names: Vec<String> = Vec::new();
    let mut in_vertex = false;
    for (idx, line) in header.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["format", f, "1.0"] if *f == "binary_little_endian" => {}
            ["format", f, ..] => {
                return Err(Error::parse(path, idx + 1, format!("unsupported format {f}")))
            }
            ["comment", ..] => {}
            ["element", "vertex", n] => {
                vertex_count = Some(n.parse().map_err(|_| {
                    Error::parse(path, idx + 1, format!("bad vertex count {n}"))
                })?);
                in_vertex = true;
            }
            ["element", ..] => in_vertex = false,
            ["property", "float", name] if in_vertex => names.push((*name).to_string()),
            ["property", ty, ..] if in_vertex => {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("unsupported property type {ty}"),
                ))
            }
            ["end_header"] => break,
            _ => {}
        }
    }
    let count =
        vertex_count.ok_or_else(|| Error::parse(path, 1, "no vertex element in header"))?;

    let required = [
        "x", "y", "z", "f_dc_0", "opacity", "scale_0", "scale_1", "rot_0", "rot_1", "rot_2",
        "rot_3",
    ];
    let missing: Vec<String> = required
        .iter()
        .filter(|r| !names.iter().any(|n| n == *r))
        .map(|r| r.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::PlySchema(missing));
    }
    let col = |name: &str| names.iter().position(|n| n == name).unwrap();

    let stride = names.len() * 4;
    let data = &bytes[header_end..];
    if data.len() < count * stride {
        return Err(Error::parse(
            path,
            1,
            format!("vertex data truncated: {} of {} bytes", data.len(), count * stride),
        ));
    }
    let mut splats = Vec::with_capacity(count);
    for i in 0..count {
        let row = &data[i * stride..(i + 1) * stride];
        let field = |c: usize| {
            f32::from_le_bytes([row[c * 4], row[c * 4 + 1], row[c * 4 + 2], row[c * 4 + 3]]) as f64
        };
        let q = [
            field(col("rot_0")),
            field(col("rot_1")),
            field(col("rot_2")),
            field(col("rot_3")),
        ];
        let qn = (q.iter().map(|c| c * c).sum::<f64>()).sqrt();
        let q = [q[0] / qn, q[1] / qn, q[2] / qn, q[3] / qn];
        let (u, v) = quaternion_to_basis(q);
        // re-orthonormalize against f32 rounding
        let u = normalize(u);
        let vv = {
            let d = super::dot(v, u);
            normalize([v[0] - d * u[0], v[1] - d * u[1], v[2] - d * u[2]])
        };
        splats.push(Gaussian2D {
            center: [field(col("x")), field(col("y")), field(col("z"))],
            tangent_u: u,
            tangent_v: vv,
            scale: [field(col("scale_0")).exp(), field(col("scale_1")).exp()],
            color: (field(col("f_dc_0")) * SH_C0 + 0.5).clamp(0.0, 1.0),
            opacity: sigmoid(field(col("opacity"))),
        });
    }

    // refit the plane from the first splat; generated sets are planar
    let plane = splats
        .first()
        .map(|s| MarkerPlane {
            origin: s.center,
            u: s.tangent_u,
            v: s.tangent_v,
        })
        .unwrap_or_default();
    Ok(SplatSet {
        plane,
        meta: SplatMeta {
            source: format!("import:{}", path.display()),
            config: ApproxConfig::default(),
        },
        splats,
    })
}

fn find_header_end(bytes: &[u8]) -> Option<usize> {
    let needle = b"end_header\n";
    bytes
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + needle.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splat::LevelPolicy;

    fn sample_set() -> SplatSet {
        let plane = MarkerPlane::default();
        SplatSet {
            plane,
            meta: SplatMeta {
                source: "test".into(),
                config: ApproxConfig::default(),
            },
            splats: vec![
                Gaussian2D {
                    center: [0.25, -0.5, 0.0],
                    tangent_u: [1.0, 0.0, 0.0],
                    tangent_v: [0.0, 1.0, 0.0],
                    scale: [0.1, 0.02],
                    color: 0.0,
                    opacity: 0.999,
                },
                Gaussian2D {
                    center: [-0.125, 0.75, 0.0],
                    tangent_u: [0.0, 1.0, 0.0],
                    tangent_v: [0.0, 0.0, 1.0],
                    scale: [0.5, 0.25],
                    color: 1.0,
                    opacity: 0.5,
                },
            ],
        }
    }

    #[test]
    fn header_lists_all_documented_properties() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.ply");
        let mut set = sample_set();
        set.splats.truncate(1);
        export_ply(&set, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header = String::from_utf8_lossy(&bytes[..find_header_end(&bytes).unwrap()]).to_string();
        assert!(header.contains("element vertex 1"));
        for name in PROPERTIES {
            assert!(header.contains(&format!("property float {name}")), "{name}");
        }
    }

    #[test]
    fn round_trip_preserves_splats_to_1e6() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.ply");
        let set = sample_set();
        export_ply(&set, &path).unwrap();
        let back = import_ply(&path).unwrap();
        assert_eq!(back.len(), set.len());
        for (a, b) in set.splats.iter().zip(&back.splats) {
            for i in 0..3 {
                assert!((a.center[i] - b.center[i]).abs() < 1e-6);
                assert!((a.tangent_u[i] - b.tangent_u[i]).abs() < 1e-6);
                assert!((a.tangent_v[i] - b.tangent_v[i]).abs() < 1e-6);
            }
            assert!((a.scale[0] - b.scale[0]).abs() < 1e-6);
            assert!((a.scale[1] - b.scale[1]).abs() < 1e-6);
            assert!((a.color - b.color).abs() < 1e-6);
            assert!((a.opacity - b.opacity).abs() < 1e-6);
            b.validate().unwrap();
        }
    }

    #[test]
    fn full_opacity_clamps_at_twelve() {
        assert_eq!(inverse_sigmoid(1.0), 12.0);
        assert!((sigmoid(12.0) - 0.999994).abs() < 1e-6);
    }

    #[test]
    fn generated_marker_round_trips() {
        use crate::grid::{make_test_grid, TestShape};
        use crate::partition::{partition_marker, PartitionColors};
        let g = make_test_grid(TestShape::Plus, 3).unwrap();
        let part = partition_marker(&g, PartitionColors::Both).unwrap();
        let cfg = ApproxConfig {
            levels: LevelPolicy::Fixed(3),
            ..ApproxConfig::default()
        };
        let set = crate::splat::marker_to_splats(&part, &cfg, &MarkerPlane::default(), "plus")
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plus.ply");
        export_ply(&set, &path).unwrap();
        let back = import_ply(&path).unwrap();
        assert_eq!(back.len(), set.len());
        for (a, b) in set.splats.iter().zip(&back.splats) {
            assert!((a.color - b.color).abs() < 1e-6);
            assert!((a.scale[0] - b.scale[0]).abs() < 2e-6 * (1.0 + a.scale[0]));
        }
    }

    #[test]
    fn missing_properties_are_listed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ply");
        std::fs::write(
            &path,
            "ply\nformat binary_little_endian 1.0\nelement vertex 0\nproperty float x\nproperty float y\nend_header\n",
        )
        .unwrap();
        match import_ply(&path) {
            Err(Error::PlySchema(missing)) => {
                assert!(missing.contains(&"z".to_string()));
                assert!(missing.contains(&"opacity".to_string()));
                assert!(missing.contains(&"rot_3".to_string()));
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }
}

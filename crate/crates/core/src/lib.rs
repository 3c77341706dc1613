//! Training-free compilation of binary fiducial markers (AprilTags, QR
//! codes) into compact sets of planar 2D Gaussian splats, plus the CPU
//! rasterizer and readability harness used to verify them.
//!
//! The pipeline stages are:
//!
//! 1. **grid** – marker bitmap ingest (PBM, textgrid) and test fixtures.
//! 2. **partition** – connected components, boundary tracing into
//!    rectilinear polygons with holes, and a minimum partition into
//!    axis-aligned rectangles via independent concave-vertex chords
//!    (maximum bipartite matching + König vertex cover).
//! 3. **splat** – expansion of each rectangle into a multi-level
//!    anisotropic Gaussian mixture on the marker plane, with PLY/JSON
//!    export.
//! 4. **render** – pinhole-camera ray casting with exact per-pixel
//!    front-to-back alpha blending.
//! 5. **metrics / eval** – PSNR, SSIM, module-center bit readback, and
//!    viewing-angle sweeps.

pub mod error;
pub mod eval;
pub mod grid;
pub mod image;
pub mod metrics;
pub mod partition;
pub mod render;
pub mod splat;

pub use error::{Error, Result};
pub use grid::{load_bitgrid, make_test_grid, BitGrid, GridFormat, TestShape};
pub use image::{read_image, write_image, ImageBuffer, ImageFormat};

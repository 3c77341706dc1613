//! Float image buffers and binary PGM/PPM i/o.
//!
//! Samples are stored row-major in `[0, 1]`. Files are 8-bit with
//! maxval 255; a sample `s` encodes as `round(s * 255)`, so a write/read
//! round trip moves each sample by at most half a quantization step
//! (1/510).

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    PgmBinary,
    PpmBinary,
}

impl ImageBuffer {
    /// Uniform grayscale image.
    pub fn new_gray(width: usize, height: usize, fill: f64) -> Self {
        ImageBuffer {
            width,
            height,
            channels: 1,
            samples: vec![fill; width * height],
        }
    }

    pub fn new_rgb(width: usize, height: usize, fill: [f64; 3]) -> Self {
        let mut samples = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            samples.extend_from_slice(&fill);
        }
        ImageBuffer {
            width,
            height,
            channels: 3,
            samples,
        }
    }

    pub fn from_samples(
        width: usize,
        height: usize,
        channels: usize,
        samples: Vec<f64>,
    ) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::Dimension(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if samples.len() != width * height * channels {
            return Err(Error::Dimension(format!(
                "sample count {} does not match {width}x{height}x{channels}",
                samples.len()
            )));
        }
        if let Some(bad) = samples.iter().find(|s| !s.is_finite() || **s < 0.0 || **s > 1.0) {
            return Err(Error::Dimension(format!("sample {bad} outside [0, 1]")));
        }
        Ok(ImageBuffer {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// First channel at (x, y); the only channel for grayscale images.
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[(y * self.width + x) * self.channels]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        let base = (y * self.width + x) * self.channels;
        for c in 0..self.channels {
            self.samples[base + c] = value;
        }
    }

    /// Luminance at (x, y) using Rec. 601 weights for RGB images.
    pub fn luma(&self, x: usize, y: usize) -> f64 {
        let base = (y * self.width + x) * self.channels;
        if self.channels == 1 {
            self.samples[base]
        } else {
            0.299 * self.samples[base] + 0.587 * self.samples[base + 1] + 0.114 * self.samples[base + 2]
        }
    }

    /// Grayscale copy (luminance for RGB input).
    pub fn to_gray(&self) -> ImageBuffer {
        if self.channels == 1 {
            return self.clone();
        }
        let mut samples = Vec::with_capacity(self.width * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                samples.push(self.luma(x, y));
            }
        }
        ImageBuffer {
            width: self.width,
            height: self.height,
            channels: 1,
            samples,
        }
    }

    /// RGB copy (channel replication for grayscale input).
    pub fn to_rgb(&self) -> ImageBuffer {
        if self.channels == 3 {
            return self.clone();
        }
        let mut samples = Vec::with_capacity(self.width * self.height * 3);
        for &s in &self.samples {
            samples.extend_from_slice(&[s, s, s]);
        }
        ImageBuffer {
            width: self.width,
            height: self.height,
            channels: 3,
            samples,
        }
    }

    /// Bilinear sample at continuous image coordinates, where pixel (i, j)
    /// covers `[i, i+1] x [j, j+1]` with its center at `(i+0.5, j+0.5)`.
    /// Coordinates must lie within the image rectangle; edge samples clamp.
    /// Returns luminance for RGB images.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let clamp = |v: f64, hi: usize| v.max(0.0).min((hi - 1) as f64);
        let u = clamp(x - 0.5, self.width);
        let v = clamp(y - 0.5, self.height);
        let x0 = u.floor() as usize;
        let y0 = v.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = u - x0 as f64;
        let fy = v - y0 as f64;
        let s00 = self.luma(x0, y0);
        let s10 = self.luma(x1, y0);
        let s01 = self.luma(x0, y1);
        let s11 = self.luma(x1, y1);
        s00 * (1.0 - fx) * (1.0 - fy)
            + s10 * fx * (1.0 - fy)
            + s01 * (1.0 - fx) * fy
            + s11 * fx * fy
    }
}

fn quantize(s: f64) -> u8 {
    (s * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Write an 8-bit binary PGM (`P5`, grayscale) or PPM (`P6`, RGB).
pub fn write_image(img: &ImageBuffer, path: &Path, format: ImageFormat) -> Result<()> {
    let (magic, channels) = match format {
        ImageFormat::PgmBinary => ("P5", 1),
        ImageFormat::PpmBinary => ("P6", 3),
    };
    if img.channels != channels {
        return Err(Error::Dimension(format!(
            "{magic} requires {channels} channel(s), image has {}",
            img.channels
        )));
    }
    let mut out = format!("{magic}\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.samples.iter().map(|&s| quantize(s)));
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a binary PGM/PPM written by [`write_image`]; samples become byte/255.
pub fn read_image(path: &Path) -> Result<ImageBuffer> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(Error::parse(path, 1, "expected magic P5 or P6")),
    };
    let (width, height, maxval, offset) = crate::grid::pnm_header(path, &bytes)?;
    if maxval != 255 {
        return Err(Error::parse(path, 1, format!("unsupported maxval {maxval}")));
    }
    let data = &bytes[offset..];
    let expect = width * height * channels;
    if data.len() < expect {
        return Err(Error::parse(
            path,
            1,
            format!("truncated pixel data: {} bytes, expected {expect}", data.len()),
        ));
    }
    let samples = data[..expect].iter().map(|&b| b as f64 / 255.0).collect();
    ImageBuffer::from_samples(width, height, channels, samples)
}

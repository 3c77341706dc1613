//! Image quality metrics: PSNR and single-scale SSIM.

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

fn check_dims(a: &ImageBuffer, b: &ImageBuffer) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels() {
        return Err(Error::Dimension(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    Ok(())
}

/// Peak signal-to-noise ratio in decibels with MAX = 1.0; identical
/// inputs give `f64::INFINITY`.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    check_dims(a, b)?;
    let mse: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.samples().len() as f64;
    if mse == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(10.0 * (1.0 / mse).log10())
    }
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let half = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *v;
    }
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Separable valid-mode Gaussian filtering; output is
/// (w - 10) x (h - 10).
fn filter_valid(data: &[f64], w: usize, h: usize) -> Vec<f64> {
    let win = gaussian_window();
    let out_w = w - SSIM_WINDOW + 1;
    let out_h = h - SSIM_WINDOW + 1;
    // horizontal pass
    let mut tmp = vec![0.0; out_w * h];
    for y in 0..h {
        for x in 0..out_w {
            let mut acc = 0.0;
            for (k, wk) in win.iter().enumerate() {
                acc += wk * data[y * w + x + k];
            }
            tmp[y * out_w + x] = acc;
        }
    }
    // vertical pass
    let mut out = vec![0.0; out_w * out_h];
    for y in 0..out_h {
        for x in 0..out_w {
            let mut acc = 0.0;
            for (k, wk) in win.iter().enumerate() {
                acc += wk * tmp[(y + k) * out_w + x];
            }
            out[y * out_w + x] = acc;
        }
    }
    out
}

/// Mean structural similarity over an 11x11 Gaussian window
/// (sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1). RGB inputs are
/// converted to luminance first.
pub fn ssim(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    check_dims(a, b)?;
    if a.width() < SSIM_WINDOW || a.height() < SSIM_WINDOW {
        return Err(Error::Dimension(format!(
            "image {}x{} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} ssim window",
            a.width(),
            a.height()
        )));
    }
    let ga = a.to_gray();
    let gb = b.to_gray();
    let (w, h) = (a.width(), a.height());
    let xa = ga.samples();
    let xb = gb.samples();

    let sq = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| x * x).collect() };
    let prod: Vec<f64> = xa.iter().zip(xb).map(|(x, y)| x * y).collect();

    let mu_a = filter_valid(xa, w, h);
    let mu_b = filter_valid(xb, w, h);
    let ex_a2 = filter_valid(&sq(xa), w, h);
    let ex_b2 = filter_valid(&sq(xb), w, h);
    let ex_ab = filter_valid(&prod, w, h);

    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let mut total = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let var_a = ex_a2[i] - ma * ma;
        let var_b = ex_b2[i] - mb * mb;
        let cov = ex_ab[i] - ma * mb;
        total += (2.0 * ma * mb + c1) * (2.0 * cov + c2)
            / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
    }
    Ok(total / mu_a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn noise_image(w: usize, h: usize, seed: u64) -> ImageBuffer {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..w * h).map(|_| rng.gen_range(0.0..=1.0)).collect();
        ImageBuffer::from_samples(w, h, 1, samples).unwrap()
    }

    #[test]
    fn identical_images_have_infinite_psnr_and_unit_ssim() {
        let img = noise_image(64, 64, 3);
        assert_eq!(psnr(&img, &img).unwrap(), f64::INFINITY);
        assert_eq!(ssim(&img, &img).unwrap(), 1.0);
    }

    #[test]
    fn constant_offset_psnr_matches_closed_form() {
        let a = ImageBuffer::new_gray(32, 32, 100.0 / 255.0);
        let b = ImageBuffer::new_gray(32, 32, 116.0 / 255.0);
        let got = psnr(&a, &b).unwrap();
        let expect = 10.0 * (255.0f64 * 255.0 / (16.0 * 16.0)).log10();
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn black_vs_white_is_zero_db() {
        let a = ImageBuffer::new_gray(16, 16, 0.0);
        let b = ImageBuffer::new_gray(16, 16, 1.0);
        assert!((psnr(&a, &b).unwrap() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn psnr_and_ssim_are_symmetric() {
        let a = noise_image(32, 32, 5);
        let b = noise_image(32, 32, 6);
        assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
        assert_eq!(ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
    }

    #[test]
    fn negative_image_has_negative_ssim() {
        // half-dark / half-bright blocks against their negation: local
        // covariance is negative everywhere structure exists
        let mut samples = vec![0.0; 32 * 32];
        for y in 0..32 {
            for x in 0..32 {
                samples[y * 32 + x] = if x < 16 { 0.9 } else { 0.1 };
            }
        }
        let a = ImageBuffer::from_samples(32, 32, 1, samples.clone()).unwrap();
        let neg = ImageBuffer::from_samples(32, 32, 1, samples.iter().map(|s| 1.0 - s).collect())
            .unwrap();
        assert!(ssim(&a, &neg).unwrap() < 0.0);
    }

    #[test]
    fn independent_noise_has_near_zero_ssim() {
        let a = noise_image(256, 256, 101);
        let b = noise_image(256, 256, 202);
        let v = ssim(&a, &b).unwrap();
        assert!(v.abs() < 0.1, "ssim of independent noise: {v}");
    }

    #[test]
    fn small_images_rejected() {
        let a = ImageBuffer::new_gray(8, 8, 0.5);
        assert!(ssim(&a, &a).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = ImageBuffer::new_gray(16, 16, 0.5);
        let b = ImageBuffer::new_gray(16, 17, 0.5);
        assert!(matches!(psnr(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn rgb_inputs_use_luminance() {
        let a = ImageBuffer::new_rgb(32, 32, [0.2, 0.5, 0.9]);
        let b = ImageBuffer::new_rgb(32, 32, [0.2, 0.5, 0.9]);
        assert_eq!(ssim(&a, &b).unwrap(), 1.0);
    }
}

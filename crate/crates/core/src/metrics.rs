//! Image fidelity metrics on the `[0, 1]` range: MSRE, SSIM and PSNR.

use crate::error::{FmrError, Result};
use crate::image::{disk_mask, GrayImage};
use crate::scalar::Scalar;

/// Reported PSNR when the images are identical.
pub const PSNR_CAP: f64 = 99.0;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn same_dims<T: Scalar>(a: &GrayImage<T>, b: &GrayImage<T>) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(FmrError::DimMismatch(a.dims(), b.dims()));
    }
    Ok(())
}

/// Mean squared difference over the pixels of the inscribed disk.
pub fn mse_reconstruction_error<T: Scalar>(a: &GrayImage<T>, b: &GrayImage<T>) -> Result<f64> {
    same_dims(a, b)?;
    let dom = disk_mask(a);
    let (mut acc, mut count) = (0.0, 0usize);
    for row in 0..a.height() {
        for col in 0..a.width() {
            if dom.contains_pixel(col, row) {
                let d = a.get(col, row).as_f64() - b.get(col, row).as_f64();
                acc += d * d;
                count += 1;
            }
        }
    }
    Ok(acc / count.max(1) as f64)
}

/// `10 log10(1 / MSE)` over the whole image, capped at [`PSNR_CAP`].
pub fn psnr<T: Scalar>(a: &GrayImage<T>, b: &GrayImage<T>) -> Result<f64> {
    same_dims(a, b)?;
    let mse = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| (x.as_f64() - y.as_f64()).powi(2))
        .sum::<f64>()
        / a.pixels().len() as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP);
    }
    Ok((10.0 * (1.0 / mse).log10()).min(PSNR_CAP))
}

fn gaussian_kernel() -> Vec<f64> {
    let c = (SSIM_WINDOW / 2) as f64;
    let raw: Vec<f64> = (0..SSIM_WINDOW).map(|i| (-((i as f64 - c).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Valid-mode separable filtering; output is `(w - 10) x (h - 10)`.
fn filter(src: &[f64], w: usize, h: usize, k: &[f64]) -> Vec<f64> {
    let kw = k.len();
    let ow = w + 1 - kw;
    let oh = h + 1 - kw;
    let mut tmp = vec![0.0; ow * h];
    for r in 0..h {
        for c in 0..ow {
            tmp[r * ow + c] = (0..kw).map(|i| k[i] * src[r * w + c + i]).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = (0..kw).map(|i| k[i] * tmp[(r + i) * ow + c]).sum();
        }
    }
    out
}

/// Mean SSIM over `11 x 11` Gaussian windows (`σ = 1.5`) centred inside the
/// inscribed disk, with `C₁ = 0.01²` and `C₂ = 0.03²`.
pub fn ssim<T: Scalar>(a: &GrayImage<T>, b: &GrayImage<T>) -> Result<f64> {
    same_dims(a, b)?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(FmrError::TooSmall(format!("SSIM needs sides of at least {SSIM_WINDOW}, got {w}x{h}")));
    }
    let x: Vec<f64> = a.pixels().iter().map(|v| v.as_f64()).collect();
    let y: Vec<f64> = b.pixels().iter().map(|v| v.as_f64()).collect();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();
    let k = gaussian_kernel();
    let [mx, my, sxx, syy, sxy] = [&x, &y, &xx, &yy, &xy].map(|s| filter(s, w, h, &k));
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let dom = disk_mask(a);
    let half = SSIM_WINDOW / 2;
    let ow = w + 1 - SSIM_WINDOW;
    let (mut acc, mut count) = (0.0, 0usize);
    for (i, ((&ux, &uy), ((&vxx, &vyy), &vxy))) in mx.iter().zip(&my).zip(sxx.iter().zip(&syy).zip(&sxy)).enumerate() {
        let (c, r) = (i % ow + half, i / ow + half);
        if !dom.contains_pixel(c, r) {
            continue;
        }
        let vx = vxx - ux * ux;
        let vy = vyy - uy * uy;
        let cov = vxy - ux * uy;
        acc += ((2.0 * ux * uy + c1) * (2.0 * cov + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
        count += 1;
    }
    if count == 0 {
        return Err(FmrError::TooSmall("no SSIM window is centred inside the disk".into()));
    }
    Ok(acc / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn constant(v: f64) -> GrayImage<f64> {
        GrayImage::from_fn(32, 32, |_, _| v).unwrap()
    }

    #[test]
    fn msre_examples() {
        let p = synth::portrait::<f64>(32);
        assert_eq!(mse_reconstruction_error(&p, &p).unwrap(), 0.0);
        assert_eq!(mse_reconstruction_error(&constant(0.0), &constant(1.0)).unwrap(), 1.0);
        let board = GrayImage::from_fn(32, 32, |c, r| ((c + r) % 2) as f64).unwrap();
        let inverse = GrayImage::from_fn(32, 32, |c, r| 1.0 - ((c + r) % 2) as f64).unwrap();
        assert_eq!(mse_reconstruction_error(&board, &inverse).unwrap(), 1.0);
        assert!(matches!(
            mse_reconstruction_error(&p, &synth::portrait(16)),
            Err(FmrError::DimMismatch(..))
        ));
    }

    #[test]
    fn ssim_examples() {
        let p = synth::portrait::<f64>(64);
        assert!((ssim(&p, &p).unwrap() - 1.0).abs() < 1e-12);
        // (2·0.16 + C₁) / (0.68 + C₁) with zero variance on both sides
        let s = ssim(&constant(0.2), &constant(0.8)).unwrap();
        assert!((s - 0.470_666_078_517_865_0).abs() < 1e-12, "{s}");
        let q = synth::random_scene::<f64>(64, 4);
        assert_eq!(ssim(&p, &q).unwrap(), ssim(&q, &p).unwrap());
        let tiny = GrayImage::<f64>::zeros(8, 8).unwrap();
        assert!(matches!(ssim(&tiny, &tiny), Err(FmrError::TooSmall(_))));
    }

    #[test]
    fn psnr_examples() {
        let p = synth::portrait::<f64>(32);
        assert_eq!(psnr(&p, &p).unwrap(), PSNR_CAP);
        let a = constant(0.5);
        assert!((psnr(&a, &constant(0.6)).unwrap() - 20.0).abs() < 1e-9);
        let b = GrayImage::from_fn(32, 32, |_, _| 0.5 + 0.1f64.sqrt()).unwrap();
        assert!((psnr(&a, &b).unwrap() - 10.0).abs() < 1e-9);
    }
}

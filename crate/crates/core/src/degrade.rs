//! Seeded degradations: additive Gaussian noise and centre rotation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{FmrError, Result};
use crate::image::{bilinear_sample, GrayImage};
use crate::scalar::Scalar;

/// Raw zero-mean Gaussian field of `len` samples with the given variance.
pub fn gaussian_noise_field<T: Scalar>(len: usize, variance: f64, seed: u64) -> Result<Vec<T>> {
    if !(variance >= 0.0) {
        return Err(FmrError::NegativeVariance(variance));
    }
    if variance == 0.0 {
        return Ok(vec![T::zero(); len]);
    }
    let normal = Normal::new(0.0, variance.sqrt()).expect("finite standard deviation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..len).map(|_| T::lit(normal.sample(&mut rng))).collect())
}

/// `img + N(0, variance)` without clamping; the result may leave `[0, 1]`.
pub fn add_gaussian_noise_unclamped<T: Scalar>(img: &GrayImage<T>, variance: f64, seed: u64) -> Result<Vec<T>> {
    let noise = gaussian_noise_field::<T>(img.pixels().len(), variance, seed)?;
    Ok(img.pixels().iter().zip(noise).map(|(&p, e)| p + e).collect())
}

/// `clamp(img + N(0, variance), 0, 1)`, deterministic for a fixed seed.
pub fn add_gaussian_noise<T: Scalar>(img: &GrayImage<T>, variance: f64, seed: u64) -> Result<GrayImage<T>> {
    if variance == 0.0 {
        return Ok(img.clone());
    }
    let raw = add_gaussian_noise_unclamped(img, variance, seed)?;
    GrayImage::from_unclamped(img.width(), img.height(), raw)
}

/// Quarter turns as `(cos, sin)` when `angle_deg` is a multiple of 90°.
fn quarter_turn(angle_deg: f64) -> Option<(i64, i64)> {
    let a = angle_deg.rem_euclid(360.0);
    let q = (a / 90.0).round();
    if (a - q * 90.0).abs() > 1e-9 {
        return None;
    }
    Some(match q as i64 % 4 {
        0 => (1, 0),
        1 => (0, 1),
        2 => (-1, 0),
        _ => (0, -1),
    })
}

/// Rotates counter-clockwise (on screen) about the image centre.
///
/// Pixels leaving the frame are dropped and uncovered pixels are 0. Multiples
/// of 90° are exact index permutations whenever the pixel lattice maps onto
/// itself; other angles use bilinear resampling.
pub fn rotate<T: Scalar>(img: &GrayImage<T>, angle_deg: f64) -> GrayImage<T> {
    let (w, h) = img.dims();
    if let Some((c, s)) = quarter_turn(angle_deg) {
        if s == 0 || (w as i64 - h as i64) % 2 == 0 {
            return rotate_exact(img, c, s);
        }
    }
    let phi = angle_deg.to_radians();
    let (cs, sn) = (T::lit(phi.cos()), T::lit(phi.sin()));
    let cx = (T::from_usize_lossy(w) - T::one()) / T::lit(2.0);
    let cy = (T::from_usize_lossy(h) - T::one()) / T::lit(2.0);
    let mut out = Vec::with_capacity(w * h);
    for row in 0..h {
        for col in 0..w {
            let x = T::from_usize_lossy(col) - cx;
            let y = cy - T::from_usize_lossy(row);
            let xs = x * cs + y * sn;
            let ys = y * cs - x * sn;
            out.push(bilinear_sample(img.pixels(), w, h, cx + xs, cy - ys));
        }
    }
    GrayImage::from_unclamped(w, h, out).expect("same dimensions as the input")
}

fn rotate_exact<T: Scalar>(img: &GrayImage<T>, c: i64, s: i64) -> GrayImage<T> {
    let (w, h) = img.dims();
    let (wi, hi) = (w as i64, h as i64);
    let mut out = vec![T::zero(); w * h];
    for row in 0..hi {
        for col in 0..wi {
            // doubled centred coordinates keep everything integral
            let x = 2 * col - (wi - 1);
            let y = (hi - 1) - 2 * row;
            let xs = c * x + s * y;
            let ys = c * y - s * x;
            let sc = (xs + wi - 1) / 2;
            let sr = (hi - 1 - ys) / 2;
            if (0..wi).contains(&sc) && (0..hi).contains(&sr) {
                out[(row * wi + col) as usize] = img.get(sc as usize, sr as usize);
            }
        }
    }
    GrayImage::new(w, h, out).expect("permutation of valid pixels")
}

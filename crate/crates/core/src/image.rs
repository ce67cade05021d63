//! Grayscale images and the inscribed unit-disk mapping.

use crate::error::{FmrError, Result};
use crate::scalar::Scalar;

pub const MIN_SIDE: usize = 8;

/// Row-major grayscale image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage<T> {
    width: usize,
    height: usize,
    pixels: Vec<T>,
}

impl<T: Scalar> GrayImage<T> {
    pub fn new(width: usize, height: usize, pixels: Vec<T>) -> Result<Self> {
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(FmrError::InvalidImage(format!(
                "{width}x{height} is below the {MIN_SIDE}x{MIN_SIDE} minimum"
            )));
        }
        if pixels.len() != width * height {
            return Err(FmrError::InvalidImage(format!(
                "expected {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().find(|p| !(**p >= T::zero() && **p <= T::one())) {
            return Err(FmrError::InvalidImage(format!("intensity {bad} outside [0, 1]")));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![T::zero(); width * height])
    }

    /// Builds an image by evaluating `f(col, row)`, clamping into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                pixels.push(clamp_unit(f(col, row)));
            }
        }
        Self::new(width, height, pixels)
    }

    /// Clamps arbitrary (finite) samples into `[0, 1]`; NaN maps to 0.
    pub fn from_unclamped(width: usize, height: usize, raw: Vec<T>) -> Result<Self> {
        Self::new(width, height, raw.into_iter().map(clamp_unit).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<T> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> T {
        self.pixels[row * self.width + col]
    }

    /// Bilinear sample at fractional pixel coordinates; outside the frame reads as 0.
    #[inline]
    pub fn bilinear(&self, col: T, row: T) -> T {
        bilinear_sample(&self.pixels, self.width, self.height, col, row)
    }

    /// Copy with every pixel whose centre lies outside the inscribed disk set to 0.
    pub fn masked_to_disk(&self, domain: &DiskDomain<T>) -> Self {
        let mut out = self.clone();
        for row in 0..self.height {
            for col in 0..self.width {
                if !domain.contains_pixel(col, row) {
                    out.pixels[row * self.width + col] = T::zero();
                }
            }
        }
        out
    }

    pub fn cast<U: Scalar>(&self) -> GrayImage<U> {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|p| U::lit(p.as_f64())).collect(),
        }
    }

    pub fn mean(&self) -> T {
        let n = T::from_usize_lossy(self.pixels.len());
        self.pixels.iter().copied().sum::<T>() / n
    }
}

#[inline]
pub(crate) fn clamp_unit<T: Scalar>(v: T) -> T {
    if v.is_nan() {
        T::zero()
    } else {
        v.max(T::zero()).min(T::one())
    }
}

#[inline]
pub(crate) fn bilinear_sample<T: Scalar>(pixels: &[T], width: usize, height: usize, col: T, row: T) -> T {
    let c0 = col.floor();
    let r0 = row.floor();
    let fc = col - c0;
    let fr = row - r0;
    let (Some(ci), Some(ri)) = (c0.to_i64(), r0.to_i64()) else {
        return T::zero();
    };
    let (w, h) = (width as i64, height as i64);
    if ci < -1 || ri < -1 || ci >= w || ri >= h {
        return T::zero();
    }
    let at = |c: i64, r: i64| -> T {
        if c < 0 || r < 0 || c >= w || r >= h {
            T::zero()
        } else {
            pixels[(r * w + c) as usize]
        }
    };
    let one = T::one();
    let top = at(ci, ri) * (one - fc) + at(ci + 1, ri) * fc;
    let bottom = at(ci, ri + 1) * (one - fc) + at(ci + 1, ri + 1) * fc;
    top * (one - fr) + bottom * fr
}

/// Inscribed-disk mapping from pixel coordinates onto the unit disk.
///
/// Normalized coordinates use `x` to the right and `y` upwards, so polar
/// angles increase counter-clockwise on screen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskDomain<T> {
    pub center: (T, T),
    pub radius: T,
}

impl<T: Scalar> DiskDomain<T> {
    pub fn for_dims(width: usize, height: usize) -> Self {
        let two = T::lit(2.0);
        Self {
            center: (
                (T::from_usize_lossy(width) - T::one()) / two,
                (T::from_usize_lossy(height) - T::one()) / two,
            ),
            radius: T::from_usize_lossy(width.min(height)) / two,
        }
    }

    /// Normalized `(x, y)` of a (fractional) pixel position.
    #[inline]
    pub fn to_unit(&self, col: T, row: T) -> (T, T) {
        ((col - self.center.0) / self.radius, (self.center.1 - row) / self.radius)
    }

    /// Fractional pixel position `(col, row)` of a normalized point.
    #[inline]
    pub fn to_pixel(&self, x: T, y: T) -> (T, T) {
        (self.center.0 + x * self.radius, self.center.1 - y * self.radius)
    }

    #[inline]
    pub fn contains_pixel(&self, col: usize, row: usize) -> bool {
        let (x, y) = self.to_unit(T::from_usize_lossy(col), T::from_usize_lossy(row));
        x * x + y * y <= T::one()
    }

    /// Polar coordinates `(r, θ)` of a pixel centre, `θ ∈ [0, 2π)`.
    #[inline]
    pub fn polar_of_pixel(&self, col: usize, row: usize) -> (T, T) {
        let (x, y) = self.to_unit(T::from_usize_lossy(col), T::from_usize_lossy(row));
        let mut theta = y.atan2(x);
        if theta < T::zero() {
            theta = theta + T::TAU();
        }
        ((x * x + y * y).sqrt(), theta)
    }
}

/// Inscribed disk of an image: centre `((w-1)/2, (h-1)/2)`, radius `min(w, h)/2`.
pub fn disk_mask<T: Scalar>(img: &GrayImage<T>) -> DiskDomain<T> {
    DiskDomain::for_dims(img.width(), img.height())
}

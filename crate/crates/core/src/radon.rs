//! Full-turn discrete Radon transform, filtered back-projection and the
//! projection SNR-gain diagnostic.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::degrade::gaussian_noise_field;
use crate::error::{FmrError, Result};
use crate::image::{bilinear_sample, DiskDomain, GrayImage};
use crate::scalar::Scalar;

const MAGIC: &[u8; 8] = b"FMRSINO1";

/// Lines are integrated this far (in pixels) beyond the disk edge so the
/// bilinear ramp of boundary pixels is captured.
const EDGE_MARGIN: f64 = 1.5;

/// Saturation value reported for SNR increments when the variance vanishes.
pub const SNR_CAP: f64 = 1e12;

/// A line `x cosθ + y sinθ = r` in pixel units about the disk centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSpec<T> {
    pub r: T,
    pub theta: T,
}

/// Radon coefficients on a polar grid, `values[u * V + v]` for radius `r[u]`
/// and angle `θ_v = 2πv / V`.
///
/// Values are line integrals in pixel units of the source image.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram<T> {
    r: Vec<T>,
    v_count: usize,
    values: Vec<T>,
    radius: T,
    warp: Option<T>,
}

/// Cell-centred uniform radii `(u + 0.5) / U`.
pub fn uniform_radii<T: Scalar>(u_count: usize) -> Vec<T> {
    let ut = T::from_usize_lossy(u_count);
    (0..u_count).map(|u| (T::from_usize_lossy(u) + T::lit(0.5)) / ut).collect()
}

/// Warped radii `((u + 1/2) / M)^{1/α}`, `u = 0..M`, matching the Fourier fast path.
///
/// The samples are cell-centred in `γ = r^α`.
pub fn warped_radii<T: Scalar>(alpha: T, m: usize) -> Vec<T> {
    let mt = T::from_usize_lossy(m);
    (0..m)
        .map(|u| ((T::from_usize_lossy(u) + T::lit(0.5)) / mt).powf(T::one() / alpha))
        .collect()
}

impl<T: Scalar> Sinogram<T> {
    pub fn new(r: Vec<T>, v_count: usize, values: Vec<T>, radius: T, warp: Option<T>) -> Result<Self> {
        if r.len() < 2 || v_count < 2 {
            return Err(FmrError::DegenerateGrid(format!("U={} V={v_count}; both must be >= 2", r.len())));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) || r[0] < T::zero() || r[r.len() - 1] > T::one() {
            return Err(FmrError::DegenerateGrid("radii must increase within [0, 1]".into()));
        }
        if values.len() != r.len() * v_count {
            return Err(FmrError::LengthMismatch { expected: r.len() * v_count, actual: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FmrError::DegenerateGrid("sinogram values must be finite".into()));
        }
        if !(radius > T::zero()) {
            return Err(FmrError::DegenerateGrid(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { r, v_count, values, radius, warp })
    }

    pub fn zeros(r: Vec<T>, v_count: usize, radius: T, warp: Option<T>) -> Result<Self> {
        let n = r.len() * v_count;
        Self::new(r, v_count, vec![T::zero(); n], radius, warp)
    }

    /// Builds values from `f(r_u, θ_v)`.
    pub fn from_fn(
        r: Vec<T>,
        v_count: usize,
        radius: T,
        warp: Option<T>,
        f: impl Fn(T, T) -> T,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(r.len() * v_count);
        for &ru in &r {
            for v in 0..v_count {
                values.push(f(ru, theta_of(v, v_count)));
            }
        }
        Self::new(r, v_count, values, radius, warp)
    }

    pub fn u_count(&self) -> usize {
        self.r.len()
    }

    pub fn v_count(&self) -> usize {
        self.v_count
    }

    pub fn radii(&self) -> &[T] {
        &self.r
    }

    pub fn theta(&self, v: usize) -> T {
        theta_of(v, self.v_count)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> T {
        self.values[u * self.v_count + v]
    }

    pub fn row(&self, u: usize) -> &[T] {
        &self.values[u * self.v_count..(u + 1) * self.v_count]
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// The `α` of the warped grid, when the radii are `((u + 1/2)/M)^{1/α}`.
    pub fn warp_alpha(&self) -> Option<T> {
        self.warp
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.r == other.r && self.v_count == other.v_count
    }

    /// `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(FmrError::GridMismatch("sinograms are sampled on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| a * x + b * y).collect();
        Ok(Self { values, ..self.clone() })
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { values: self.values.iter().map(|&x| a * x).collect(), ..self.clone() }
    }

    /// Circular shift along the angle axis: `out[u, v] = self[u, v - k]`.
    pub fn shifted(&self, k: isize) -> Self {
        let vc = self.v_count as isize;
        let mut values = vec![T::zero(); self.values.len()];
        for u in 0..self.u_count() {
            for v in 0..self.v_count {
                let src = (v as isize - k).rem_euclid(vc) as usize;
                values[u * self.v_count + v] = self.get(u, src);
            }
        }
        Self { values, ..self.clone() }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Value at `(r_u, θ)` for arbitrary `θ`, periodic linear interpolation in angle.
    pub(crate) fn at_angle(&self, u: usize, theta: T) -> T {
        let vt = T::from_usize_lossy(self.v_count);
        let pos = (theta / T::TAU()).fract() * vt;
        let pos = if pos < T::zero() { pos + vt } else { pos };
        let lo = pos.floor();
        let frac = pos - lo;
        let i0 = lo.to_usize().unwrap_or(0) % self.v_count;
        let i1 = (i0 + 1) % self.v_count;
        let row = self.row(u);
        row[i0] * (T::one() - frac) + row[i1] * frac
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.u_count() as u32).to_le_bytes())?;
        w.write_all(&(self.v_count as u32).to_le_bytes())?;
        w.write_all(&u32::from(self.warp.is_some()).to_le_bytes())?;
        w.write_all(&0u32.to_le_bytes())?;
        w.write_all(&self.radius.as_f64().to_le_bytes())?;
        if let Some(a) = self.warp {
            w.write_all(&a.as_f64().to_le_bytes())?;
        }
        for x in self.r.iter().chain(&self.values) {
            w.write_all(&x.as_f64().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut rd: R) -> Result<Self> {
        let mut header = [0u8; 32];
        rd.read_exact(&mut header)?;
        if &header[..8] != MAGIC {
            return Err(FmrError::format("sinogram", "bad magic"));
        }
        let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().expect("4 bytes")) as usize;
        let (u_count, v_count, warped) = (word(8), word(12), word(16) != 0);
        let radius = f64::from_le_bytes(header[24..32].try_into().expect("8 bytes"));
        let mut next = || -> Result<T> {
            let mut b = [0u8; 8];
            rd.read_exact(&mut b)?;
            Ok(T::lit(f64::from_le_bytes(b)))
        };
        let warp = if warped { Some(next()?) } else { None };
        let r = (0..u_count).map(|_| next()).collect::<Result<Vec<_>>>()?;
        let values = (0..u_count * v_count).map(|_| next()).collect::<Result<Vec<_>>>()?;
        Self::new(r, v_count, values, T::lit(radius), warp)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_binary(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| FmrError::UnreadableFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::read_binary(BufReader::new(f))
    }

    /// `r,theta,value` rows for plotting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,theta,value")?;
        for u in 0..self.u_count() {
            for v in 0..self.v_count {
                writeln!(w, "{},{},{}", self.r[u], self.theta(v), self.get(u, v))?;
            }
        }
        Ok(())
    }
}

#[inline]
fn theta_of<T: Scalar>(v: usize, v_count: usize) -> T {
    T::TAU() * T::from_usize_lossy(v) / T::from_usize_lossy(v_count)
}

/// Line integral of a row-major raw field along `line`, unit steps, bilinear taps.
fn line_integral<T: Scalar>(pixels: &[T], w: usize, h: usize, domain: &DiskDomain<T>, line: LineSpec<T>) -> T {
    let (s, c) = line.theta.sin_cos();
    let reach = domain.radius + T::lit(EDGE_MARGIN);
    let half = (reach * reach - line.r * line.r).max(T::zero()).sqrt();
    let steps = half.floor().to_i64().unwrap_or(0);
    let (x0, y0) = (line.r * c, line.r * s);
    let mut acc = T::zero();
    for k in -steps..=steps {
        let t = T::from_i64_lossy(k);
        let x = x0 - t * s;
        let y = y0 + t * c;
        acc = acc + bilinear_sample(pixels, w, h, domain.center.0 + x, domain.center.1 - y);
    }
    acc
}

fn masked_pixels<T: Scalar>(pixels: &[T], w: usize, h: usize, domain: &DiskDomain<T>) -> Vec<T> {
    let mut out = pixels.to_vec();
    for row in 0..h {
        for col in 0..w {
            if !domain.contains_pixel(col, row) {
                out[row * w + col] = T::zero();
            }
        }
    }
    out
}

fn project_field<T: Scalar>(
    field: &[T],
    w: usize,
    h: usize,
    domain: &DiskDomain<T>,
    radii: &[T],
    v_count: usize,
) -> Vec<T> {
    let masked = masked_pixels(field, w, h, domain);
    let columns: Vec<Vec<T>> = (0..v_count)
        .into_par_iter()
        .map(|v| {
            let theta = theta_of::<T>(v, v_count);
            radii
                .iter()
                .map(|&r| line_integral(&masked, w, h, domain, LineSpec { r: r * domain.radius, theta }))
                .collect()
        })
        .collect();
    let mut values = vec![T::zero(); radii.len() * v_count];
    for (v, col) in columns.iter().enumerate() {
        for (u, &x) in col.iter().enumerate() {
            values[u * v_count + v] = x;
        }
    }
    values
}

/// Forward transform on an explicit radius grid.
pub fn radon_forward_on<T: Scalar>(
    img: &GrayImage<T>,
    domain: &DiskDomain<T>,
    radii: Vec<T>,
    v_count: usize,
    warp: Option<T>,
) -> Result<Sinogram<T>> {
    if radii.len() < 2 || v_count < 2 {
        return Err(FmrError::DegenerateGrid(format!("U={} V={v_count}; both must be >= 2", radii.len())));
    }
    let (w, h) = img.dims();
    let values = project_field(img.pixels(), w, h, domain, &radii, v_count);
    Sinogram::new(radii, v_count, values, domain.radius, warp)
}

/// Forward transform on `U` cell-centred radii and `V` angles over the full turn.
pub fn radon_forward<T: Scalar>(img: &GrayImage<T>, domain: &DiskDomain<T>, u: usize, v: usize) -> Result<Sinogram<T>> {
    if u < 2 || v < 2 {
        return Err(FmrError::DegenerateGrid(format!("U={u} V={v}; both must be >= 2")));
    }
    radon_forward_on(img, domain, uniform_radii(u), v, None)
}

/// Forward transform on the `M x M` warped grid consumed by the Fourier path.
pub fn radon_forward_warped<T: Scalar>(
    img: &GrayImage<T>,
    domain: &DiskDomain<T>,
    alpha: T,
    m: usize,
) -> Result<Sinogram<T>> {
    if !(alpha > T::zero()) {
        return Err(FmrError::ParamError(format!("alpha must be positive, got {alpha}")));
    }
    if m < 2 {
        return Err(FmrError::DegenerateGrid(format!("M={m} must be >= 2")));
    }
    radon_forward_on(img, domain, warped_radii(alpha, m), m, Some(alpha))
}

/// Filtered back-projection onto an `out_size x out_size` image.
///
/// Uses a Ram-Lak kernel; the result is masked to the inscribed disk and
/// clamped to `[0, 1]`.
pub fn radon_inverse<T: Scalar>(sino: &Sinogram<T>, out_size: usize) -> Result<GrayImage<T>> {
    let raw = radon_inverse_raw(sino, out_size)?;
    GrayImage::from_unclamped(out_size, out_size, raw)
}

/// Unclamped filtered back-projection, zero outside the disk.
pub fn radon_inverse_raw<T: Scalar>(sino: &Sinogram<T>, out_size: usize) -> Result<Vec<T>> {
    if out_size < crate::image::MIN_SIDE {
        return Err(FmrError::DegenerateGrid(format!("output size {out_size} is too small")));
    }
    let u_count = sino.u_count();
    let v_count = sino.v_count();
    let cells = u_count.max(out_size.div_ceil(2));
    let delta = T::one() / T::from_usize_lossy(cells);
    let half = cells + 1;
    let n = 2 * half + 1;
    let pad = (2 * n).next_power_of_two();

    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(pad);
    let inv = planner.plan_fft_inverse(pad);

    // Ram-Lak kernel sampled at spacing delta
    let mut kernel = vec![Complex::new(T::zero(), T::zero()); pad];
    let d2 = delta * delta;
    kernel[0].re = T::one() / (T::lit(4.0) * d2);
    for k in (1..n).step_by(2) {
        let kk = T::from_usize_lossy(k);
        let val = -T::one() / (T::PI() * T::PI() * kk * kk * d2);
        kernel[k].re = val;
        kernel[pad - k].re = val;
    }
    fwd.process(&mut kernel);

    let inv_radius = T::one() / sino.radius;
    let r = sino.radii();
    let r_first = r[0];
    let r_last = r[u_count - 1];

    let filtered: Vec<Vec<T>> = (0..v_count)
        .into_par_iter()
        .map(|v| {
            let theta = sino.theta(v);
            let opposite = theta + T::PI();
            let profile_at = |s: T| -> T {
                let a = s.abs();
                if a > T::one() {
                    return T::zero();
                }
                if a <= r_first {
                    let pos = sino.get(0, v);
                    let neg = sino.at_angle(0, opposite);
                    if r_first == T::zero() {
                        return pos;
                    }
                    let t = (s + r_first) / (T::lit(2.0) * r_first);
                    return neg * (T::one() - t) + pos * t;
                }
                let on_pos = s > T::zero();
                let value = |u: usize| if on_pos { sino.get(u, v) } else { sino.at_angle(u, opposite) };
                if a >= r_last {
                    if r_last >= T::one() {
                        return value(u_count - 1);
                    }
                    let t = (T::one() - a) / (T::one() - r_last);
                    return value(u_count - 1) * t;
                }
                let hi = r.partition_point(|&x| x < a).clamp(1, u_count - 1);
                let lo = hi - 1;
                let t = (a - r[lo]) / (r[hi] - r[lo]);
                value(lo) * (T::one() - t) + value(hi) * t
            };
            let mut buf = vec![Complex::new(T::zero(), T::zero()); pad];
            for (i, slot) in buf.iter_mut().take(n).enumerate() {
                let s = T::from_i64_lossy(i as i64 - half as i64) * delta;
                slot.re = profile_at(s) * inv_radius;
            }
            fwd.process(&mut buf);
            for (b, k) in buf.iter_mut().zip(&kernel) {
                *b = *b * *k;
            }
            inv.process(&mut buf);
            let scale = delta / T::from_usize_lossy(pad);
            // linear convolution output aligned with the input samples
            (0..n).map(|i| buf[i].re * scale).collect()
        })
        .collect();

    let domain = DiskDomain::<T>::for_dims(out_size, out_size);
    let weight = T::PI() / T::from_usize_lossy(v_count);
    let trig: Vec<(T, T)> = (0..v_count).map(|v| sino.theta(v).sin_cos()).collect();
    let half_t = T::from_usize_lossy(half);
    let rows: Vec<Vec<T>> = (0..out_size)
        .into_par_iter()
        .map(|row| {
            (0..out_size)
                .map(|col| {
                    if !domain.contains_pixel(col, row) {
                        return T::zero();
                    }
                    let (x, y) = domain.to_unit(T::from_usize_lossy(col), T::from_usize_lossy(row));
                    let mut acc = T::zero();
                    for (q, &(s, c)) in filtered.iter().zip(&trig) {
                        let pos = (x * c + y * s) / delta + half_t;
                        let i0 = pos.floor();
                        let t = pos - i0;
                        let i = i0.to_usize().unwrap_or(0).min(n - 2);
                        acc = acc + q[i] * (T::one() - t) + q[i + 1] * t;
                    }
                    acc * weight
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Theoretical SNR increment `μ²(c − 1)/σ²` of a projection summing `c` samples.
///
/// Saturates at [`SNR_CAP`] as the variance approaches zero.
pub fn theoretical_snr_increment(mean: f64, variance: f64, c: f64) -> Result<f64> {
    if !(variance >= 0.0) {
        return Err(FmrError::NegativeVariance(variance));
    }
    if variance == 0.0 {
        return Ok(SNR_CAP);
    }
    Ok((mean * mean * (c - 1.0) / variance).min(SNR_CAP))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleGain {
    pub theta: f64,
    /// Mean number of in-disk samples per line at this angle.
    pub samples: f64,
    pub projection_snr: f64,
    pub measured: f64,
    pub theoretical: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrReport {
    pub variance: f64,
    pub trials: usize,
    /// Mean image intensity over the disk.
    pub mean: f64,
    pub image_snr: f64,
    pub per_angle: Vec<AngleGain>,
}

impl SnrReport {
    pub fn mean_measured(&self) -> f64 {
        self.per_angle.iter().map(|a| a.measured).sum::<f64>() / self.per_angle.len() as f64
    }

    pub fn mean_theoretical(&self) -> f64 {
        self.per_angle.iter().map(|a| a.theoretical).sum::<f64>() / self.per_angle.len() as f64
    }
}

/// Monte-Carlo measurement of the SNR increment from image to projections.
///
/// Noise is unclamped Gaussian. SNR is `mean² / mean-square noise`, for the
/// image over disk pixels and for each projection over its radial samples.
pub fn snr_gain<T: Scalar>(
    img: &GrayImage<T>,
    variance: f64,
    seed: u64,
    v_count: usize,
    trials: usize,
) -> Result<SnrReport> {
    if !(variance > 0.0) {
        return Err(FmrError::NegativeVariance(variance));
    }
    if v_count < 2 || trials == 0 {
        return Err(FmrError::DegenerateGrid("need at least two angles and one trial".into()));
    }
    let (w, h) = img.dims();
    let domain = DiskDomain::<T>::for_dims(w, h);
    let u_count = (domain.radius.to_usize().unwrap_or(2)).max(2);
    let radii = uniform_radii::<T>(u_count);

    let mut disk_sum = 0.0;
    let mut disk_count = 0usize;
    for row in 0..h {
        for col in 0..w {
            if domain.contains_pixel(col, row) {
                disk_sum += img.get(col, row).as_f64();
                disk_count += 1;
            }
        }
    }
    let mean = disk_sum / disk_count as f64;

    let signal = project_field(img.pixels(), w, h, &domain, &radii, v_count);
    let mut image_noise = 0.0;
    let mut proj_noise = vec![0.0; v_count];
    for t in 0..trials {
        let noise = gaussian_noise_field::<T>(w * h, variance, seed.wrapping_add(t as u64))?;
        let mut sq = 0.0;
        for row in 0..h {
            for col in 0..w {
                if domain.contains_pixel(col, row) {
                    let e = noise[row * w + col].as_f64();
                    sq += e * e;
                }
            }
        }
        image_noise += sq / disk_count as f64;
        let proj = project_field(&noise, w, h, &domain, &radii, v_count);
        for (v, acc) in proj_noise.iter_mut().enumerate() {
            let s: f64 = (0..u_count).map(|u| proj[u * v_count + v].as_f64().powi(2)).sum();
            *acc += s / u_count as f64;
        }
    }
    let trials_f = trials as f64;
    let image_snr = mean * mean / (image_noise / trials_f);

    let radius = domain.radius.as_f64();
    let samples: f64 = radii
        .iter()
        .map(|r| {
            let rho = r.as_f64() * radius;
            let span = (radius * radius - rho * rho).max(0.0).sqrt().floor();
            2.0 * span + 1.0
        })
        .sum::<f64>()
        / u_count as f64;

    let per_angle = (0..v_count)
        .map(|v| {
            let s_mean = (0..u_count).map(|u| signal[u * v_count + v].as_f64()).sum::<f64>() / u_count as f64;
            let projection_snr = s_mean * s_mean / (proj_noise[v] / trials_f);
            Ok(AngleGain {
                theta: theta_of::<f64>(v, v_count),
                samples,
                projection_snr,
                measured: projection_snr - image_snr,
                theoretical: theoretical_snr_increment(mean, variance, samples)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SnrReport { variance, trials, mean, image_snr, per_angle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degrade::rotate;
    use crate::synth;

    #[test]
    fn disk_indicator_projects_to_chord_length() {
        let img = synth::disk_indicator::<f64>(128);
        let dom = DiskDomain::for_dims(128, 128);
        let s = radon_forward(&img, &dom, 32, 16).unwrap();
        for u in 0..32 {
            let r = s.radii()[u];
            if r > 0.9 {
                continue;
            }
            let chord = 2.0 * 64.0 * (1.0 - r * r).sqrt();
            for v in 0..16 {
                let rel = (s.get(u, v) - chord).abs() / chord;
                assert!(rel < 0.02, "u={u} v={v} rel={rel}");
            }
        }
    }

    #[test]
    fn zero_image_gives_zero_sinogram() {
        let img = GrayImage::<f32>::zeros(32, 32).unwrap();
        let s = radon_forward(&img, &DiskDomain::for_dims(32, 32), 8, 8).unwrap();
        assert!(s.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn quarter_turn_shifts_angles() {
        let img = synth::portrait::<f64>(64);
        let dom = DiskDomain::for_dims(64, 64);
        let a = radon_forward(&img, &dom, 16, 32).unwrap();
        let b = radon_forward(&rotate(&img, 90.0), &dom, 16, 32).unwrap();
        let shifted = a.shifted(8);
        let diff = b.values().iter().zip(shifted.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff < 1e-6, "max diff {diff}");
    }

    #[test]
    fn degenerate_grid_rejected() {
        let img = GrayImage::<f64>::zeros(16, 16).unwrap();
        let dom = DiskDomain::for_dims(16, 16);
        assert!(matches!(radon_forward(&img, &dom, 1, 8), Err(FmrError::DegenerateGrid(_))));
        assert!(matches!(radon_forward(&img, &dom, 8, 1), Err(FmrError::DegenerateGrid(_))));
    }

    #[test]
    fn binary_round_trip() {
        let img = synth::blob::<f64>(32);
        let s = radon_forward_warped(&img, &DiskDomain::for_dims(32, 32), 1.5, 16).unwrap();
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"FMRSINO1");
        assert_eq!(buf.len(), 32 + 8 + 16 * 8 + 16 * 16 * 8);
        let back = Sinogram::<f64>::read_binary(buf.as_slice()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn zero_sinogram_inverts_to_zero() {
        let s = Sinogram::<f64>::zeros(uniform_radii(16), 16, 16.0, None).unwrap();
        let img = radon_inverse(&s, 32).unwrap();
        assert!(img.pixels().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn fbp_recovers_disk_indicator() {
        let img = synth::disk_indicator::<f64>(64);
        let dom = DiskDomain::for_dims(64, 64);
        let s = radon_forward(&img, &dom, 64, 128).unwrap();
        let back = radon_inverse(&s, 64).unwrap();
        let mut se = 0.0;
        let mut count = 0;
        for row in 0..64 {
            for col in 0..64 {
                let (x, y) = dom.to_unit(col as f64, row as f64);
                if x * x + y * y < 0.64 {
                    se += (back.get(col, row) - img.get(col, row)).powi(2);
                    count += 1;
                }
            }
        }
        let rms = (se / count as f64).sqrt();
        assert!(rms < 0.1, "rms {rms}");
    }

    #[test]
    fn theoretical_increment_example() {
        assert_eq!(theoretical_snr_increment(0.5, 0.1, 256.0).unwrap(), 637.5);
        assert_eq!(theoretical_snr_increment(0.5, 0.0, 256.0).unwrap(), SNR_CAP);
        assert!(theoretical_snr_increment(0.5, -1.0, 256.0).is_err());
    }
}

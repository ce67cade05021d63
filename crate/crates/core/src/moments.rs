//! Fractional-order moments of sinograms (FMR) and of images (FM), the
//! Fourier fast path, and reconstruction from a moment set.

use std::fmt;
use std::io::{BufRead, Write};

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::basis::{radial_matrix, radial_matrix_direct, BasisSpec, Family};
use crate::error::{FmrError, Result};
use crate::image::{bilinear_sample, DiskDomain, GrayImage};
use crate::quadrature::RadialQuadrature;
use crate::radon::{radon_inverse, uniform_radii, warped_radii, Sinogram};
use crate::scalar::Scalar;

const TEXT_MAGIC: &str = "FMRMOM1";

/// Coefficients below this fraction of the largest magnitude are written as 0.
pub const FLUSH_RATIO: f64 = 1e-12;

/// Whether moments were taken of the sinogram or of the image itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainTag {
    Radon,
    Image,
}

impl fmt::Display for DomainTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainTag::Radon => "radon",
            DomainTag::Image => "image",
        })
    }
}

/// Complex moments over `S(K) = {(n, m): |n|, |m| <= K}` (`0 <= n` for the
/// polynomial family).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet<T> {
    spec: BasisSpec<T>,
    k: usize,
    tag: DomainTag,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> MomentSet<T> {
    pub fn zeros(spec: BasisSpec<T>, k: usize, tag: DomainTag) -> Self {
        let rows = spec.radial_orders(k).count();
        Self { spec, k, tag, coeffs: vec![Complex::new(T::zero(), T::zero()); rows * (2 * k + 1)] }
    }

    /// Builds a set from explicit entries; every order of `S(K)` must appear.
    pub fn from_entries(
        spec: BasisSpec<T>,
        k: usize,
        tag: DomainTag,
        entries: impl IntoIterator<Item = (i32, i32, Complex<T>)>,
    ) -> Result<Self> {
        let mut out = Self::zeros(spec, k, tag);
        let mut seen = vec![false; out.coeffs.len()];
        for (n, m, c) in entries {
            let idx = out.index(n, m).ok_or_else(|| {
                FmrError::format("moment set", format!("order ({n}, {m}) lies outside S({k})"))
            })?;
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(FmrError::format("moment set", format!("non-finite coefficient at ({n}, {m})")));
            }
            out.coeffs[idx] = c;
            seen[idx] = true;
        }
        if let Some((n, m)) = out.orders().zip(&seen).find(|(_, s)| !**s).map(|(o, _)| o) {
            return Err(FmrError::IncompleteMomentSet { n, m });
        }
        Ok(out)
    }

    fn n_min(&self) -> i32 {
        *self.spec.radial_orders(self.k).start()
    }

    fn index(&self, n: i32, m: i32) -> Option<usize> {
        let k = self.k as i32;
        if m.abs() > k || !self.spec.radial_orders(self.k).contains(&n) {
            return None;
        }
        Some((n - self.n_min()) as usize * (2 * self.k + 1) + (m + k) as usize)
    }

    pub fn get(&self, n: i32, m: i32) -> Option<Complex<T>> {
        self.index(n, m).map(|i| self.coeffs[i])
    }

    /// Every `(n, m)` in lexicographic order.
    pub fn orders(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        let k = self.k as i32;
        self.spec.radial_orders(self.k).flat_map(move |n| (-k..=k).map(move |m| (n, m)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, i32, Complex<T>)> + '_ {
        self.orders().zip(&self.coeffs).map(|((n, m), &c)| (n, m, c))
    }

    pub fn spec(&self) -> &BasisSpec<T> {
        &self.spec
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tag(&self) -> DomainTag {
        self.tag
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// `Σ |M_nm|²`
    pub fn energy(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Element-wise map `M_nm -> f(n, m, M_nm)`.
    pub fn map(&self, f: impl Fn(i32, i32, Complex<T>) -> Complex<T>) -> Self {
        let coeffs = self.iter().map(|(n, m, c)| f(n, m, c)).collect();
        Self { coeffs, ..self.clone() }
    }

    /// Restriction to a smaller order bound.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.k);
        let entries: Vec<_> = self.iter().filter(|&(n, m, _)| n.unsigned_abs() as usize <= k && m.unsigned_abs() as usize <= k).collect();
        Self::from_entries(self.spec, k, self.tag, entries).expect("subset of a complete set")
    }

    /// Versioned text form; identical sets give identical bytes.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{TEXT_MAGIC}")?;
        match self.spec.family {
            Family::Harmonic => writeln!(w, "family harmonic")?,
            Family::Polynomial { p, q } => {
                writeln!(w, "family polynomial")?;
                writeln!(w, "p {:e}", p.as_f64())?;
                writeln!(w, "q {:e}", q.as_f64())?;
            }
        }
        writeln!(w, "alpha {:e}", self.spec.alpha.as_f64())?;
        writeln!(w, "k {}", self.k)?;
        writeln!(w, "domain {}", self.tag)?;
        writeln!(w, "# n m re im")?;
        let floor = self.max_abs().as_f64() * FLUSH_RATIO;
        let flush = |x: f64| if x.abs() < floor { 0.0 } else { x };
        for (n, m, c) in self.iter() {
            writeln!(w, "{n} {m} {:e} {:e}", flush(c.re.as_f64()), flush(c.im.as_f64()))?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let bad = |msg: String| FmrError::format("moment set", msg);
        let mut lines = r.lines();
        let magic = lines.next().transpose()?.unwrap_or_default();
        if magic.trim() != TEXT_MAGIC {
            return Err(bad(format!("expected {TEXT_MAGIC} header")));
        }
        let (mut family, mut p, mut q, mut alpha, mut k, mut tag) = (None, None, None, None, None, None);
        let mut entries = Vec::new();
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s}: {e}")));
            match parts.as_slice() {
                ["family", f] => family = Some(f.to_string()),
                ["p", v] => p = Some(num(v)?),
                ["q", v] => q = Some(num(v)?),
                ["alpha", v] => alpha = Some(num(v)?),
                ["k", v] => k = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                ["domain", "radon"] => tag = Some(DomainTag::Radon),
                ["domain", "image"] => tag = Some(DomainTag::Image),
                [n, m, re, im] => {
                    let n = n.parse::<i32>().map_err(|e| bad(e.to_string()))?;
                    let m = m.parse::<i32>().map_err(|e| bad(e.to_string()))?;
                    entries.push((n, m, Complex::new(T::lit(num(re)?), T::lit(num(im)?))));
                }
                _ => return Err(bad(format!("unrecognised line `{line}`"))),
            }
        }
        let alpha = T::lit(alpha.ok_or_else(|| bad("missing alpha".into()))?);
        let spec = match family.as_deref() {
            Some("harmonic") => BasisSpec::harmonic(alpha)?,
            Some("polynomial") => BasisSpec::polynomial(
                alpha,
                T::lit(p.ok_or_else(|| bad("missing p".into()))?),
                T::lit(q.ok_or_else(|| bad("missing q".into()))?),
            )?,
            _ => return Err(bad("missing or unknown family".into())),
        };
        let k = k.ok_or_else(|| bad("missing k".into()))?;
        let tag = tag.ok_or_else(|| bad("missing domain".into()))?;
        Self::from_entries(spec, k, tag, entries)
    }
}

/// Samples on a polar grid with radial quadrature weights (`r` folded in).
///
/// Values are `values[u * V + v]` at `θ_v = 2πv / V`.
#[derive(Debug, Clone)]
pub struct PolarSamples<T> {
    pub radii: Vec<T>,
    pub weights: Vec<T>,
    pub v_count: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> PolarSamples<T> {
    /// Sinogram samples weighted for the sinogram's own grid: the midpoint
    /// rule in `γ = r^α` on a warped grid, cell-boundary weights otherwise.
    /// An `r = 0` node is dropped since `r·R_n(r)` vanishes there.
    pub fn from_sinogram(sino: &Sinogram<T>) -> Result<Self> {
        let quad = match sino.warp_alpha() {
            Some(a) => {
                let q = RadialQuadrature::warped(a, sino.u_count())?;
                let tol = T::lit(1e-9);
                if q.nodes.iter().zip(sino.radii()).all(|(x, y)| (*x - *y).abs() <= tol) {
                    q
                } else {
                    RadialQuadrature::from_nodes(sino.radii())?
                }
            }
            None => RadialQuadrature::from_nodes(sino.radii())?,
        };
        let v = sino.v_count();
        let mut out = Self { radii: Vec::new(), weights: Vec::new(), v_count: v, values: Vec::new() };
        for (u, (&r, &w)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
            if r > T::zero() {
                out.radii.push(r);
                out.weights.push(w);
                out.values.extend_from_slice(sino.row(u));
            }
        }
        Ok(out)
    }

    /// Bilinear polar resampling of the disk-masked image on a `G x G`
    /// cell-centred grid.
    pub fn from_image(img: &GrayImage<T>, domain: &DiskDomain<T>, g: usize) -> Result<Self> {
        let masked = img.masked_to_disk(domain);
        let quad = RadialQuadrature::midpoint(g)?;
        let (w, h) = img.dims();
        let trig: Vec<(T, T)> = (0..g)
            .map(|v| (T::TAU() * T::from_usize_lossy(v) / T::from_usize_lossy(g)).sin_cos())
            .collect();
        let values = quad
            .nodes
            .par_iter()
            .flat_map_iter(|&r| {
                let trig = &trig;
                let masked = &masked;
                trig.iter().map(move |&(s, c)| {
                    let (col, row) = domain.to_pixel(r * c, r * s);
                    bilinear_sample(masked.pixels(), w, h, col, row)
                })
            })
            .collect();
        Ok(Self { radii: quad.nodes, weights: quad.weights, v_count: g, values })
    }

    fn u_count(&self) -> usize {
        self.radii.len()
    }

    /// `A[m][u] = (2π/V) Σ_v values[u, v] e^{-jmθ_v}` for `|m| <= K`.
    fn angular_spectrum(&self, k: usize) -> Vec<Vec<Complex<T>>> {
        let v_count = self.v_count;
        let dtheta = T::TAU() / T::from_usize_lossy(v_count);
        (-(k as i32)..=k as i32)
            .into_par_iter()
            .map(|m| {
                let tw: Vec<Complex<T>> = (0..v_count)
                    .map(|v| {
                        // reduce m·v modulo V so the phase stays small and exact
                        let idx = (m as i64 * v as i64).rem_euclid(v_count as i64) as usize;
                        Complex::from_polar(T::one(), -dtheta * T::from_usize_lossy(idx))
                    })
                    .collect();
                (0..self.u_count())
                    .map(|u| {
                        let row = &self.values[u * v_count..(u + 1) * v_count];
                        let s: Complex<T> = row.iter().zip(&tw).map(|(&x, &t)| t * x).sum();
                        s * dtheta
                    })
                    .collect()
            })
            .collect()
    }

    /// Moments over `S(K)` given radial samples `[order][node]`.
    fn project(&self, spec: &BasisSpec<T>, k: usize, tag: DomainTag, radial: &[Vec<Complex<T>>]) -> MomentSet<T> {
        let ang = self.angular_spectrum(k);
        let weighted: Vec<Vec<Complex<T>>> = radial
            .iter()
            .map(|row| row.iter().zip(&self.weights).map(|(r, &w)| r.conj() * w).collect())
            .collect();
        let coeffs: Vec<Complex<T>> = weighted
            .par_iter()
            .flat_map_iter(|rn| {
                ang.iter().map(move |am| rn.iter().zip(am).map(|(&a, &b)| a * b).sum::<Complex<T>>())
            })
            .collect();
        MomentSet { spec: *spec, k, tag, coeffs }
    }

    /// A single coefficient `(n, m)`.
    pub fn coefficient(&self, spec: &BasisSpec<T>, n: i32, m: i32) -> Result<Complex<T>> {
        let radial = single_radial(spec, n, &self.radii)?;
        let dtheta = T::TAU() / T::from_usize_lossy(self.v_count);
        let tw: Vec<Complex<T>> = (0..self.v_count)
            .map(|v| {
                let idx = (m as i64 * v as i64).rem_euclid(self.v_count as i64) as usize;
                Complex::from_polar(T::one(), -dtheta * T::from_usize_lossy(idx))
            })
            .collect();
        let mut acc = Complex::new(T::zero(), T::zero());
        for u in 0..self.u_count() {
            let row = &self.values[u * self.v_count..(u + 1) * self.v_count];
            let a: Complex<T> = row.iter().zip(&tw).map(|(&x, &t)| t * x).sum();
            acc = acc + radial[u].conj() * a * self.weights[u];
        }
        Ok(acc * dtheta)
    }

    /// Weighted squared norm `∫∫ |g|² r dr dθ`.
    pub fn energy(&self) -> T {
        let dtheta = T::TAU() / T::from_usize_lossy(self.v_count);
        (0..self.u_count())
            .map(|u| {
                let row = &self.values[u * self.v_count..(u + 1) * self.v_count];
                row.iter().map(|&x| x * x).sum::<T>() * self.weights[u]
            })
            .sum::<T>()
            * dtheta
    }
}

fn single_radial<T: Scalar>(spec: &BasisSpec<T>, n: i32, radii: &[T]) -> Result<Vec<Complex<T>>> {
    match spec.family {
        Family::Harmonic => radii
            .iter()
            .map(|&r| crate::basis::radial_harmonic(spec.alpha, n, r))
            .collect(),
        Family::Polynomial { .. } => {
            if n < 0 {
                return Err(FmrError::ParamError(format!("polynomial order must be non-negative, got {n}")));
            }
            let mut rows = radial_matrix(spec, n as usize, radii)?;
            Ok(rows.swap_remove(n as usize))
        }
    }
}

fn guard_resolution(samples: usize, k: usize) -> Result<()> {
    let required = 4 * k;
    if samples < required {
        return Err(FmrError::UnderResolved { samples, k, required });
    }
    Ok(())
}

/// Slow reference: quadrature of the inner product on the sinogram's own grid.
///
/// Polynomial radial functions come from the closed-form sum, so this path
/// accepts `K <= 20` for that family.
pub fn fmr_direct<T: Scalar>(sino: &Sinogram<T>, spec: &BasisSpec<T>, k: usize) -> Result<MomentSet<T>> {
    spec.validate()?;
    guard_resolution(sino.u_count().min(sino.v_count()), k)?;
    let polar = PolarSamples::from_sinogram(sino)?;
    let radial = radial_matrix_direct(spec, k, &polar.radii)?;
    Ok(polar.project(spec, k, DomainTag::Radon, &radial))
}

/// Polynomial FMR with radial tables from the three-term recursion.
pub fn fmr_polynomial<T: Scalar>(sino: &Sinogram<T>, spec: &BasisSpec<T>, k: usize) -> Result<MomentSet<T>> {
    spec.validate()?;
    if !spec.is_polynomial() {
        return Err(FmrError::ParamError("fmr_polynomial needs the polynomial family".into()));
    }
    guard_resolution(sino.u_count().min(sino.v_count()), k)?;
    let polar = PolarSamples::from_sinogram(sino)?;
    let radial = radial_matrix(spec, k, &polar.radii)?;
    Ok(polar.project(spec, k, DomainTag::Radon, &radial))
}

/// FMR on the sinogram's grid with whichever radial evaluator is fastest.
pub fn fmr<T: Scalar>(sino: &Sinogram<T>, spec: &BasisSpec<T>, k: usize) -> Result<MomentSet<T>> {
    match spec.family {
        Family::Harmonic => fmr_direct(sino, spec, k),
        Family::Polynomial { .. } => fmr_polynomial(sino, spec, k),
    }
}

/// Harmonic FMR by a single 2-D FFT on the warped `M x M` grid.
///
/// With `γ = r^α` and `ϑ = θ / 2π`, the moment is `2π` times the 2-D Fourier
/// coefficient of `S(γ, ϑ) = sqrt(γ^{2/α - 1} / (2πα)) ℛ(r, θ)`. Samples sit
/// at cell centres `γ_u = (u + 1/2)/M`, so each radial frequency picks up a
/// half-cell phase `e^{-jπn/M}`.
pub fn fmr_harmonic_fft<T: Scalar>(sino: &Sinogram<T>, alpha: T, k: usize) -> Result<MomentSet<T>> {
    let spec = BasisSpec::harmonic(alpha)?;
    let m = sino.u_count();
    let tol = T::lit(1e-9);
    match sino.warp_alpha() {
        Some(a) if (a - alpha).abs() <= tol * alpha => {}
        other => {
            return Err(FmrError::GridMismatch(format!(
                "expected a grid warped with alpha={alpha}, found {}",
                other.map_or("a uniform grid".to_string(), |a| format!("alpha={a}"))
            )))
        }
    }
    if sino.v_count() != m {
        return Err(FmrError::GridMismatch(format!("warped grid must be square, got U={m} V={}", sino.v_count())));
    }
    let expect = warped_radii::<T>(alpha, m);
    if sino.radii().iter().zip(&expect).any(|(a, b)| (*a - *b).abs() > tol) {
        return Err(FmrError::GridMismatch("radii do not follow ((u+1/2)/M)^(1/alpha)".into()));
    }
    guard_resolution(m, k)?;

    let mt = T::from_usize_lossy(m);
    let expo = T::one() / alpha - T::lit(0.5);
    let norm = T::one() / (T::TAU() * alpha).sqrt();

    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(m);
    let mut grid: Vec<Complex<T>> = (0..m)
        .flat_map(|u| {
            let gamma = (T::from_usize_lossy(u) + T::lit(0.5)) / mt;
            let w = gamma.powf(expo) * norm;
            sino.row(u).iter().map(move |&x| Complex::new(x * w, T::zero()))
        })
        .collect();
    // rows (angle axis), then every column (radial axis), so the cost does
    // not depend on K
    for row in grid.chunks_exact_mut(m) {
        fft.process(row);
    }
    let mut cols = vec![Complex::new(T::zero(), T::zero()); m * m];
    for (u, row) in grid.chunks_exact(m).enumerate() {
        for (b, &x) in row.iter().enumerate() {
            cols[b * m + u] = x;
        }
    }
    for col in cols.chunks_exact_mut(m) {
        fft.process(col);
    }
    let ki = k as i32;
    let wanted: Vec<usize> = (-ki..=ki).map(|f| f.rem_euclid(m as i32) as usize).collect();
    let scale = T::TAU() / (mt * mt);
    let mut coeffs = Vec::with_capacity(wanted.len() * wanted.len());
    for (n, &a) in (-ki..=ki).zip(&wanted) {
        let shift = Complex::from_polar(scale, -T::PI() * T::from_i64_lossy(n as i64) / mt);
        for &b in &wanted {
            coeffs.push(cols[b * m + a] * shift);
        }
    }
    Ok(MomentSet { spec, k, tag: DomainTag::Radon, coeffs })
}

/// Image-domain moments by polar resampling on a `max(N, 4K)` grid.
pub fn fm_image<T: Scalar>(
    img: &GrayImage<T>,
    domain: &DiskDomain<T>,
    spec: &BasisSpec<T>,
    k: usize,
) -> Result<MomentSet<T>> {
    spec.validate()?;
    let side = img.width().min(img.height());
    let g = side.max(4 * k);
    guard_resolution(g, k)?;
    let polar = PolarSamples::from_image(img, domain, g)?;
    let radial = radial_matrix(spec, k, &polar.radii)?;
    Ok(polar.project(spec, k, DomainTag::Image, &radial))
}

fn check_tag<T: Scalar>(ms: &MomentSet<T>, tag: DomainTag) -> Result<()> {
    if ms.tag != tag {
        return Err(FmrError::ParamError(format!("expected {tag}-domain moments, got {}", ms.tag)));
    }
    Ok(())
}

/// `Re Σ_n Σ_m M_nm R_n(r_u) e^{jmθ_v}` on the given polar grid.
fn synthesize_polar<T: Scalar>(ms: &MomentSet<T>, radii: &[T], v_count: usize) -> Result<Vec<T>> {
    let k = ms.k;
    let radial = radial_matrix(&ms.spec, k, radii)?;
    let width = 2 * k + 1;
    let dtheta = T::TAU() / T::from_usize_lossy(v_count);
    let rows: Vec<Vec<T>> = (0..radii.len())
        .into_par_iter()
        .map(|u| {
            // B[m] = Σ_n M_nm R_n(r_u)
            let mut b = vec![Complex::new(T::zero(), T::zero()); width];
            for (row, rn) in radial.iter().enumerate() {
                let r = rn[u];
                for (j, slot) in b.iter_mut().enumerate() {
                    *slot = *slot + ms.coeffs[row * width + j] * r;
                }
            }
            (0..v_count)
                .map(|v| {
                    let mut acc = T::zero();
                    for (j, bm) in b.iter().enumerate() {
                        let m = j as i64 - k as i64;
                        let idx = (m * v as i64).rem_euclid(v_count as i64) as usize;
                        let (s, c) = (dtheta * T::from_usize_lossy(idx)).sin_cos();
                        acc = acc + bm.re * c - bm.im * s;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Radius below which the truncated series is not evaluated when the radial
/// functions are unbounded at the origin (`α < 2`): `(1 / (2K + 1))^{1/α}`.
pub fn origin_core_radius<T: Scalar>(alpha: T, k: usize) -> Option<T> {
    (alpha < T::lit(2.0)).then(|| (T::one() / T::from_usize_lossy(2 * k + 1)).powf(T::one() / alpha))
}

/// Sinogram series from radon-domain moments on a `U x V` cell-centred grid,
/// and the image recovered from it by filtered back-projection.
///
/// For `α < 2` the series blows up like `r^{α/2-1}` at the origin, so inside
/// [`origin_core_radius`] the sinogram is bridged linearly across `r = 0`
/// between `(r_c, θ)` and `(r_c, θ + π)`, using `ℛ(-r, θ) = ℛ(r, θ + π)`.
pub fn reconstruct<T: Scalar>(ms: &MomentSet<T>, grid: (usize, usize), out_size: usize) -> Result<(Sinogram<T>, GrayImage<T>)> {
    check_tag(ms, DomainTag::Radon)?;
    let (u, v) = grid;
    if u < 2 || v < 2 {
        return Err(FmrError::DegenerateGrid(format!("U={u} V={v}; both must be >= 2")));
    }
    let radii = uniform_radii::<T>(u);
    let mut values = synthesize_polar(ms, &radii, v)?;
    if let Some(rc) = origin_core_radius(ms.spec.alpha, ms.k) {
        let edge = synthesize_polar(ms, &[rc], v)?;
        let edge = Sinogram::new(vec![T::zero(), rc], v, [vec![T::zero(); v], edge].concat(), T::one(), None)?;
        let two = T::lit(2.0);
        for (iu, &r) in radii.iter().enumerate().take_while(|(_, r)| **r < rc) {
            for iv in 0..v {
                let theta = edge.theta(iv);
                let near = edge.at_angle(1, theta);
                let far = edge.at_angle(1, theta + T::PI());
                values[iu * v + iv] = ((rc + r) * near + (rc - r) * far) / (two * rc);
            }
        }
    }
    let radius = T::from_usize_lossy(out_size) / T::lit(2.0);
    let sino = Sinogram::new(radii, v, values, radius, None)?;
    let img = radon_inverse(&sino, out_size)?;
    Ok((sino, img))
}

/// Image series `Re Σ M_nm R_n(r) e^{jmθ}` at every disk pixel, clamped to `[0, 1]`.
pub fn reconstruct_image<T: Scalar>(ms: &MomentSet<T>, out_size: usize) -> Result<GrayImage<T>> {
    check_tag(ms, DomainTag::Image)?;
    let domain = DiskDomain::<T>::for_dims(out_size, out_size);
    let k = ms.k;
    let width = 2 * k + 1;
    let rows: Vec<Vec<T>> = (0..out_size)
        .into_par_iter()
        .map(|row| {
            let mut b = vec![Complex::new(T::zero(), T::zero()); width];
            (0..out_size)
                .map(|col| {
                    let (r, theta) = domain.polar_of_pixel(col, row);
                    if r > T::one() || r == T::zero() && ms.spec.alpha < T::lit(2.0) {
                        return Ok(T::zero());
                    }
                    let radial = radial_matrix(&ms.spec, k, &[r])?;
                    b.iter_mut().for_each(|x| *x = Complex::new(T::zero(), T::zero()));
                    for (i, rn) in radial.iter().enumerate() {
                        for (j, slot) in b.iter_mut().enumerate() {
                            *slot = *slot + ms.coeffs[i * width + j] * rn[0];
                        }
                    }
                    let step = Complex::from_polar(T::one(), theta);
                    let mut e = Complex::from_polar(T::one(), -T::from_usize_lossy(k) * theta);
                    let mut acc = T::zero();
                    for bm in &b {
                        acc = acc + (bm * e).re;
                        e = e * step;
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    GrayImage::from_unclamped(out_size, out_size, rows.into_iter().flatten().collect())
}

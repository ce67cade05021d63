//! Explicit FMR as series over geometric moments.
//!
//! Both radial families expand into powers `r^E`. Integrating the Radon
//! kernel against `r^E` turns every term into an angular integral `Θ` times
//! an image-domain geometric moment `G`. The series is evaluated only when
//! every exponent is a non-negative integer, so that `x^E` stays real on the
//! whole disk. It is an independent cross-check of the quadrature paths and
//! is far too slow for production use.
//!
//! The series integrates `(x cosθ + y sinθ)^E` over every angle, which counts
//! lines at negative signed distance as well. For an integer exponent each
//! term therefore equals `1 + (-1)^{E+m}` times its value over `r >= 0`; see
//! [`line_parity_factor`].

use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;

use crate::basis::{BasisSpec, Family};
use crate::error::{FmrError, Result};
use crate::image::{DiskDomain, GrayImage};
use crate::moments::MomentSet;
use crate::scalar::Scalar;
use crate::special::{generalized_binomial, ln_factorial, ln_gamma};

/// Nodes of the periodic rule used for `Θ`.
pub const THETA_NODES: usize = 2048;

/// Extra terms inspected when bounding an infinite tail.
const TAIL_WINDOW: usize = 4000;

/// Where the image is known to be supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// Anywhere on the disk; only integer exponents are allowed.
    Signed,
    /// Only where `x >= 0` and `y >= 0`; real exponents are allowed.
    FirstQuadrant,
}

fn as_nonneg_integer<T: Scalar>(x: T, what: &str) -> Result<usize> {
    let r = x.round();
    if x < T::zero() || (x - r).abs() > T::lit(1e-9) {
        return Err(FmrError::FractionalPowerOfNegative(format!(
            "{what}={x} is not a non-negative integer"
        )));
    }
    Ok(r.to_usize().expect("non-negative integer"))
}

/// `G_{ξ₁,ξ₂} = ∬ f x^{ξ₁} y^{ξ₂} dx dy` over the disk in normalized units.
pub fn geometric_moment<T: Scalar>(
    img: &GrayImage<T>,
    domain: &DiskDomain<T>,
    xi1: T,
    xi2: T,
    support: Support,
) -> Result<T> {
    let area = T::one() / (domain.radius * domain.radius);
    match support {
        Support::Signed => {
            let a = as_nonneg_integer(xi1, "xi1")?;
            let b = as_nonneg_integer(xi2, "xi2")?;
            Ok(pixel_sum(img, domain, |x, y| x.powi(a as i32) * y.powi(b as i32))? * area)
        }
        Support::FirstQuadrant => {
            if xi1 < T::zero() || xi2 < T::zero() {
                return Err(FmrError::ParamError("geometric moment exponents must be non-negative".into()));
            }
            let mut signed = false;
            let s = pixel_sum(img, domain, |x, y| {
                if x < T::zero() || y < T::zero() {
                    signed = true;
                }
                x.abs().powf(xi1) * y.abs().powf(xi2)
            })?;
            if signed {
                return Err(FmrError::FractionalPowerOfNegative(
                    "image has support outside the first quadrant".into(),
                ));
            }
            Ok(s * area)
        }
    }
}

fn pixel_sum<T: Scalar>(img: &GrayImage<T>, domain: &DiskDomain<T>, mut g: impl FnMut(T, T) -> T) -> Result<T> {
    let mut acc = T::zero();
    for row in 0..img.height() {
        for col in 0..img.width() {
            let f = img.get(col, row);
            if f == T::zero() || !domain.contains_pixel(col, row) {
                continue;
            }
            let (x, y) = domain.to_unit(T::from_usize_lossy(col), T::from_usize_lossy(row));
            acc = acc + f * g(x, y);
        }
    }
    Ok(acc)
}

/// All integer geometric moments with `ξ₁ + ξ₂ <= D` in one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricMomentTable<T> {
    max_degree: usize,
    values: Vec<T>,
}

fn tri(a: usize, b: usize) -> usize {
    let s = a + b;
    s * (s + 1) / 2 + b
}

impl<T: Scalar> GeometricMomentTable<T> {
    pub fn new(img: &GrayImage<T>, domain: &DiskDomain<T>, max_degree: usize) -> Self {
        let d = max_degree;
        let len = tri(0, d) + 1;
        let area = T::one() / (domain.radius * domain.radius);
        let rows: Vec<Vec<T>> = (0..img.height())
            .into_par_iter()
            .map(|row| {
                let mut acc = vec![T::zero(); len];
                let mut xp = vec![T::one(); d + 1];
                let mut yp = vec![T::one(); d + 1];
                for col in 0..img.width() {
                    let f = img.get(col, row);
                    if f == T::zero() || !domain.contains_pixel(col, row) {
                        continue;
                    }
                    let (x, y) = domain.to_unit(T::from_usize_lossy(col), T::from_usize_lossy(row));
                    for i in 1..=d {
                        xp[i] = xp[i - 1] * x;
                        yp[i] = yp[i - 1] * y;
                    }
                    for a in 0..=d {
                        let fx = f * xp[a];
                        for b in 0..=d - a {
                            acc[tri(a, b)] = acc[tri(a, b)] + fx * yp[b];
                        }
                    }
                }
                acc
            })
            .collect();
        let mut values = vec![T::zero(); len];
        for r in &rows {
            for (v, x) in values.iter_mut().zip(r) {
                *v = *v + *x;
            }
        }
        for v in &mut values {
            *v = *v * area;
        }
        Self { max_degree: d, values }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn get(&self, xi1: usize, xi2: usize) -> Option<T> {
        (xi1 + xi2 <= self.max_degree).then(|| self.values[tri(xi1, xi2)])
    }
}

/// `Θ = ∫₀^{2π} e^{-jmθ} cos^{ξ₁}θ sin^{ξ₂}θ dθ` by the periodic rectangle rule.
pub fn theta_integral<T: Scalar>(m: i32, xi1: T, xi2: T) -> Result<Complex<T>> {
    let a = as_nonneg_integer(xi1, "xi1")?;
    let b = as_nonneg_integer(xi2, "xi2")?;
    Ok(ThetaTable::new(m, a + b).get(a, b))
}

struct ThetaTable<T> {
    max_degree: usize,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> ThetaTable<T> {
    fn new(m: i32, max_degree: usize) -> Self {
        let d = max_degree;
        let len = tri(0, d) + 1;
        let n = THETA_NODES;
        let step = T::TAU() / T::from_usize_lossy(n);
        let mut values = vec![Complex::new(T::zero(), T::zero()); len];
        let mut cp = vec![T::one(); d + 1];
        let mut sp = vec![T::one(); d + 1];
        for v in 0..n {
            let theta = step * T::from_usize_lossy(v);
            let (s, c) = theta.sin_cos();
            let idx = (m as i64 * v as i64).rem_euclid(n as i64) as usize;
            let e = Complex::from_polar(step, -step * T::from_usize_lossy(idx));
            for i in 1..=d {
                cp[i] = cp[i - 1] * c;
                sp[i] = sp[i - 1] * s;
            }
            for a in 0..=d {
                let ec = e * cp[a];
                for b in 0..=d - a {
                    values[tri(a, b)] = values[tri(a, b)] + ec * sp[b];
                }
            }
        }
        Self { max_degree: d, values }
    }

    fn get(&self, a: usize, b: usize) -> Complex<T> {
        debug_assert!(a + b <= self.max_degree);
        self.values[tri(a, b)]
    }
}

/// `W₁(n, k) = sqrt(α) (j2nπ)^k / (sqrt(2π) k!)`
pub fn w1<T: Scalar>(alpha: T, n: i32, k: usize) -> Complex<T> {
    let base = (alpha / T::TAU()).sqrt();
    if k == 0 {
        return Complex::new(base, T::zero());
    }
    if n == 0 {
        return Complex::new(T::zero(), T::zero());
    }
    let kt = T::from_usize_lossy(k);
    let two_n_pi = T::TAU() * T::from_i64_lossy(n.unsigned_abs() as i64);
    let mag = base * (kt * two_n_pi.ln() - ln_factorial::<T>(k)).exp();
    // (j·sign(n))^k
    let quarter = if n > 0 { k % 4 } else { (4 - k % 4) % 4 };
    match quarter {
        0 => Complex::new(mag, T::zero()),
        1 => Complex::new(T::zero(), mag),
        2 => Complex::new(-mag, T::zero()),
        _ => Complex::new(T::zero(), -mag),
    }
}

/// `W₂(α, p, q, n, k)`, the polynomial coefficient of `r^{α(k+q/2)-1}`
/// before the `s` expansion.
pub fn w2<T: Scalar>(alpha: T, p: T, q: T, n: usize, k: usize) -> Result<T> {
    BasisSpec::polynomial(alpha, p, q)?;
    if k > n {
        return Err(FmrError::ParamError(format!("k={k} exceeds n={n}")));
    }
    let nt = T::from_usize_lossy(n);
    let kt = T::from_usize_lossy(k);
    let two = T::lit(2.0);
    let ln_norm = (alpha * (p + two * nt)).ln() + ln_gamma(q + nt) + ln_factorial::<T>(n)
        - T::TAU().ln()
        - ln_gamma(p + nt)
        - ln_gamma(p - q + nt + T::one());
    let ln_term = ln_gamma(p + nt + kt) - ln_factorial::<T>(k) - ln_factorial::<T>(n - k) - ln_gamma(q + kt);
    let mag = (ln_norm / two + ln_term).exp();
    Ok(if k % 2 == 1 { -mag } else { mag })
}

/// `W₃(p, q, s) = (-1)^s C((p - q)/2, s)`
pub fn w3<T: Scalar>(p: T, q: T, s: usize) -> T {
    let b = generalized_binomial((p - q) / T::lit(2.0), s);
    if s % 2 == 1 {
        -b
    } else {
        b
    }
}

pub fn w2_w3<T: Scalar>(alpha: T, p: T, q: T, n: usize, k: usize, s: usize) -> Result<(T, T)> {
    Ok((w2(alpha, p, q, n, k)?, w3(p, q, s)))
}

/// `1 + (-1)^{E+m}`: how many times the full-angle series counts a term of
/// integer exponent `E` at angular order `m`.
pub fn line_parity_factor(exponent: i64, m: i32) -> i32 {
    if (exponent + m as i64).rem_euclid(2) == 0 {
        2
    } else {
        0
    }
}

/// Parity of the radial exponent `E` when it is the same for every term
/// of the series, which is what makes [`line_parity_factor`] a single
/// factor per `m`.
pub fn series_parity<T: Scalar>(spec: &BasisSpec<T>) -> Option<i64> {
    let a = as_nonneg_integer(spec.alpha, "alpha").ok()?;
    match spec.family {
        Family::Harmonic => (a % 2 == 0).then_some((a / 2) as i64 % 2),
        Family::Polynomial { q, .. } => {
            let base = as_nonneg_integer(spec.alpha * q / T::lit(2.0), "alpha*q/2").ok()?;
            (a % 2 == 0).then_some(base as i64 % 2)
        }
    }
}

/// Truncation bounds of the explicit series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    pub k_max: usize,
    pub s_max: usize,
    /// Cap on the binomial index; `None` keeps the full support `t <= E`.
    pub t_max: Option<usize>,
    pub tail_tol: f64,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self { k_max: 20, s_max: 20, t_max: None, tail_tol: 1e-3 }
    }
}

impl SeriesTruncation {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0) {
            return Err(FmrError::ParamError(format!("tail_tol must be positive, got {}", self.tail_tol)));
        }
        Ok(())
    }
}

/// A truncated series value with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitValue<T> {
    /// Series value in the units of the sinogram (pixel line integrals).
    pub value: Complex<T>,
    /// Upper bound on the magnitude of the discarded terms, same units.
    pub tail: T,
    /// Sum of the term bounds over the whole series, same units.
    pub scale: T,
    /// Distinct `(ξ₁, ξ₂)` pairs consumed.
    pub exponents: usize,
    /// Magnitude of each retained outer shell (`k` for the harmonic
    /// family, `s` for the polynomial family).
    pub shells: Vec<T>,
}

/// Geometric moments and a radial histogram of `|f|`, reusable across orders.
#[derive(Debug, Clone)]
pub struct ExplicitOracle<T> {
    table: GeometricMomentTable<T>,
    /// `(ρ_hi, ∬_bin |f| dx dy)` per radial bin; bounds `∬ |f| ρ^E`.
    abs_bins: Vec<(T, T)>,
    radius: T,
}

const ABS_BINS: usize = 1024;

impl<T: Scalar> ExplicitOracle<T> {
    pub fn new(img: &GrayImage<T>, domain: &DiskDomain<T>, max_degree: usize) -> Self {
        let table = GeometricMomentTable::new(img, domain, max_degree);
        let area = T::one() / (domain.radius * domain.radius);
        let bins_t = T::from_usize_lossy(ABS_BINS);
        let mut mass = vec![T::zero(); ABS_BINS];
        for row in 0..img.height() {
            for col in 0..img.width() {
                let f = img.get(col, row).abs();
                if f == T::zero() || !domain.contains_pixel(col, row) {
                    continue;
                }
                let (rho, _) = domain.polar_of_pixel(col, row);
                let b = (rho * bins_t).floor().to_usize().unwrap_or(0).min(ABS_BINS - 1);
                mass[b] = mass[b] + f * area;
            }
        }
        let abs_bins = mass
            .into_iter()
            .enumerate()
            .filter(|(_, w)| *w > T::zero())
            .map(|(b, w)| ((T::from_usize_lossy(b + 1) / bins_t).min(T::one()), w))
            .collect();
        Self { table, abs_bins, radius: domain.radius }
    }

    pub fn table(&self) -> &GeometricMomentTable<T> {
        &self.table
    }

    /// Upper bound on `∬ |f| ρ^E dx dy`.
    fn abs_moment(&self, e: usize) -> T {
        let e = i32::try_from(e).unwrap_or(i32::MAX);
        self.abs_bins.iter().map(|&(r, w)| w * r.powi(e)).sum()
    }

    fn need(&self, degree: usize) -> Result<()> {
        if degree > self.table.max_degree() {
            return Err(FmrError::ParamError(format!(
                "series needs geometric moments of degree {degree}, table holds {}",
                self.table.max_degree()
            )));
        }
        Ok(())
    }

    /// `Σ_t C(E, t) Θ_{E-t,t} G_{E-t,t}`
    fn shell(&self, theta: &ThetaTable<T>, e: usize, t_max: Option<usize>, seen: &mut [bool]) -> Complex<T> {
        let et = T::from_usize_lossy(e);
        let top = t_max.map_or(e, |t| t.min(e));
        let mut acc = Complex::new(T::zero(), T::zero());
        for t in 0..=top {
            let g = self.table.get(e - t, t).expect("degree checked");
            seen[tri(e - t, t)] = true;
            acc = acc + theta.get(e - t, t) * (generalized_binomial(et, t) * g);
        }
        acc
    }

    /// Harmonic series for `α` an even integer.
    pub fn harmonic(&self, alpha: T, n: i32, m: i32, trunc: &SeriesTruncation) -> Result<ExplicitValue<T>> {
        trunc.validate()?;
        BasisSpec::harmonic(alpha)?;
        let a = as_nonneg_integer(alpha, "alpha")?;
        if a % 2 != 0 {
            return Err(FmrError::FractionalPowerOfNegative(format!(
                "alpha={alpha} gives exponent alpha*k + alpha/2 that is not an integer"
            )));
        }
        let exponent = |k: usize| a * k + a / 2;
        let degree = exponent(trunc.k_max);
        self.need(degree)?;
        let theta = ThetaTable::new(m, degree);
        let mut seen = vec![false; tri(0, degree) + 1];
        let mut value = Complex::new(T::zero(), T::zero());
        let mut shells = Vec::with_capacity(trunc.k_max + 1);
        let two_pi = T::TAU();
        let mut scale = T::zero();
        for k in 0..=trunc.k_max {
            let c = w1(alpha, n, k).conj();
            let term = if c.norm() == T::zero() {
                Complex::new(T::zero(), T::zero())
            } else {
                c * self.shell(&theta, exponent(k), trunc.t_max, &mut seen)
            };
            shells.push(term.norm());
            value = value + term;
            scale = scale + w1(alpha, n, k).norm() * two_pi * self.abs_moment(exponent(k));
        }
        let mut tail = T::zero();
        for k in trunc.k_max + 1..=trunc.k_max + TAIL_WINDOW {
            let b = w1(alpha, n, k).norm() * two_pi * self.abs_moment(exponent(k));
            tail = tail + b;
            if b == T::zero() || (k as f64 > 4.0 * std::f64::consts::TAU * n.abs() as f64 && b < tail * T::epsilon()) {
                break;
            }
        }
        self.finish(value, tail, scale + tail, seen, shells, trunc)
    }

    /// Polynomial series; needs integer `α` and integer `α q / 2`.
    pub fn polynomial(&self, spec: &BasisSpec<T>, n: usize, m: i32, trunc: &SeriesTruncation) -> Result<ExplicitValue<T>> {
        trunc.validate()?;
        spec.validate()?;
        let Family::Polynomial { p, q } = spec.family else {
            return Err(FmrError::ParamError("polynomial series needs the polynomial family".into()));
        };
        let a = as_nonneg_integer(spec.alpha, "alpha")?;
        let base = as_nonneg_integer(spec.alpha * q / T::lit(2.0), "alpha*q/2")?;
        let exponent = |s: usize, k: usize| a * (s + k) + base;
        // C((p-q)/2, s) vanishes beyond s = (p-q)/2 when that is a non-negative integer
        let half = (p - q) / T::lit(2.0);
        let s_top = match as_nonneg_integer(half, "(p-q)/2") {
            Ok(h) => h.min(trunc.s_max),
            Err(_) => trunc.s_max,
        };
        let terminates = as_nonneg_integer(half, "(p-q)/2").is_ok_and(|h| h <= trunc.s_max);
        let degree = exponent(s_top, n);
        self.need(degree)?;
        let theta = ThetaTable::new(m, degree);
        let mut seen = vec![false; tri(0, degree) + 1];
        let w2s: Vec<T> = (0..=n).map(|k| w2(spec.alpha, p, q, n, k)).collect::<Result<_>>()?;
        let two_pi = T::TAU();
        let bound = |s: usize| -> T {
            let w = w3(p, q, s).abs();
            w2s.iter().enumerate().map(|(k, c)| w * c.abs() * two_pi * self.abs_moment(exponent(s, k))).sum()
        };
        let mut value = Complex::new(T::zero(), T::zero());
        let mut shells = Vec::with_capacity(s_top + 1);
        let mut scale = T::zero();
        for s in 0..=s_top {
            let w = w3(p, q, s);
            let mut shell = Complex::new(T::zero(), T::zero());
            if w != T::zero() {
                for (k, &c) in w2s.iter().enumerate() {
                    shell = shell + self.shell(&theta, exponent(s, k), trunc.t_max, &mut seen) * (c * w);
                }
            }
            shells.push(shell.norm());
            value = value + shell;
            scale = scale + bound(s);
        }
        let mut tail = T::zero();
        if !terminates {
            for s in s_top + 1..=s_top + TAIL_WINDOW {
                let b = bound(s);
                tail = tail + b;
                if b == T::zero() || b < tail * T::epsilon() {
                    break;
                }
            }
        }
        self.finish(value, tail, scale + tail, seen, shells, trunc)
    }

    fn finish(
        &self,
        value: Complex<T>,
        tail: T,
        scale: T,
        seen: Vec<bool>,
        shells: Vec<T>,
        trunc: &SeriesTruncation,
    ) -> Result<ExplicitValue<T>> {
        let to_pixels = self.radius;
        let out = ExplicitValue {
            value: value * to_pixels,
            tail: tail * to_pixels,
            scale: scale * to_pixels,
            exponents: seen.iter().filter(|s| **s).count(),
            shells: shells.into_iter().map(|s| s * to_pixels).collect(),
        };
        if out.tail.as_f64() > trunc.tail_tol * out.scale.as_f64() {
            return Err(FmrError::TruncationNotConverged {
                tail: out.tail.as_f64(),
                tol: trunc.tail_tol * out.scale.as_f64(),
            });
        }
        Ok(out)
    }
}

/// One-off harmonic series for `(n, m)`.
pub fn fmr_explicit_harmonic<T: Scalar>(
    img: &GrayImage<T>,
    domain: &DiskDomain<T>,
    alpha: T,
    n: i32,
    m: i32,
    trunc: &SeriesTruncation,
) -> Result<ExplicitValue<T>> {
    let a = as_nonneg_integer(alpha, "alpha")?;
    ExplicitOracle::new(img, domain, a * trunc.k_max + a / 2).harmonic(alpha, n, m, trunc)
}

/// One-off polynomial series for `(n, m)`.
pub fn fmr_explicit_polynomial<T: Scalar>(
    img: &GrayImage<T>,
    domain: &DiskDomain<T>,
    spec: &BasisSpec<T>,
    n: usize,
    m: i32,
    trunc: &SeriesTruncation,
) -> Result<ExplicitValue<T>> {
    ExplicitOracle::new(img, domain, polynomial_degree(spec, n, trunc)?).polynomial(spec, n, m, trunc)
}

/// Highest geometric-moment degree the polynomial series at order `n` reads.
pub fn polynomial_degree<T: Scalar>(spec: &BasisSpec<T>, n: usize, trunc: &SeriesTruncation) -> Result<usize> {
    let Family::Polynomial { p, q } = spec.family else {
        return Err(FmrError::ParamError("polynomial series needs the polynomial family".into()));
    };
    let a = as_nonneg_integer(spec.alpha, "alpha")?;
    let base = as_nonneg_integer(spec.alpha * q / T::lit(2.0), "alpha*q/2")?;
    let s_top = as_nonneg_integer((p - q) / T::lit(2.0), "(p-q)/2").map_or(trunc.s_max, |h| h.min(trunc.s_max));
    Ok(a * (s_top + n) + base)
}

/// One row of a cross-validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossRow<T> {
    pub n: i32,
    pub m: i32,
    pub implicit: Complex<T>,
    pub explicit: Complex<T>,
    pub rel_diff: T,
    pub tail: T,
    /// [`line_parity_factor`] of this `m`, when the series has one.
    pub parity: Option<i32>,
    /// `|explicit / parity - implicit| / |implicit|` for a non-zero parity.
    pub corrected_rel_diff: Option<T>,
}

/// Compares a quadrature moment set against the series at the given orders.
pub fn cross_validate<T: Scalar>(
    img: &GrayImage<T>,
    domain: &DiskDomain<T>,
    implicit: &MomentSet<T>,
    orders: &[(i32, i32)],
    trunc: &SeriesTruncation,
) -> Result<Vec<CrossRow<T>>> {
    let spec = *implicit.spec();
    let degree = match spec.family {
        Family::Harmonic => {
            let a = as_nonneg_integer(spec.alpha, "alpha")?;
            a * trunc.k_max + a / 2
        }
        Family::Polynomial { .. } => {
            let n_top = orders.iter().map(|o| o.0.max(0) as usize).max().unwrap_or(0);
            polynomial_degree(&spec, n_top, trunc)?
        }
    };
    let oracle = ExplicitOracle::new(img, domain, degree);
    let parity_exp = series_parity(&spec);
    orders
        .par_iter()
        .map(|&(n, m)| {
            let imp = implicit.get(n, m).ok_or(FmrError::IncompleteMomentSet { n, m })?;
            let ex = match spec.family {
                Family::Harmonic => oracle.harmonic(spec.alpha, n, m, trunc)?,
                Family::Polynomial { .. } => {
                    if n < 0 {
                        return Err(FmrError::ParamError(format!("polynomial order must be non-negative, got {n}")));
                    }
                    oracle.polynomial(&spec, n as usize, m, trunc)?
                }
            };
            let denom = imp.norm().max(T::min_positive_value());
            let parity = parity_exp.map(|e| line_parity_factor(e, m));
            let corrected_rel_diff = parity
                .filter(|&f| f != 0)
                .map(|f| (ex.value.unscale(T::lit(f as f64)) - imp).norm() / denom);
            Ok(CrossRow {
                n,
                m,
                implicit: imp,
                explicit: ex.value,
                rel_diff: (ex.value - imp).norm() / denom,
                tail: ex.tail,
                parity,
                corrected_rel_diff,
            })
        })
        .collect()
}

pub fn write_cross_csv<T: Scalar, W: Write>(rows: &[CrossRow<T>], mut w: W) -> Result<()> {
    writeln!(w, "n,m,implicit_re,implicit_im,explicit_re,explicit_im,rel_diff,tail,parity,corrected_rel_diff")?;
    for r in rows {
        let parity = r.parity.map_or_else(String::new, |p| p.to_string());
        let corrected = r.corrected_rel_diff.map_or_else(String::new, |c| format!("{:e}", c.as_f64()));
        writeln!(
            w,
            "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{parity},{corrected}",
            r.n,
            r.m,
            r.implicit.re.as_f64(),
            r.implicit.im.as_f64(),
            r.explicit.re.as_f64(),
            r.explicit.im.as_f64(),
            r.rel_diff.as_f64(),
            r.tail.as_f64()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::radial_poly_direct;
    use crate::synth;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn disk_area_and_second_moment() {
        let img = synth::disk_indicator::<f64>(256);
        let d = DiskDomain::for_dims(256, 256);
        let g00 = geometric_moment(&img, &d, 0.0, 0.0, Support::Signed).unwrap();
        let g20 = geometric_moment(&img, &d, 2.0, 0.0, Support::Signed).unwrap();
        assert!((g00 - PI).abs() < 0.01 * PI, "{g00}");
        assert!((g20 - PI / 4.0).abs() < 0.01 * PI / 4.0, "{g20}");
        let t = GeometricMomentTable::new(&img, &d, 4);
        assert_relative_eq!(t.get(2, 0).unwrap(), g20, max_relative = 1e-12);
        assert!(t.get(3, 2).is_none());
    }

    #[test]
    fn odd_moment_of_symmetric_image_vanishes() {
        let img = synth::rings::<f64>(128);
        let d = DiskDomain::for_dims(128, 128);
        assert!(geometric_moment(&img, &d, 1.0, 0.0, Support::Signed).unwrap().abs() < 1e-3);
    }

    #[test]
    fn fractional_exponent_needs_quadrant_support() {
        let img = synth::blob::<f64>(32);
        let d = DiskDomain::for_dims(32, 32);
        assert!(matches!(
            geometric_moment(&img, &d, 0.5, 0.0, Support::Signed),
            Err(FmrError::FractionalPowerOfNegative(_))
        ));
        assert!(matches!(
            geometric_moment(&img, &d, 0.5, 0.0, Support::FirstQuadrant),
            Err(FmrError::FractionalPowerOfNegative(_))
        ));
        let quadrant = GrayImage::from_fn(32, 32, |c, r| if c >= 16 && r < 16 { 1.0 } else { 0.0 }).unwrap();
        assert!(geometric_moment(&quadrant, &d, 0.5, 1.5, Support::FirstQuadrant).unwrap() > 0.0);
    }

    #[test]
    fn theta_integrals() {
        let t = theta_integral::<f64>(0, 2.0, 0.0).unwrap();
        assert!((t - Complex::new(PI, 0.0)).norm() < 1e-10);
        let t = theta_integral::<f64>(1, 1.0, 0.0).unwrap();
        assert!((t - Complex::new(PI, 0.0)).norm() < 1e-10);
        // ∫ (cosθ - j sinθ) sinθ dθ = -jπ
        let t = theta_integral::<f64>(1, 0.0, 1.0).unwrap();
        assert!((t - Complex::new(0.0, -PI)).norm() < 1e-10);
        assert!(theta_integral::<f64>(0, 1.5, 0.0).is_err());
    }

    #[test]
    fn w1_values() {
        let a = 1.7f64;
        assert_relative_eq!(w1(a, 4, 0).re, (a / (2.0 * PI)).sqrt(), max_relative = 1e-14);
        assert_eq!(w1(a, 0, 3).norm(), 0.0);
        for k in 0..12 {
            let ratio = w1(a, 3, k + 1).norm() / w1(a, 3, k).norm();
            assert_relative_eq!(ratio, 6.0 * PI / (k as f64 + 1.0), max_relative = 1e-12);
        }
        // (j·2nπ)^1 with n < 0 points down the imaginary axis
        assert!(w1(a, -1, 1).im < 0.0 && w1(a, -1, 1).re.abs() < 1e-15);
    }

    #[test]
    fn w2_w3_values() {
        assert_eq!(w3(3.7f64, 1.2, 0), 1.0);
        for s in 1..5 {
            assert_eq!(w3(2.0f64, 2.0, s), 0.0);
        }
        // 2·sqrt(3/(2π)), checked against a 30-digit evaluation
        assert_relative_eq!(w2(2.0f64, 3.0, 2.0, 0, 0).unwrap(), 1.381_976_597_885_341_9, max_relative = 1e-13);
        assert!(w2(2.0f64, 3.0, 2.0, 1, 2).is_err());
    }

    #[test]
    fn coefficient_expansion_reproduces_radial_function() {
        // R_n(r) = Σ_k W₂ Σ_s W₃ r^{α(s+k+q/2)-1}
        let (alpha, p, q) = (2.0f64, 4.0, 2.0);
        for n in 0..5usize {
            for &r in &[0.2, 0.55, 0.9] {
                let mut acc = 0.0;
                for k in 0..=n {
                    for s in 0..=1 {
                        let (a, b) = w2_w3(alpha, p, q, n, k, s).unwrap();
                        acc += a * b * f64::powf(r, alpha * (s as f64 + k as f64 + q / 2.0) - 1.0);
                    }
                }
                let direct = radial_poly_direct(alpha, p, q, n, r).unwrap();
                assert_relative_eq!(acc, direct, max_relative = 1e-10, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_image_gives_zero_series() {
        let img = GrayImage::<f64>::zeros(32, 32).unwrap();
        let d = DiskDomain::for_dims(32, 32);
        let t = SeriesTruncation::default();
        let h = fmr_explicit_harmonic(&img, &d, 2.0, 1, 1, &t).unwrap();
        assert_eq!(h.value, Complex::new(0.0, 0.0));
        let spec = BasisSpec::polynomial(2.0, 4.0, 2.0).unwrap();
        let p = fmr_explicit_polynomial(&img, &d, &spec, 2, 0, &t).unwrap();
        assert_eq!(p.value, Complex::new(0.0, 0.0));
    }

    #[test]
    fn odd_or_fractional_alpha_rejected() {
        let img = synth::blob::<f64>(32);
        let d = DiskDomain::for_dims(32, 32);
        let t = SeriesTruncation::default();
        for a in [1.0, 1.5, 3.0] {
            assert!(matches!(
                fmr_explicit_harmonic(&img, &d, a, 1, 0, &t),
                Err(FmrError::FractionalPowerOfNegative(_))
            ));
        }
    }

    #[test]
    fn equal_p_q_keeps_only_first_s_term() {
        let img = synth::blob::<f64>(64);
        let d = DiskDomain::for_dims(64, 64);
        let t = SeriesTruncation::default();
        let spec = BasisSpec::polynomial(2.0, 2.0, 2.0).unwrap();
        let v = fmr_explicit_polynomial(&img, &d, &spec, 2, 0, &t).unwrap();
        assert_eq!(v.shells.len(), 1);
        assert_eq!(v.tail, 0.0);
    }

    #[test]
    fn shells_decay_past_the_factorial_turnover() {
        let img = synth::blob::<f64>(64);
        let d = DiskDomain::for_dims(64, 64);
        let t = SeriesTruncation { k_max: 30, ..Default::default() };
        let v = fmr_explicit_harmonic(&img, &d, 2.0, 1, 1, &t).unwrap();
        let turnover = (2.0 * PI).ceil() as usize;
        let late: Vec<f64> = v.shells[turnover + 2..].iter().copied().filter(|s| *s > 0.0).collect();
        assert!(late.windows(2).all(|w| w[1] <= w[0]), "{late:?}");
    }

    #[test]
    fn series_parity_is_constant_only_for_even_alpha() {
        assert_eq!(series_parity(&BasisSpec::harmonic(2.0).unwrap()), Some(1));
        assert_eq!(series_parity(&BasisSpec::harmonic(4.0).unwrap()), Some(0));
        assert_eq!(series_parity(&BasisSpec::harmonic(1.0).unwrap()), None);
        assert_eq!(series_parity(&BasisSpec::polynomial(2.0, 4.0, 2.0).unwrap()), Some(0));
        assert_eq!(series_parity(&BasisSpec::harmonic(1.5).unwrap()), None);
    }

    #[test]
    fn counts_parity_of_full_angle_lines() {
        assert_eq!(line_parity_factor(3, 1), 2);
        assert_eq!(line_parity_factor(3, 0), 0);
        assert_eq!(line_parity_factor(4, -2), 2);
    }
}

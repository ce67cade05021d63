//! Angular and fractional-order radial basis functions.
//!
//! Two radial families are provided: harmonic,
//! `R_n(r) = sqrt(α r^{α-2} / 2π) exp(j2nπ r^α)`, and Jacobi-polynomial,
//! evaluated either by the closed-form sum (exact rational arithmetic) or by
//! a normalized three-term recursion.

use std::io::Write;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{FmrError, Result};
use crate::scalar::Scalar;
use crate::special::{ln_factorial, ln_gamma};

/// Highest order the closed-form polynomial sum accepts.
pub const DIRECT_ORDER_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family<T> {
    Harmonic,
    Polynomial { p: T, q: T },
}

/// Radial family plus the fractional parameter `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec<T> {
    pub alpha: T,
    pub family: Family<T>,
}

impl<T: Scalar> BasisSpec<T> {
    pub fn harmonic(alpha: T) -> Result<Self> {
        let s = Self { alpha, family: Family::Harmonic };
        s.validate()?;
        Ok(s)
    }

    pub fn polynomial(alpha: T, p: T, q: T) -> Result<Self> {
        let s = Self { alpha, family: Family::Polynomial { p, q } };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero()) || !self.alpha.is_finite() {
            return Err(FmrError::ParamError(format!("alpha must be positive, got {}", self.alpha)));
        }
        if let Family::Polynomial { p, q } = self.family {
            check_pq(p, q)?;
        }
        Ok(())
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.family, Family::Polynomial { .. })
    }

    /// Radial orders `n` used with order bound `K`.
    pub fn radial_orders(&self, k: usize) -> std::ops::RangeInclusive<i32> {
        let k = k as i32;
        match self.family {
            Family::Harmonic => -k..=k,
            Family::Polynomial { .. } => 0..=k,
        }
    }

    pub fn cast<U: Scalar>(&self) -> BasisSpec<U> {
        BasisSpec {
            alpha: U::lit(self.alpha.as_f64()),
            family: match self.family {
                Family::Harmonic => Family::Harmonic,
                Family::Polynomial { p, q } => Family::Polynomial { p: U::lit(p.as_f64()), q: U::lit(q.as_f64()) },
            },
        }
    }
}

impl<T: Scalar> std::fmt::Display for BasisSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.family {
            Family::Harmonic => write!(f, "family=harmonic alpha={}", self.alpha),
            Family::Polynomial { p, q } => write!(f, "family=polynomial alpha={} p={} q={}", self.alpha, p, q),
        }
    }
}

fn check_pq<T: Scalar>(p: T, q: T) -> Result<()> {
    if !(q > T::zero()) {
        return Err(FmrError::ParamError(format!("q must be positive, got {q}")));
    }
    if !(p - q > -T::one()) {
        return Err(FmrError::ParamError(format!("p - q must exceed -1, got p={p} q={q}")));
    }
    // the normalization Γ(q)/(Γ(p)Γ(p-q+1)) is only positive for p > 0
    if !(p > T::zero()) {
        return Err(FmrError::ParamError(format!("p must be positive, got {p}")));
    }
    Ok(())
}

/// `exp(j m θ)`
#[inline]
pub fn angular<T: Scalar>(m: i32, theta: T) -> Complex<T> {
    Complex::from_polar(T::one(), T::from_i64_lossy(m as i64) * theta)
}

/// Harmonic radial function.
pub fn radial_harmonic<T: Scalar>(alpha: T, n: i32, r: T) -> Result<Complex<T>> {
    if !(alpha > T::zero()) {
        return Err(FmrError::ParamError(format!("alpha must be positive, got {alpha}")));
    }
    if !(r >= T::zero() && r <= T::one()) {
        return Err(FmrError::DomainError(format!("r={r} outside [0, 1]")));
    }
    if r == T::zero() && alpha < T::lit(2.0) {
        return Err(FmrError::DomainError(format!("harmonic radial function is unbounded at r=0 for alpha={alpha}")));
    }
    Ok(harmonic_unchecked(alpha, n, r))
}

#[inline]
fn harmonic_unchecked<T: Scalar>(alpha: T, n: i32, r: T) -> Complex<T> {
    let ra = r.powf(alpha);
    let mag = (alpha * r.powf(alpha - T::lit(2.0)) / T::TAU()).sqrt();
    // reduce the phase modulo one turn before scaling by 2π
    let turns = (T::from_i64_lossy(n as i64) * ra).fract();
    Complex::from_polar(mag, T::TAU() * turns)
}

fn poly_domain_check<T: Scalar>(alpha: T, p: T, q: T, r: T) -> Result<()> {
    if !(r >= T::zero() && r <= T::one()) {
        return Err(FmrError::DomainError(format!("r={r} outside [0, 1]")));
    }
    if r == T::zero() && alpha * q < T::lit(2.0) {
        return Err(FmrError::DomainError(format!("r^(alpha*q-2) is unbounded at r=0 (alpha={alpha}, q={q})")));
    }
    if r == T::one() && p < q {
        return Err(FmrError::DomainError(format!("(1-r^alpha)^(p-q) is unbounded at r=1 (p={p}, q={q})")));
    }
    Ok(())
}

/// `sqrt((p + 2n) α r^{αq-2} (1 - r^α)^{p-q} / 2π)`, shared by both polynomial paths.
fn poly_weight<T: Scalar>(alpha: T, p: T, q: T, n: usize, r: T) -> T {
    let x = r.powf(alpha);
    let two_n = T::from_usize_lossy(2 * n);
    let w = (p + two_n) * alpha * r.powf(alpha * q - T::lit(2.0)) * (T::one() - x).powf(p - q) / T::TAU();
    w.sqrt()
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// Exact `Σ_k (-1)^k (p)_{n+k} x^k / (k! (n-k)! (q)_k)`, counting additions.
fn poly_sum_exact(p: &BigRational, q: &BigRational, x: &BigRational, n: usize, adds: &mut u64) -> f64 {
    let one = BigRational::one();
    let mut term = BigRational::one();
    for i in 0..n {
        // (p)_n / n!
        term = term * (p + BigRational::from_integer(BigInt::from(i))) / BigRational::from_integer(BigInt::from(i + 1));
    }
    let mut sum = term.clone();
    for k in 1..=n {
        let kk = BigRational::from_integer(BigInt::from(k));
        let num = (p + BigRational::from_integer(BigInt::from(n + k - 1)))
            * BigRational::from_integer(BigInt::from(n - k + 1))
            * x;
        let den = &kk * (q + &kk - &one);
        term = -(term * num / den);
        sum += &term;
        *adds += 1;
    }
    sum.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial radial function by its closed-form sum.
///
/// The alternating sum is accumulated in exact rational arithmetic, so this
/// serves as an accuracy oracle; the gamma prefactor is formed in log space.
pub fn radial_poly_direct<T: Scalar>(alpha: T, p: T, q: T, n: usize, r: T) -> Result<T> {
    let mut adds = 0;
    radial_poly_direct_counted(alpha, p, q, n, r, &mut adds)
}

fn radial_poly_direct_counted<T: Scalar>(alpha: T, p: T, q: T, n: usize, r: T, adds: &mut u64) -> Result<T> {
    BasisSpec::polynomial(alpha, p, q)?;
    if n > DIRECT_ORDER_LIMIT {
        return Err(FmrError::StabilityError { order: n, limit: DIRECT_ORDER_LIMIT });
    }
    poly_domain_check(alpha, p, q, r)?;
    let (a, pf, qf, rf) = (alpha.as_f64(), p.as_f64(), q.as_f64(), r.as_f64());
    let x = rf.powf(a);
    let sum = poly_sum_exact(&rational(pf), &rational(qf), &rational(x), n, adds);
    let nf = n as f64;
    let ln_scale = 0.5
        * (ln_gamma(qf + nf) + ln_factorial::<f64>(n) - ln_gamma(pf + nf) - ln_gamma(pf - qf + nf + 1.0))
        + ln_gamma(pf)
        - ln_gamma(qf);
    let weight = poly_weight(a, pf, qf, n, rf);
    Ok(T::lit(weight * ln_scale.exp() * sum))
}

/// Samples of one radial function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable<T> {
    pub n: i32,
    pub r: Vec<T>,
    pub values: Vec<Complex<T>>,
}

impl<T: Scalar> RadialTable<T> {
    /// `r,re,im,abs,phase` rows for plotting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,re,im,abs,phase")?;
        for (r, v) in self.r.iter().zip(&self.values) {
            writeln!(w, "{},{},{},{},{}", r, v.re, v.im, v.norm(), v.arg())?;
        }
        Ok(())
    }
}

/// Operation counts from table construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    pub additions: u64,
}

fn check_grid<T: Scalar>(grid: &[T]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(FmrError::DegenerateGrid("radial grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Coefficients of the normalized three-term recursion `Q_n = C_n P_n`.
#[derive(Debug, Clone)]
pub struct PolyRecursion<T> {
    alpha: T,
    p: T,
    q: T,
    q0: T,
    // Q_1 = q1_scale * (1 - x (p+1)/q) * Q_0
    q1_scale: T,
    // per n >= 2: (a_n x + b_n) Q_{n-1} + c_n Q_{n-2}
    steps: Vec<(T, T, T)>,
}

impl<T: Scalar> PolyRecursion<T> {
    pub fn new(alpha: T, p: T, q: T, n_max: usize) -> Result<Self> {
        BasisSpec::polynomial(alpha, p, q)?;
        let one = T::one();
        let q0 = (T::lit(0.5) * (ln_gamma(p) - ln_gamma(q) - ln_gamma(p - q + one))).exp();
        let ratio = |n: usize| -> T {
            // C_n / C_{n-1}
            let nt = T::from_usize_lossy(n);
            ((nt * (q + nt - one)) / ((p + nt - one) * (p - q + nt))).sqrt()
        };
        let q1_scale = ratio(1) * p;
        let mut steps = Vec::with_capacity(n_max.saturating_sub(1));
        for n in 2..=n_max {
            let nt = T::from_usize_lossy(n);
            let two_n = nt + nt;
            let l1 = -(two_n + p - one) * (two_n + p - T::lit(2.0)) / (nt * (q + nt - one));
            let l2 = (p + two_n - T::lit(2.0)) + l1 * (nt - one) * (q + nt - T::lit(2.0)) / (p + two_n - T::lit(3.0));
            let l3 = (p + two_n - T::lit(4.0)) * (p + two_n - T::lit(3.0)) / T::lit(2.0)
                + l1 * (q + nt - T::lit(3.0)) * (nt - T::lit(2.0)) / T::lit(2.0)
                - (p + two_n - T::lit(4.0)) * l2;
            let c1 = ratio(n);
            let c2 = c1 * ratio(n - 1);
            steps.push((c1 * l1, c1 * l2, c2 * l3));
        }
        Ok(Self { alpha, p, q, q0, q1_scale, steps })
    }

    pub fn n_max(&self) -> usize {
        self.steps.len() + 1
    }

    /// `Q_0(x) .. Q_{n_max}(x)` at `x = r^α`, counting additions.
    pub fn normalized_polys(&self, x: T, adds: &mut u64) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n_max() + 1);
        out.push(self.q0);
        out.push(self.q1_scale * (T::one() - x * (self.p + T::one()) / self.q) * self.q0);
        *adds += 1;
        for &(a, b, c) in &self.steps {
            let k = out.len();
            out.push((a * x + b) * out[k - 1] + c * out[k - 2]);
            *adds += 2;
        }
        out
    }

    /// `R_0(r) .. R_{n_max}(r)` at one radius.
    pub fn radial(&self, r: T, adds: &mut u64) -> Result<Vec<T>> {
        poly_domain_check(self.alpha, self.p, self.q, r)?;
        let x = r.powf(self.alpha);
        let polys = self.normalized_polys(x, adds);
        Ok(polys
            .into_iter()
            .enumerate()
            .map(|(n, qn)| poly_weight(self.alpha, self.p, self.q, n, r) * qn)
            .collect())
    }
}

/// Polynomial tables for `n = 0..=n_max` by the normalized three-term recursion.
pub fn radial_poly_recursive<T: Scalar>(
    alpha: T,
    p: T,
    q: T,
    n_max: usize,
    grid: &[T],
) -> Result<(Vec<RadialTable<T>>, OpCount)> {
    check_grid(grid)?;
    let rec = PolyRecursion::new(alpha, p, q, n_max)?;
    let mut adds = 0u64;
    let mut columns = Vec::with_capacity(grid.len());
    for &r in grid {
        columns.push(rec.radial(r, &mut adds)?);
    }
    let tables = (0..=n_max)
        .map(|n| RadialTable {
            n: n as i32,
            r: grid.to_vec(),
            values: columns.iter().map(|c| Complex::new(c[n], T::zero())).collect(),
        })
        .collect();
    Ok((tables, OpCount { additions: adds }))
}

/// Polynomial tables for `n = 0..=n_max` by the closed-form sum.
pub fn radial_poly_direct_tables<T: Scalar>(
    alpha: T,
    p: T,
    q: T,
    n_max: usize,
    grid: &[T],
) -> Result<(Vec<RadialTable<T>>, OpCount)> {
    check_grid(grid)?;
    let mut adds = 0u64;
    let mut tables = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut values = Vec::with_capacity(grid.len());
        for &r in grid {
            values.push(Complex::new(radial_poly_direct_counted(alpha, p, q, n, r, &mut adds)?, T::zero()));
        }
        tables.push(RadialTable { n: n as i32, r: grid.to_vec(), values });
    }
    Ok((tables, OpCount { additions: adds }))
}

/// Radial samples `[order index][grid index]` for every order of `spec` up to `K`.
///
/// Polynomial tables come from the recursion; harmonic ones from the closed form.
pub fn radial_matrix<T: Scalar>(spec: &BasisSpec<T>, k: usize, grid: &[T]) -> Result<Vec<Vec<Complex<T>>>> {
    spec.validate()?;
    match spec.family {
        Family::Harmonic => {
            for &r in grid {
                radial_harmonic(spec.alpha, 0, r)?;
            }
            Ok(spec
                .radial_orders(k)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|n| grid.iter().map(|&r| harmonic_unchecked(spec.alpha, n, r)).collect())
                .collect())
        }
        Family::Polynomial { p, q } => {
            let (tables, _) = radial_poly_recursive(spec.alpha, p, q, k, grid)?;
            Ok(tables.into_iter().map(|t| t.values).collect())
        }
    }
}

/// Radial samples via the closed-form polynomial sum (oracle path).
pub fn radial_matrix_direct<T: Scalar>(spec: &BasisSpec<T>, k: usize, grid: &[T]) -> Result<Vec<Vec<Complex<T>>>> {
    match spec.family {
        Family::Harmonic => radial_matrix(spec, k, grid),
        Family::Polynomial { p, q } => {
            let (tables, _) = radial_poly_direct_tables(spec.alpha, p, q, k, grid)?;
            Ok(tables.into_iter().map(|t| t.values).collect())
        }
    }
}

const ZERO_SCAN: usize = 10_000;
const ZERO_TOL: f64 = 1e-10;

/// Sorted radial zeros in `(0, 1)`.
///
/// Harmonic: zeros of the real part, `r = ((2k+1)/(4|n|))^{1/α}`.
/// Polynomial: sign changes of the polynomial factor, refined by bisection.
pub fn zero_locations<T: Scalar>(spec: &BasisSpec<T>, n: i32) -> Result<Vec<T>> {
    spec.validate()?;
    let inv_alpha = T::one() / spec.alpha;
    match spec.family {
        Family::Harmonic => {
            let four_n = T::from_i64_lossy(4 * n.unsigned_abs() as i64);
            let mut out = Vec::new();
            if n == 0 {
                return Ok(out);
            }
            for k in 0.. {
                let x = T::from_i64_lossy(2 * k + 1) / four_n;
                if x >= T::one() {
                    break;
                }
                out.push(x.powf(inv_alpha));
            }
            Ok(out)
        }
        Family::Polynomial { p, q } => {
            if n < 0 {
                return Err(FmrError::ParamError(format!("polynomial order must be non-negative, got {n}")));
            }
            let n = n as usize;
            let rec = PolyRecursion::new(spec.alpha, p, q, n.max(1))?;
            let mut scratch = 0u64;
            let mut eval = |r: T| rec.normalized_polys(r.powf(spec.alpha), &mut scratch)[n];
            let scan = T::from_usize_lossy(ZERO_SCAN);
            let mut out = Vec::new();
            let mut lo = T::one() / scan;
            let mut f_lo = eval(lo);
            for i in 2..ZERO_SCAN {
                let hi = T::from_usize_lossy(i) / scan;
                let f_hi = eval(hi);
                if f_lo == T::zero() {
                    out.push(lo);
                } else if f_lo * f_hi < T::zero() {
                    let (mut a, mut b, mut fa) = (lo, hi, f_lo);
                    while b - a > T::lit(ZERO_TOL).max(T::epsilon() * T::lit(4.0)) {
                        let mid = (a + b) / T::lit(2.0);
                        let fm = eval(mid);
                        if fa * fm <= T::zero() {
                            b = mid;
                        } else {
                            a = mid;
                            fa = fm;
                        }
                    }
                    out.push((a + b) / T::lit(2.0));
                }
                lo = hi;
                f_lo = f_hi;
            }
            Ok(out)
        }
    }
}

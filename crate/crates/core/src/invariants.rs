//! Rotation-invariant descriptors built from moment sets, and the
//! minimum-distance classifier used by the recognition benchmark.

use std::fmt;
use std::io::Write;

use num_complex::Complex;

use crate::error::{FmrError, Result};
use crate::moments::{DomainTag, MomentSet};
use crate::scalar::Scalar;

/// Guard on factors raised to a negative power.
pub const NEAR_ZERO: f64 = 1e-9;

const BLOB_MAGIC: &[u8; 8] = b"FMRFEAT1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weighting {
    None,
    /// Multiply `|M_nm|` by `|n| + 1`; applied to Radon-domain sets only.
    NPlusOne,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::None => "none",
            Weighting::NPlusOne => "n_plus_1",
        })
    }
}

/// Real feature vector with its `(n, m)` layout in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    values: Vec<T>,
    layout: Vec<(i32, i32)>,
    weighting: Weighting,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new(layout: Vec<(i32, i32)>, values: Vec<T>, weighting: Weighting) -> Result<Self> {
        if layout.len() != values.len() {
            return Err(FmrError::LengthMismatch { expected: layout.len(), actual: values.len() });
        }
        if layout.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FmrError::format("feature vector", "layout must be strictly increasing in (n, m)"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FmrError::format("feature vector", "non-finite value"));
        }
        Ok(Self { values, layout, weighting })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn layout(&self) -> &[(i32, i32)] {
        &self.layout
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: i32, m: i32) -> Option<T> {
        self.layout.binary_search(&(n, m)).ok().map(|i| self.values[i])
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { values: self.values.iter().map(|&v| v * c).collect(), ..self.clone() }
    }

    /// Euclidean distance; layouts must match.
    pub fn distance(&self, other: &Self) -> Result<T> {
        if self.layout != other.layout {
            return Err(FmrError::LayoutMismatch);
        }
        Ok(self.values.iter().zip(&other.values).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = self.layout.iter().map(|(n, m)| format!("n{n}_m{m}")).collect();
        writeln!(w, "{}", header.join(","))?;
        let row: Vec<String> = self.values.iter().map(|v| format!("{:e}", v.as_f64())).collect();
        writeln!(w, "{}", row.join(","))?;
        Ok(())
    }

    /// Deterministic little-endian binary form.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.len() * 16);
        out.extend_from_slice(BLOB_MAGIC);
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        out.push(u8::from(self.weighting == Weighting::NPlusOne));
        out.extend_from_slice(&[0; 3]);
        for ((n, m), v) in self.layout.iter().zip(&self.values) {
            out.extend_from_slice(&n.to_le_bytes());
            out.extend_from_slice(&m.to_le_bytes());
            out.extend_from_slice(&v.as_f64().to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| FmrError::format("feature blob", msg.to_string());
        if bytes.len() < 16 || &bytes[..8] != BLOB_MAGIC {
            return Err(bad("bad magic"));
        }
        let len = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
        let weighting = if bytes[12] == 1 { Weighting::NPlusOne } else { Weighting::None };
        let body = &bytes[16..];
        if body.len() != len * 16 {
            return Err(bad("truncated body"));
        }
        let mut layout = Vec::with_capacity(len);
        let mut values = Vec::with_capacity(len);
        for rec in body.chunks_exact(16) {
            let n = i32::from_le_bytes(rec[0..4].try_into().expect("4 bytes"));
            let m = i32::from_le_bytes(rec[4..8].try_into().expect("4 bytes"));
            layout.push((n, m));
            values.push(T::lit(f64::from_le_bytes(rec[8..16].try_into().expect("8 bytes"))));
        }
        Self::new(layout, values, weighting)
    }
}

/// `|M_nm|` over the whole order set, times `|n| + 1` for weighted Radon-domain sets.
pub fn magnitude_features<T: Scalar>(ms: &MomentSet<T>, weighting: Weighting) -> FeatureVector<T> {
    let weighted = weighting == Weighting::NPlusOne && ms.tag() == DomainTag::Radon;
    let (layout, values) = ms
        .iter()
        .map(|(n, m, c)| {
            let w = if weighted { T::from_i64_lossy(n.abs() as i64 + 1) } else { T::one() };
            ((n, m), c.norm() * w)
        })
        .unzip();
    FeatureVector { values, layout, weighting }
}

/// Exponent pattern `(m_i, k_i)` with `Σ m_i k_i = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseCancelSpec {
    terms: Vec<(i32, i32)>,
}

impl PhaseCancelSpec {
    pub fn new(terms: Vec<(i32, i32)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(FmrError::ParamError("phase-cancellation spec needs at least one term".into()));
        }
        let sum: i64 = terms.iter().map(|&(m, k)| m as i64 * k as i64).sum();
        if sum != 0 {
            return Err(FmrError::ConstraintViolated(sum));
        }
        Ok(Self { terms })
    }

    /// `{(2, 1), (1, -2)}`, i.e. `M_{n,2} M_{n',1}^{-2}`.
    pub fn standard() -> Self {
        Self { terms: vec![(2, 1), (1, -2)] }
    }

    pub fn terms(&self) -> &[(i32, i32)] {
        &self.terms
    }
}

/// `Π_i M_{n_i, m_i}^{k_i}`, unchanged by `M_nm -> M_nm e^{jmφ}`.
pub fn phase_cancel_invariant<T: Scalar>(ms: &MomentSet<T>, spec: &PhaseCancelSpec, n_choices: &[i32]) -> Result<Complex<T>> {
    if n_choices.len() != spec.terms.len() {
        return Err(FmrError::LengthMismatch { expected: spec.terms.len(), actual: n_choices.len() });
    }
    if spec.terms.iter().all(|&(_, k)| k == 0) {
        log::warn!("phase-cancellation spec has only zero exponents; the invariant is identically 1");
    }
    let mut acc = Complex::new(T::one(), T::zero());
    for (&(m, k), &n) in spec.terms.iter().zip(n_choices) {
        if k == 0 {
            continue;
        }
        let c = ms.get(n, m).ok_or(FmrError::IncompleteMomentSet { n, m })?;
        if k < 0 && c.norm() < T::lit(NEAR_ZERO) {
            return Err(FmrError::NearZeroFactor { n, m, modulus: c.norm().as_f64() });
        }
        acc = acc * c.powi(k);
    }
    Ok(acc)
}

/// Label of the nearest training vector; ties go to the earliest entry.
pub fn min_distance_classify<'a, L, T: Scalar>(train: &'a [(L, FeatureVector<T>)], query: &FeatureVector<T>) -> Result<&'a L> {
    let mut best: Option<(T, &L)> = None;
    for (label, fv) in train {
        let d = fv.distance(query)?;
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, label));
        }
    }
    best.map(|(_, l)| l).ok_or(FmrError::EmptyTrainingSet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;

    fn sample_set() -> MomentSet<f64> {
        let spec = BasisSpec::harmonic(1.0).unwrap();
        let entries = (-2..=2).flat_map(|n| {
            (-2..=2).map(move |m| (n, m, Complex::new(1.0 + n as f64 * 0.3 + m as f64 * 0.1, 0.2 * m as f64 - 0.05 * n as f64)))
        });
        MomentSet::from_entries(spec, 2, DomainTag::Radon, entries).unwrap()
    }

    #[test]
    fn positive_real_coefficients_pass_through() {
        let spec = BasisSpec::harmonic(1.0).unwrap();
        let entries = (-1..=1).flat_map(|n| (-1..=1).map(move |m| (n, m, Complex::new((n + m + 3) as f64, 0.0))));
        let ms = MomentSet::from_entries(spec, 1, DomainTag::Image, entries).unwrap();
        let f = magnitude_features(&ms, Weighting::NPlusOne);
        for ((n, m), v) in f.layout().iter().zip(f.values()) {
            assert_eq!(*v, (n + m + 3) as f64);
        }
        let ms = MomentSet::from_entries(spec, 1, DomainTag::Radon, ms.iter()).unwrap();
        let f = magnitude_features(&ms, Weighting::NPlusOne);
        assert_eq!(f.get(-1, 0).unwrap(), 2.0 * 2.0);
    }

    #[test]
    fn global_phase_leaves_features_unchanged() {
        let ms = sample_set();
        let rotated = ms.map(|_, _, c| c * Complex::from_polar(1.0, 0.77));
        let a = magnitude_features(&ms, Weighting::None);
        let b = magnitude_features(&rotated, Weighting::None);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn phase_cancel_survives_angular_phase() {
        let ms = sample_set();
        let spec = PhaseCancelSpec::standard();
        let base = phase_cancel_invariant(&ms, &spec, &[1, 2]).unwrap();
        let turned = ms.map(|_, m, c| c * Complex::from_polar(1.0, m as f64 * 1.234));
        let after = phase_cancel_invariant(&turned, &spec, &[1, 2]).unwrap();
        assert!((base - after).norm() < 1e-10 * base.norm());
    }

    #[test]
    fn empty_exponents_give_one() {
        let ms = sample_set();
        let spec = PhaseCancelSpec::new(vec![(1, 0)]).unwrap();
        assert_eq!(phase_cancel_invariant(&ms, &spec, &[0]).unwrap(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn constraint_and_guard_enforced() {
        assert!(matches!(PhaseCancelSpec::new(vec![(2, 1), (1, -1)]), Err(FmrError::ConstraintViolated(1))));
        let ms = sample_set().map(|n, m, c| if (n, m) == (0, 1) { Complex::new(0.0, 0.0) } else { c });
        assert!(matches!(
            phase_cancel_invariant(&ms, &PhaseCancelSpec::standard(), &[1, 0]),
            Err(FmrError::NearZeroFactor { .. })
        ));
    }

    fn fv(vals: &[f64]) -> FeatureVector<f64> {
        FeatureVector::new((0..vals.len() as i32).map(|i| (0, i)).collect(), vals.to_vec(), Weighting::None).unwrap()
    }

    #[test]
    fn classifier_picks_nearest_and_breaks_ties_early() {
        let train = vec![("a", fv(&[0.0, 1.0])), ("b", fv(&[0.0, 2.0])), ("c", fv(&[0.0, 3.0]))];
        assert_eq!(*min_distance_classify(&train, &fv(&[0.0, 2.0])).unwrap(), "b");
        assert_eq!(*min_distance_classify(&train, &fv(&[0.0, 0.2])).unwrap(), "a");
        assert_eq!(*min_distance_classify(&train, &fv(&[0.0, 1.5])).unwrap(), "a");
        let empty: Vec<(&str, FeatureVector<f64>)> = Vec::new();
        assert!(matches!(min_distance_classify(&empty, &fv(&[0.0])), Err(FmrError::EmptyTrainingSet)));
        assert!(matches!(min_distance_classify(&train, &fv(&[0.0])), Err(FmrError::LayoutMismatch)));
    }

    #[test]
    fn blob_round_trip() {
        let f = magnitude_features(&sample_set(), Weighting::NPlusOne);
        let g = FeatureVector::<f64>::from_bytes(&f.to_bytes()).unwrap();
        assert_eq!(f, g);
        let mut csv = Vec::new();
        f.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("n-2_m-2,"));
    }
}

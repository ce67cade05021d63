//! Keyed perceptual hashing from moment magnitudes and XOR zero-watermarks.
//!
//! A key seed draws `B` parameter tuples `(n, m, α[, p, q])`. Each moment's
//! log-magnitude is standardized against the same moment over a fixed
//! ensemble of dead-leaves reference scenes, and bits above the median of the
//! standardized values are set. The zero-watermark is the hash XOR a
//! copyright code; nothing is embedded in the image.

use std::fmt;
use std::io::{BufRead, Write};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::BasisSpec;
use crate::error::{FmrError, Result};
use crate::harness::MomentDomain;
use crate::image::{disk_mask, GrayImage};
use crate::moments::PolarSamples;
use crate::radon::radon_forward;
use crate::scalar::Scalar;
use crate::synth::dead_leaves;

pub const RECORD_MAGIC: &str = "FMRZW1";
pub const MIN_BITS: usize = 8;

/// Which radial family the keyed draws use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HashFamily {
    Harmonic,
    Polynomial,
}

impl fmt::Display for HashFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HashFamily::Harmonic => "harmonic",
            HashFamily::Polynomial => "polynomial",
        })
    }
}

impl std::str::FromStr for HashFamily {
    type Err = FmrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" => Ok(HashFamily::Harmonic),
            "polynomial" => Ok(HashFamily::Polynomial),
            other => Err(FmrError::ParamError(format!("unknown family `{other}`"))),
        }
    }
}

/// Ranges of the keyed parameter draw. Versioned with the record so that a
/// verifier reproduces the same tuples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawRanges {
    /// `|n|, |m| <= order_max`; polynomial orders are `0..=order_max`.
    pub order_max: i32,
    pub alpha: (f64, f64),
    pub q: (f64, f64),
    /// `p - q` is drawn from this range; its lower end must exceed `-1`.
    pub p_minus_q: (f64, f64),
}

impl Default for DrawRanges {
    fn default() -> Self {
        Self { order_max: 20, alpha: (0.5, 2.0), q: (0.5, 4.0), p_minus_q: (-0.5, 3.0) }
    }
}

impl DrawRanges {
    pub fn validate(&self) -> Result<()> {
        let ordered = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
        if self.order_max < 1 {
            return Err(FmrError::ParamError(format!("order_max must be at least 1, got {}", self.order_max)));
        }
        if !ordered(self.alpha) || self.alpha.0 <= 0.0 {
            return Err(FmrError::ParamError(format!("bad alpha range {:?}", self.alpha)));
        }
        if !ordered(self.q) || self.q.0 <= 0.0 {
            return Err(FmrError::ParamError(format!("bad q range {:?}", self.q)));
        }
        if !ordered(self.p_minus_q) || self.p_minus_q.0 <= -1.0 {
            return Err(FmrError::ParamError(format!("bad p - q range {:?}", self.p_minus_q)));
        }
        Ok(())
    }
}

/// Dead-leaves scenes that define the typical magnitude of each moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceSet {
    pub count: usize,
    pub seed: u64,
}

impl Default for ReferenceSet {
    fn default() -> Self {
        Self { count: 8, seed: 0x5a57_0001 }
    }
}

/// Everything besides the key that determines a hash.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HashConfig {
    pub bits: usize,
    pub family: HashFamily,
    pub domain: MomentDomain,
    pub ranges: DrawRanges,
    pub reference: ReferenceSet,
}

impl HashConfig {
    pub fn fmr(bits: usize, family: HashFamily) -> Self {
        Self {
            bits,
            family,
            domain: MomentDomain::Radon,
            ranges: DrawRanges::default(),
            reference: ReferenceSet::default(),
        }
    }

    /// Same draws, computed on the image instead of its sinogram.
    pub fn fm(bits: usize, family: HashFamily) -> Self {
        Self { domain: MomentDomain::Image, ..Self::fmr(bits, family) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits < MIN_BITS {
            return Err(FmrError::BadLength(self.bits));
        }
        if self.reference.count < 2 {
            return Err(FmrError::ParamError(format!("need at least 2 reference scenes, got {}", self.reference.count)));
        }
        self.ranges.validate()
    }
}

/// One keyed draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HashTerm {
    pub n: i32,
    pub m: i32,
    pub alpha: f64,
    /// `(p, q)` for the polynomial family.
    pub pq: Option<(f64, f64)>,
}

/// The `B` parameter tuples generated by `key_seed`.
pub fn draw_terms(cfg: &HashConfig, key_seed: u64) -> Result<Vec<HashTerm>> {
    cfg.validate()?;
    let r = &cfg.ranges;
    let mut rng = ChaCha8Rng::seed_from_u64(key_seed);
    Ok((0..cfg.bits)
        .map(|_| {
            let n = match cfg.family {
                HashFamily::Harmonic => rng.random_range(-r.order_max..=r.order_max),
                HashFamily::Polynomial => rng.random_range(0..=r.order_max),
            };
            let m = rng.random_range(-r.order_max..=r.order_max);
            let alpha = rng.random_range(r.alpha.0..=r.alpha.1);
            let pq = match cfg.family {
                HashFamily::Harmonic => None,
                HashFamily::Polynomial => {
                    let q = rng.random_range(r.q.0..=r.q.1);
                    Some((q + rng.random_range(r.p_minus_q.0..=r.p_minus_q.1), q))
                }
            };
            HashTerm { n, m, alpha, pq }
        })
        .collect())
}

impl HashTerm {
    fn spec<T: Scalar>(&self) -> Result<BasisSpec<T>> {
        match self.pq {
            None => BasisSpec::harmonic(T::lit(self.alpha)),
            Some((p, q)) => BasisSpec::polynomial(T::lit(self.alpha), T::lit(p), T::lit(q)),
        }
    }
}

/// Moment magnitudes for each term, on the sinogram or the image.
pub fn term_magnitudes<T: Scalar>(img: &GrayImage<T>, terms: &[HashTerm], domain: MomentDomain) -> Result<Vec<f64>> {
    let dom = disk_mask(img);
    let side = img.width().min(img.height());
    let samples = match domain {
        MomentDomain::Radon => PolarSamples::from_sinogram(&radon_forward(img, &dom, side, side)?)?,
        MomentDomain::Image => PolarSamples::from_image(img, &dom, side)?,
    };
    terms
        .iter()
        .map(|t| Ok(samples.coefficient(&t.spec::<T>()?, t.n, t.m)?.norm().as_f64()))
        .collect()
}

fn log_magnitudes<T: Scalar>(img: &GrayImage<T>, terms: &[HashTerm], domain: MomentDomain) -> Result<Vec<f64>> {
    let mags = term_magnitudes(img, terms, domain)?;
    let floor = mags.iter().cloned().fold(0.0, f64::max) * 1e-12 + f64::MIN_POSITIVE;
    Ok(mags.into_iter().map(|v| (v + floor).ln()).collect())
}

/// Median split: bits above the median are set.
fn binarize(values: &[f64]) -> Vec<bool> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 0 { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) } else { sorted[n / 2] };
    values.iter().map(|&v| v > median).collect()
}

/// Keyed hasher for images of one size. Holds the drawn terms and the
/// per-term mean and spread of the reference log-magnitudes.
#[derive(Debug, Clone)]
pub struct Hasher {
    pub config: HashConfig,
    pub key_seed: u64,
    pub side: usize,
    terms: Vec<HashTerm>,
    mean: Vec<f64>,
    spread: Vec<f64>,
}

impl Hasher {
    pub fn new<T: Scalar>(cfg: &HashConfig, key_seed: u64, side: usize) -> Result<Self> {
        let terms = draw_terms(cfg, key_seed)?;
        let refs: Vec<Vec<f64>> = (0..cfg.reference.count as u64)
            .map(|i| {
                let scene = dead_leaves::<T>(side, cfg.reference.seed.wrapping_add(i));
                log_magnitudes(&scene, &terms, cfg.domain)
            })
            .collect::<Result<_>>()?;
        let count = refs.len() as f64;
        let mean: Vec<f64> = (0..terms.len()).map(|t| refs.iter().map(|r| r[t]).sum::<f64>() / count).collect();
        let spread = (0..terms.len())
            .map(|t| {
                let var = refs.iter().map(|r| (r[t] - mean[t]).powi(2)).sum::<f64>() / count;
                var.sqrt().max(1e-9)
            })
            .collect();
        Ok(Self { config: *cfg, key_seed, side, terms, mean, spread })
    }

    pub fn terms(&self) -> &[HashTerm] {
        &self.terms
    }

    pub fn hash<T: Scalar>(&self, img: &GrayImage<T>) -> Result<Bits> {
        let side = img.width().min(img.height());
        if side != self.side {
            return Err(FmrError::DimMismatch((side, side), (self.side, self.side)));
        }
        let logs = log_magnitudes(img, &self.terms, self.config.domain)?;
        let z: Vec<f64> = logs.iter().zip(&self.mean).zip(&self.spread).map(|((l, m), s)| (l - m) / s).collect();
        Ok(Bits(binarize(&z)))
    }
}

/// Keyed perceptual hash of `cfg.bits` bits.
pub fn perceptual_hash<T: Scalar>(img: &GrayImage<T>, key_seed: u64, cfg: &HashConfig) -> Result<Bits> {
    Hasher::new::<T>(cfg, key_seed, img.width().min(img.height()))?.hash(img)
}

/// A fixed-length bit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits(pub Vec<bool>);

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn xor(&self, other: &Bits) -> Result<Bits> {
        check_len(self.len(), other.len())?;
        Ok(Bits(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect()))
    }

    pub fn hamming(&self, other: &Bits) -> Result<usize> {
        check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }

    /// Packs MSB first; the last byte is zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i))))
            .collect()
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Bits> {
        if bytes.len() * 8 < len {
            return Err(FmrError::LengthMismatch { expected: len.div_ceil(8), actual: bytes.len() });
        }
        Ok(Bits((0..len).map(|i| bytes[i / 8] >> (7 - i % 8) & 1 == 1).collect()))
    }

    pub fn to_base64(&self) -> String {
        STANDARD.encode(self.to_bytes())
    }

    pub fn from_base64(text: &str, len: usize) -> Result<Bits> {
        let bytes = STANDARD.decode(text.trim()).map_err(|e| FmrError::format("base64 bits", e.to_string()))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(FmrError::LengthMismatch { expected: len.div_ceil(8), actual: bytes.len() });
        }
        Bits::from_bytes(&bytes, len)
    }

    /// `0`/`1` characters.
    pub fn to_bit_string(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_bit_string(s: &str) -> Result<Bits> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(FmrError::format("bit string", format!("unexpected character `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(FmrError::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Copyright code bound to an image by a zero-watermark.
pub type CopyrightCode = Bits;

/// Self-describing zero-watermark record.
#[derive(Debug, Clone, PartialEq)]
pub struct WatermarkRecord {
    pub zero_watermark: Bits,
    pub key_seed: u64,
    pub config: HashConfig,
}

impl WatermarkRecord {
    pub fn bits(&self) -> usize {
        self.zero_watermark.len()
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let r = &self.config.ranges;
        writeln!(w, "{RECORD_MAGIC}")?;
        writeln!(w, "key_seed={}", self.key_seed)?;
        writeln!(w, "bits={}", self.bits())?;
        writeln!(w, "family={}", self.config.family)?;
        writeln!(w, "domain={}", self.config.domain)?;
        writeln!(w, "order_max={}", r.order_max)?;
        writeln!(w, "alpha_range={:?},{:?}", r.alpha.0, r.alpha.1)?;
        writeln!(w, "q_range={:?},{:?}", r.q.0, r.q.1)?;
        writeln!(w, "p_minus_q_range={:?},{:?}", r.p_minus_q.0, r.p_minus_q.1)?;
        writeln!(w, "reference=dead_leaves,{},{}", self.config.reference.count, self.config.reference.seed)?;
        writeln!(w, "zero_watermark={}", self.zero_watermark.to_base64())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("record text is ASCII")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let bad = |reason: String| FmrError::format("watermark record", reason);
        let mut lines = r.lines();
        match lines.next().transpose()? {
            Some(l) if l.trim() == RECORD_MAGIC => {}
            other => return Err(bad(format!("expected `{RECORD_MAGIC}`, found {other:?}"))),
        }
        let mut fields = std::collections::HashMap::new();
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("expected key=value, found `{line}`")))?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| fields.get(k).ok_or_else(|| bad(format!("missing `{k}`")));
        let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(format!("bad number in `{k}`"))) };
        let pair = |k: &str| -> Result<(f64, f64)> {
            let v = get(k)?;
            let (a, b) = v.split_once(',').ok_or_else(|| bad(format!("`{k}` needs two values")))?;
            let p = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("bad number in `{k}`")));
            Ok((p(a)?, p(b)?))
        };
        let bits = num("bits")? as usize;
        let key_seed = get("key_seed")?.parse().map_err(|_| bad("bad key_seed".into()))?;
        let domain = match get("domain")?.as_str() {
            "FMR" => MomentDomain::Radon,
            "FM" => MomentDomain::Image,
            other => return Err(bad(format!("unknown domain `{other}`"))),
        };
        let config = HashConfig {
            bits,
            family: get("family")?.parse()?,
            domain,
            ranges: DrawRanges {
                order_max: num("order_max")? as i32,
                alpha: pair("alpha_range")?,
                q: pair("q_range")?,
                p_minus_q: pair("p_minus_q_range")?,
            },
            reference: {
                let v = get("reference")?;
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                match parts.as_slice() {
                    ["dead_leaves", count, seed] => ReferenceSet {
                        count: count.parse().map_err(|_| bad("bad reference count".into()))?,
                        seed: seed.parse().map_err(|_| bad("bad reference seed".into()))?,
                    },
                    _ => return Err(bad(format!("unknown reference `{v}`"))),
                }
            },
        };
        config.validate()?;
        let zero_watermark = Bits::from_base64(get("zero_watermark")?, bits)?;
        Ok(Self { zero_watermark, key_seed, config })
    }
}

/// `zero_watermark = hash(img) XOR code`.
pub fn register<T: Scalar>(img: &GrayImage<T>, code: &CopyrightCode, key_seed: u64, cfg: &HashConfig) -> Result<WatermarkRecord> {
    cfg.validate()?;
    check_len(cfg.bits, code.len())?;
    let hash = perceptual_hash(img, key_seed, cfg)?;
    Ok(WatermarkRecord { zero_watermark: hash.xor(code)?, key_seed, config: *cfg })
}

/// Recovered code and its bit error ratio against `reference`.
pub fn verify<T: Scalar>(img: &GrayImage<T>, record: &WatermarkRecord, reference: &CopyrightCode) -> Result<(CopyrightCode, f64)> {
    check_len(record.bits(), reference.len())?;
    check_len(record.config.bits, record.bits())?;
    recover(&perceptual_hash(img, record.key_seed, &record.config)?, record, reference)
}

/// [`verify`] for a hash computed elsewhere, e.g. with a shared [`Hasher`].
pub fn recover(hash: &Bits, record: &WatermarkRecord, reference: &CopyrightCode) -> Result<(CopyrightCode, f64)> {
    check_len(record.bits(), reference.len())?;
    let recovered = hash.xor(&record.zero_watermark)?;
    let ber = recovered.hamming(reference)? as f64 / reference.len() as f64;
    Ok((recovered, ber))
}

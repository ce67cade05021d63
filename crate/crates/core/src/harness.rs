//! Desk-scale experiment protocols: feature stability under noise,
//! reconstruction quality against `K`, and the rotation + noise recognition
//! benchmark.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::basis::BasisSpec;
use crate::degrade::{add_gaussian_noise, rotate};
use crate::error::{FmrError, Result};
use crate::image::{disk_mask, GrayImage};
use crate::invariants::{magnitude_features, min_distance_classify, FeatureVector, Weighting};
use crate::metrics::{mse_reconstruction_error, ssim};
use crate::moments::{fm_image, fmr, reconstruct, reconstruct_image, PolarSamples};
use crate::radon::radon_forward;
use crate::scalar::Scalar;

/// Which function the moments are taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentDomain {
    /// FMR: moments of the sinogram.
    Radon,
    /// FM: moments of the image itself.
    Image,
}

impl fmt::Display for MomentDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MomentDomain::Radon => "FMR",
            MomentDomain::Image => "FM",
        })
    }
}

/// One descriptor configuration of the benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct Method<T> {
    pub label: String,
    pub spec: BasisSpec<T>,
    pub k: usize,
    pub domain: MomentDomain,
    pub weighting: Weighting,
}

impl<T: Scalar> Method<T> {
    /// FMR magnitudes with the `|n| + 1` weighting.
    pub fn fmr(spec: BasisSpec<T>, k: usize) -> Self {
        Self { label: format!("FMR {spec} K={k}"), spec, k, domain: MomentDomain::Radon, weighting: Weighting::NPlusOne }
    }

    /// Unweighted FM magnitudes.
    pub fn fm(spec: BasisSpec<T>, k: usize) -> Self {
        Self { label: format!("FM {spec} K={k}"), spec, k, domain: MomentDomain::Image, weighting: Weighting::None }
    }

    pub fn features(&self, img: &GrayImage<T>) -> Result<FeatureVector<T>> {
        let dom = disk_mask(img);
        let ms = match self.domain {
            MomentDomain::Radon => {
                let g = sinogram_side(img, self.k);
                fmr(&radon_forward(img, &dom, g, g)?, &self.spec, self.k)?
            }
            MomentDomain::Image => fm_image(img, &dom, &self.spec, self.k)?,
        };
        Ok(magnitude_features(&ms, self.weighting))
    }
}

/// Square sinogram side used for an image: `max(N, 4K)`.
pub fn sinogram_side<T: Scalar>(img: &GrayImage<T>, k: usize) -> usize {
    img.width().min(img.height()).max(4 * k)
}

/// Seed component derived from pixel values, so a trial's noise follows the
/// image rather than its position in the dataset.
pub fn content_seed<T: Scalar>(img: &GrayImage<T>) -> u64 {
    let mut z = trial_seed(img.width() as u64, &[img.height() as u64]);
    for p in img.pixels() {
        z = trial_seed(z, &[p.as_f64().to_bits()]);
    }
    z
}

/// Deterministic per-trial seed.
pub fn trial_seed(base: u64, parts: &[u64]) -> u64 {
    // splitmix64 folding
    let mut z = base;
    for &p in parts {
        z = z.wrapping_add(p).wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig<T> {
    pub methods: Vec<Method<T>>,
    pub variances: Vec<f64>,
    pub angles: Vec<f64>,
    pub seed: u64,
}

impl<T: Scalar> BenchmarkConfig<T> {
    /// Variances `{0, 0.05, ..., 0.3}` and angles `{0, 10, ..., 350}`.
    pub fn full_protocol(methods: Vec<Method<T>>, seed: u64) -> Self {
        Self {
            methods,
            variances: (0..=6).map(|i| i as f64 * 0.05).collect(),
            angles: (0..36).map(|i| i as f64 * 10.0).collect(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.variances.is_empty() || self.angles.is_empty() {
            return Err(FmrError::ParamError("benchmark needs methods, variances and angles".into()));
        }
        if let Some(v) = self.variances.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(FmrError::ParamError(format!("variance {v} outside [0, 1]")));
        }
        if let Some(a) = self.angles.iter().find(|a| !(0.0..360.0).contains(*a)) {
            return Err(FmrError::ParamError(format!("angle {a} outside [0, 360)")));
        }
        if let Some(m) = self.methods.iter().find(|m| m.k == 0) {
            return Err(FmrError::ParamError(format!("method `{}` has K = 0", m.label)));
        }
        for m in &self.methods {
            m.spec.validate()?;
        }
        Ok(())
    }
}

/// Correct-classification counts per method and variance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccuracyTable {
    pub methods: Vec<String>,
    pub variances: Vec<String>,
    /// `correct[method][variance]`
    pub correct: Vec<Vec<usize>>,
    pub trials_per_cell: usize,
}

impl AccuracyTable {
    pub fn percent(&self, method: usize, variance: usize) -> f64 {
        self.correct[method][variance] as f64 * 100.0 / self.trials_per_cell as f64
    }

    /// Mean percentage over the given variance columns.
    pub fn mean_percent(&self, method: usize, columns: &[usize]) -> f64 {
        let hits: usize = columns.iter().map(|&j| self.correct[method][j]).sum();
        hits as f64 * 100.0 / (self.trials_per_cell * columns.len()) as f64
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "method,variance,correct,trials,percent")?;
        for (i, m) in self.methods.iter().enumerate() {
            for (j, v) in self.variances.iter().enumerate() {
                writeln!(w, "\"{m}\",{v},{},{},{:.4}", self.correct[i][j], self.trials_per_cell, self.percent(i, j))?;
            }
        }
        Ok(())
    }
}

/// Trains on the clean images (one class each) and classifies every
/// rotated, noised copy. All methods see the same degraded images.
pub fn run_recognition_benchmark<T: Scalar>(cfg: &BenchmarkConfig<T>, images: &[GrayImage<T>]) -> Result<AccuracyTable> {
    cfg.validate()?;
    if images.len() < 2 {
        return Err(FmrError::EmptyDataset(format!("recognition needs at least 2 classes, got {}", images.len())));
    }
    let train: Vec<Vec<(usize, FeatureVector<T>)>> = cfg
        .methods
        .iter()
        .map(|m| images.iter().enumerate().map(|(c, img)| Ok((c, m.features(img)?))).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let content: Vec<u64> = images.iter().map(content_seed).collect();
    let trials: Vec<(usize, usize, usize)> = (0..images.len())
        .flat_map(|c| (0..cfg.variances.len()).flat_map(move |j| (0..cfg.angles.len()).map(move |a| (c, j, a))))
        .collect();
    let hits: Vec<(usize, Vec<bool>)> = trials
        .par_iter()
        .map(|&(c, j, a)| {
            let seed = trial_seed(cfg.seed, &[content[c], j as u64, a as u64]);
            let query = add_gaussian_noise(&rotate(&images[c], cfg.angles[a]), cfg.variances[j], seed)?;
            let per_method = cfg
                .methods
                .iter()
                .zip(&train)
                .map(|(m, t)| Ok(*min_distance_classify(t, &m.features(&query)?)? == c))
                .collect::<Result<Vec<bool>>>()?;
            Ok((j, per_method))
        })
        .collect::<Result<_>>()?;
    let mut correct = vec![vec![0usize; cfg.variances.len()]; cfg.methods.len()];
    for (j, per_method) in hits {
        for (i, ok) in per_method.into_iter().enumerate() {
            correct[i][j] += usize::from(ok);
        }
    }
    Ok(AccuracyTable {
        methods: cfg.methods.iter().map(|m| m.label.clone()).collect(),
        variances: cfg.variances.iter().map(|v| format!("{v}")).collect(),
        correct,
        trials_per_cell: images.len() * cfg.angles.len(),
    })
}

/// One image's single-feature magnitude across the noise levels.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRow {
    pub label: String,
    pub values: Vec<f64>,
}

impl HistogramRow {
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        hi - lo
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Spread divided by the mean magnitude.
    pub fn relative_spread(&self) -> f64 {
        let m = self.mean();
        if m == 0.0 {
            0.0
        } else {
            self.spread() / m
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramReport {
    pub order: (i32, i32),
    pub variances: Vec<f64>,
    pub rows: Vec<HistogramRow>,
}

impl HistogramReport {
    /// Largest within-series spread.
    pub fn within_spread(&self) -> f64 {
        self.rows.iter().map(HistogramRow::spread).fold(0.0, f64::max)
    }

    /// Smallest gap between the series means of two images.
    pub fn between_gap(&self) -> f64 {
        let means: Vec<f64> = self.rows.iter().map(HistogramRow::mean).collect();
        let mut gap = f64::INFINITY;
        for i in 0..means.len() {
            for j in i + 1..means.len() {
                gap = gap.min((means[i] - means[j]).abs());
            }
        }
        gap
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "image,variance,n,m,magnitude")?;
        for row in &self.rows {
            for (v, x) in self.variances.iter().zip(&row.values) {
                writeln!(w, "\"{}\",{v},{},{},{x:e}", row.label, self.order.0, self.order.1)?;
            }
        }
        Ok(())
    }
}

/// `|M_nm|` of every image under each noise variance.
pub fn run_histogram_study<T: Scalar>(
    images: &[(String, GrayImage<T>)],
    variances: &[f64],
    spec: &BasisSpec<T>,
    order: (i32, i32),
    domain: MomentDomain,
    seed: u64,
) -> Result<HistogramReport> {
    if images.len() < 2 {
        return Err(FmrError::EmptyDataset(format!("histogram study needs at least 2 images, got {}", images.len())));
    }
    if variances.is_empty() {
        return Err(FmrError::ParamError("no noise variances given".into()));
    }
    spec.validate()?;
    let rows = images
        .par_iter()
        .map(|(label, img)| {
            let dom = disk_mask(img);
            let values = variances
                .iter()
                .enumerate()
                .map(|(j, &var)| {
                    let noisy = add_gaussian_noise(img, var, trial_seed(seed, &[content_seed(img), j as u64]))?;
                    let polar = match domain {
                        MomentDomain::Radon => {
                            let g = sinogram_side(img, 0);
                            PolarSamples::from_sinogram(&radon_forward(&noisy, &dom, g, g)?)?
                        }
                        MomentDomain::Image => PolarSamples::from_image(&noisy, &dom, sinogram_side(img, 0))?,
                    };
                    Ok(polar.coefficient(spec, order.0, order.1)?.norm().as_f64())
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(HistogramRow { label: label.clone(), values })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HistogramReport { order, variances: variances.to_vec(), rows })
}

/// Quality of FM and FMR reconstructions of one noisy image at one `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconRow {
    pub k: usize,
    pub msre_fm: f64,
    pub msre_fmr: f64,
    pub ssim_fm: f64,
    pub ssim_fmr: f64,
}

pub fn write_recon_csv<W: Write>(rows: &[ReconRow], mut w: W) -> Result<()> {
    writeln!(w, "k,msre_fm,msre_fmr,ssim_fm,ssim_fmr")?;
    for r in rows {
        writeln!(w, "{},{:e},{:e},{:e},{:e}", r.k, r.msre_fm, r.msre_fmr, r.ssim_fm, r.ssim_fmr)?;
    }
    Ok(())
}

/// Reconstructs the noisy image from FM and from FMR at each `K` and scores
/// both against the clean original.
///
/// The sinogram is sampled on a `max(N, 4 K_max)` square grid.
pub fn run_reconstruction_study<T: Scalar>(
    img: &GrayImage<T>,
    noise_var: f64,
    seed: u64,
    spec: &BasisSpec<T>,
    ks: &[usize],
) -> Result<Vec<ReconRow>> {
    spec.validate()?;
    if ks.is_empty() || ks.contains(&0) {
        return Err(FmrError::ParamError("K list must be non-empty and positive".into()));
    }
    if img.width() != img.height() {
        return Err(FmrError::InvalidImage(format!("reconstruction needs a square image, got {:?}", img.dims())));
    }
    let n = img.width();
    let dom = disk_mask(img);
    let noisy = add_gaussian_noise(img, noise_var, seed)?;
    let g = sinogram_side(img, *ks.iter().max().expect("non-empty"));
    let sino = radon_forward(&noisy, &dom, g, g)?;
    ks.iter()
        .map(|&k| {
            let (_, from_fmr) = reconstruct(&fmr(&sino, spec, k)?, (g, g), n)?;
            let from_fm = reconstruct_image(&fm_image(&noisy, &dom, spec, k)?, n)?;
            Ok(ReconRow {
                k,
                msre_fm: mse_reconstruction_error(img, &from_fm)?,
                msre_fmr: mse_reconstruction_error(img, &from_fmr)?,
                ssim_fm: ssim(img, &from_fm)?,
                ssim_fmr: ssim(img, &from_fmr)?,
            })
        })
        .collect()
}

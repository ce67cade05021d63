use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use fmr_core::basis::{radial_matrix, BasisSpec, RadialTable};
use fmr_core::degrade::{add_gaussian_noise, rotate};
use fmr_core::explicit::{cross_validate, write_cross_csv, SeriesTruncation};
use fmr_core::harness::{
    run_histogram_study, run_reconstruction_study, run_recognition_benchmark, write_recon_csv, BenchmarkConfig,
    Method, MomentDomain,
};
use fmr_core::invariants::Weighting;
use fmr_core::io::{load_gray, save_gray};
use fmr_core::moments::{fm_image, fmr_direct, fmr_harmonic_fft, fmr_polynomial, reconstruct, DomainTag, MomentSet};
use fmr_core::radon::{radon_forward_warped, uniform_radii};
use fmr_core::watermark::{perceptual_hash, register, Bits, HashConfig, HashFamily, WatermarkRecord};
use fmr_core::{disk_mask, FmrError, radon_forward, synth, BasisSpec64, GrayImage64, MomentSet64};

use crate::args::*;
use crate::config::{pick, FileConfig, Settings};
use crate::UsageError;

pub fn dispatch(cmd: Command, file: &FileConfig) -> Result<()> {
    match cmd {
        Command::Radon(a) => radon(a, file),
        Command::Moments(a) => moments(a, file),
        Command::Reconstruct(a) => reconstruct_cmd(a, file),
        Command::Features(a) => features(a, file),
        Command::XvalExplicit(a) => xval(a, file),
        Command::BenchHistogram(a) => bench_histogram(a, file),
        Command::BenchReconstruct(a) => bench_reconstruct(a, file),
        Command::BenchRecognize(a) => bench_recognize(a, file),
        Command::Zw(ZwCommand::Register(a)) => zw_register(a, file),
        Command::Zw(ZwCommand::Verify(a)) => zw_verify(a, file),
        Command::PlotBasis(a) => plot_basis(a, file),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

struct Basis {
    family: FamilyArg,
    alpha: f64,
    p: f64,
    q: f64,
}

impl Basis {
    fn resolve(a: &BasisArgs, file: &FileConfig) -> Self {
        Self {
            family: pick(a.family, file.family, FamilyArg::Harmonic),
            alpha: pick(a.alpha, file.alpha, 1.0),
            p: pick(a.p, file.p, 3.0),
            q: pick(a.q, file.q, 2.0),
        }
    }

    fn spec(&self) -> Result<BasisSpec64> {
        match self.family {
            FamilyArg::Harmonic => BasisSpec::harmonic(self.alpha),
            FamilyArg::Polynomial => BasisSpec::polynomial(self.alpha, self.p, self.q),
        }
        .map_err(|e| usage(e.to_string()))
    }

    fn record(&self, s: &mut Settings) {
        match self.family {
            FamilyArg::Harmonic => s.set("family", "harmonic").set("alpha", self.alpha),
            FamilyArg::Polynomial => s.set("family", "polynomial").set("alpha", self.alpha).set("p", self.p).set("q", self.q),
        };
    }
}

struct Degrade {
    noise_var: f64,
    angle: f64,
    seed: u64,
}

impl Degrade {
    fn resolve(a: &DegradeArgs, file: &FileConfig) -> Result<Self> {
        let d = Self {
            noise_var: pick(a.noise_var, file.noise_var, 0.0),
            angle: pick(a.angle, file.angle, 0.0),
            seed: pick(a.seed, file.seed, 0),
        };
        if !(d.noise_var >= 0.0) {
            return Err(usage(format!("noise variance must be non-negative, got {}", d.noise_var)));
        }
        Ok(d)
    }

    fn record(&self, s: &mut Settings) {
        s.set("noise_var", self.noise_var).set("angle", self.angle).set("seed", self.seed);
    }

    /// Rotation first, then noise.
    fn apply(&self, img: GrayImage64) -> Result<GrayImage64> {
        let img = if self.angle != 0.0 { rotate(&img, self.angle) } else { img };
        Ok(if self.noise_var > 0.0 { add_gaussian_noise(&img, self.noise_var, self.seed)? } else { img })
    }
}

fn domain_name(d: DomainArg) -> &'static str {
    match d {
        DomainArg::Fmr => "fmr",
        DomainArg::Fm => "fm",
    }
}

fn moment_domain(d: DomainArg) -> MomentDomain {
    match d {
        DomainArg::Fmr => MomentDomain::Radon,
        DomainArg::Fm => MomentDomain::Image,
    }
}

fn load(path: &Path) -> Result<GrayImage64> {
    Ok(load_gray(path)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Writes `body` with the settings header. Text formats that open with a
/// magic line keep it first and get the header on the second line.
fn write_text(path: &Path, settings: &Settings, magic_first: bool, body: &[u8]) -> Result<()> {
    let mut w = create(path)?;
    let header = settings.header_line();
    if magic_first {
        let split = body.iter().position(|&b| b == b'\n').map_or(body.len(), |i| i + 1);
        w.write_all(&body[..split])?;
        writeln!(w, "{header}")?;
        w.write_all(&body[split..])?;
    } else {
        writeln!(w, "{header}")?;
        w.write_all(body)?;
    }
    w.flush()?;
    Ok(())
}

fn is_ext(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn announce(settings: &Settings) {
    println!("fingerprint {} {}", settings.fingerprint(), settings.canonical());
}

fn radon(a: RadonArgs, file: &FileConfig) -> Result<()> {
    let deg = Degrade::resolve(&a.degrade, file)?;
    let img = deg.apply(load(&a.input)?)?;
    let m = pick(a.grid, file.grid, img.width().min(img.height()));
    if m < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    let mut s = Settings::new("radon");
    s.set("grid", m);
    match a.warp_alpha {
        Some(al) => s.set("warp_alpha", al),
        None => s.set("warp_alpha", "none"),
    };
    deg.record(&mut s);
    announce(&s);

    let dom = disk_mask(&img);
    let sino = match a.warp_alpha {
        Some(al) => {
            if !(al > 0.0) {
                return Err(usage(format!("--warp-alpha must be positive, got {al}")));
            }
            radon_forward_warped(&img, &dom, al, m)?
        }
        None => radon_forward(&img, &dom, m, m)?,
    };
    if is_ext(&a.output, "csv") {
        let mut body = Vec::new();
        sino.write_csv(&mut body)?;
        write_text(&a.output, &s, false, &body)
    } else {
        Ok(sino.save(&a.output)?)
    }
}

fn moments(a: MomentsArgs, file: &FileConfig) -> Result<()> {
    let basis = Basis::resolve(&a.basis, file);
    let spec = basis.spec()?;
    let k = pick(a.k, file.k, 10);
    let domain = pick(a.domain, file.domain, DomainArg::Fmr);
    let method = if a.fast {
        MethodArg::Fft
    } else {
        a.method.unwrap_or(match basis.family {
            FamilyArg::Harmonic => MethodArg::Fft,
            FamilyArg::Polynomial => MethodArg::Poly,
        })
    };
    match (method, basis.family) {
        (MethodArg::Fft, FamilyArg::Polynomial) => return Err(usage("--method fft needs --family harmonic")),
        (MethodArg::Poly, FamilyArg::Harmonic) => return Err(usage("--method poly needs --family polynomial")),
        _ => {}
    }
    let deg = Degrade::resolve(&a.degrade, file)?;
    let img = deg.apply(load(&a.input)?)?;
    let m = pick(a.grid, file.grid, img.width().min(img.height()));

    let mut s = Settings::new("moments");
    basis.record(&mut s);
    s.set("k", k).set("domain", domain_name(domain));
    if domain == DomainArg::Fmr {
        let name = match method {
            MethodArg::Direct => "direct",
            MethodArg::Fft => "fft",
            MethodArg::Poly => "poly",
        };
        s.set("method", name).set("grid", m);
    }
    deg.record(&mut s);
    announce(&s);

    let dom = disk_mask(&img);
    let ms: MomentSet64 = match domain {
        DomainArg::Fm => fm_image(&img, &dom, &spec, k)?,
        DomainArg::Fmr => match method {
            MethodArg::Fft => fmr_harmonic_fft(&radon_forward_warped(&img, &dom, basis.alpha, m)?, basis.alpha, k)?,
            MethodArg::Direct => fmr_direct(&radon_forward(&img, &dom, m, m)?, &spec, k)?,
            MethodArg::Poly => fmr_polynomial(&radon_forward(&img, &dom, m, m)?, &spec, k)?,
        },
    };
    let mut body = Vec::new();
    ms.write_text(&mut body)?;
    write_text(&a.output, &s, true, &body)
}

fn reconstruct_cmd(a: ReconstructArgs, file: &FileConfig) -> Result<()> {
    let f = File::open(&a.input).with_context(|| format!("cannot open {}", a.input.display()))?;
    let ms: MomentSet64 = MomentSet::read_text(BufReader::new(f))?;
    let size = pick(a.size, file.size, 128);
    if size < 8 {
        return Err(usage("--size must be at least 8"));
    }
    let grid = pick(a.grid, file.grid, size.max(4 * ms.k()));
    let mut s = Settings::new("reconstruct");
    s.set("basis", ms.spec()).set("k", ms.k()).set("domain", ms.tag()).set("size", size);
    if ms.tag() == DomainTag::Radon {
        s.set("grid", grid);
    }
    announce(&s);

    let (sino, img) = match ms.tag() {
        DomainTag::Radon => {
            let (sino, img) = reconstruct(&ms, (grid, grid), size)?;
            (Some(sino), img)
        }
        DomainTag::Image => (None, fmr_core::moments::reconstruct_image(&ms, size)?),
    };
    save_gray(&img, &a.output)?;
    if let Some(path) = &a.sinogram {
        let sino = sino.ok_or_else(|| usage("--sinogram needs a Radon-domain moment file"))?;
        sino.save(path)?;
    }
    Ok(())
}

fn features(a: FeaturesArgs, file: &FileConfig) -> Result<()> {
    let basis = Basis::resolve(&a.basis, file);
    let spec = basis.spec()?;
    let k = pick(a.k, file.k, 10);
    let domain = pick(a.domain, file.domain, DomainArg::Fmr);
    let weighting = pick(
        a.weighting,
        file.weighting,
        match domain {
            DomainArg::Fmr => WeightingArg::NPlusOne,
            DomainArg::Fm => WeightingArg::None,
        },
    );
    let weighting = match weighting {
        WeightingArg::None => Weighting::None,
        WeightingArg::NPlusOne => Weighting::NPlusOne,
    };
    let deg = Degrade::resolve(&a.degrade, file)?;
    let img = deg.apply(load(&a.input)?)?;

    let mut s = Settings::new("features");
    basis.record(&mut s);
    s.set("k", k).set("domain", domain_name(domain)).set("weighting", weighting);
    deg.record(&mut s);
    announce(&s);

    let method = match domain {
        DomainArg::Fmr => Method::fmr(spec, k),
        DomainArg::Fm => Method::fm(spec, k),
    };
    let fv = Method { weighting, ..method }.features(&img)?;
    if is_ext(&a.output, "bin") {
        fs::write(&a.output, fv.to_bytes()).with_context(|| format!("cannot write {}", a.output.display()))?;
        Ok(())
    } else {
        let mut body = Vec::new();
        fv.write_csv(&mut body)?;
        write_text(&a.output, &s, false, &body)
    }
}

fn xval(a: XvalArgs, file: &FileConfig) -> Result<()> {
    let basis = Basis::resolve(&a.basis, file);
    let spec = basis.spec()?;
    let orders = pick(a.orders, file.orders, 3);
    let grid = pick(a.grid, file.grid, 256);
    let trunc = SeriesTruncation {
        k_max: pick(a.k_max, file.k_max, 60),
        s_max: pick(a.s_max, file.s_max, 20),
        tail_tol: pick(a.tail_tol, file.tail_tol, 1e-3),
        ..SeriesTruncation::default()
    };
    trunc.validate().map_err(|e| usage(e.to_string()))?;
    let size = pick(a.size, file.size, 128);
    let img = match &a.input {
        Some(path) => load(path)?,
        None => synth::portrait(size),
    };

    let mut s = Settings::new("xval-explicit");
    basis.record(&mut s);
    match &a.input {
        Some(p) => s.set("input", p.display()),
        None => s.set("input", format!("portrait{size}")),
    };
    s.set("orders", orders).set("grid", grid).set("k_max", trunc.k_max).set("s_max", trunc.s_max).set("tail_tol", trunc.tail_tol);
    announce(&s);

    let dom = disk_mask(&img);
    let implicit = fmr_direct(&radon_forward(&img, &dom, grid, grid)?, &spec, orders)?;
    let kk = orders as i32;
    let list: Vec<(i32, i32)> = spec.radial_orders(orders).flat_map(|n| (-kk..=kk).map(move |m| (n, m))).collect();
    let rows = cross_validate(&img, &dom, &implicit, &list, &trunc).map_err(|e| match e {
        FmrError::FractionalPowerOfNegative(_) => anyhow::Error::new(e)
            .context("the explicit series needs integer exponents: even integer alpha for the harmonic family, integer alpha and alpha*q/2 for the polynomial family"),
        e => e.into(),
    })?;
    let mut body = Vec::new();
    write_cross_csv(&rows, &mut body)?;
    match &a.output {
        Some(path) => write_text(path, &s, false, &body)?,
        None => {
            println!("{}", s.header_line());
            std::io::stdout().write_all(&body)?;
        }
    }
    // coefficients below 1e-3 of the largest carry no usable relative error
    let floor = 1e-3 * rows.iter().map(|r| r.implicit.norm()).fold(0.0, f64::max);
    let significant: Vec<_> = rows.iter().filter(|r| r.implicit.norm() > floor).collect();
    let worst = significant.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
    eprintln!("max relative difference {worst:e} over {} significant orders", significant.len());
    let corrected: Vec<f64> = significant.iter().filter_map(|r| r.corrected_rel_diff).collect();
    if !corrected.is_empty() {
        let worst = corrected.iter().copied().fold(0.0, f64::max);
        eprintln!("max parity-corrected difference {worst:e} over {} orders", corrected.len());
    }
    Ok(())
}

struct Dataset {
    images: Vec<(String, GrayImage64)>,
}

impl Dataset {
    fn resolve(a: &DatasetArgs, file: &FileConfig, s: &mut Settings) -> Result<Self> {
        if let Some(dir) = a.images.clone().or_else(|| file.images.clone()) {
            s.set("images", dir.display());
            return Ok(Self { images: load_dir(&dir)? });
        }
        let count = pick(a.count, file.count, 10);
        let size = pick(a.size, file.size, 128);
        let seed = pick(a.suite_seed, file.suite_seed, 1);
        if count < 2 || size < 8 {
            return Err(usage("synthetic suite needs --count >= 2 and --size >= 8"));
        }
        s.set("suite", "dead_leaves").set("count", count).set("size", size).set("suite_seed", seed);
        let images = synth::leaves_suite(count, size, seed)
            .into_iter()
            .enumerate()
            .map(|(i, img)| (format!("leaves{i:02}"), img))
            .collect();
        Ok(Self { images })
    }
}

fn load_dir(dir: &Path) -> Result<Vec<(String, GrayImage64)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_ext(p, "png") || is_ext(p, "pgm"))
        .collect();
    paths.sort();
    if paths.len() < 2 {
        return Err(usage(format!("{} holds fewer than 2 PNG/PGM images", dir.display())));
    }
    paths
        .iter()
        .map(|p| {
            let label = p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            Ok((label, load(p)?))
        })
        .collect()
}

fn check_variances(v: &[f64]) -> Result<()> {
    if v.is_empty() || v.iter().any(|x| !(*x >= 0.0)) {
        return Err(usage("variances must be a non-empty list of non-negative numbers"));
    }
    Ok(())
}

fn bench_histogram(a: HistogramArgs, file: &FileConfig) -> Result<()> {
    let basis = Basis::resolve(&a.basis, file);
    let spec = basis.spec()?;
    let variances = a.variances.clone().or_else(|| file.variances.clone()).unwrap_or_else(|| vec![0.0, 0.05, 0.1, 0.15, 0.2]);
    check_variances(&variances)?;
    let order = a.order.clone().or_else(|| file.order.clone()).unwrap_or_else(|| vec![2, 2]);
    if order.len() != 2 {
        return Err(usage("--order takes two values n,m"));
    }
    let domain = pick(a.domain, file.domain, DomainArg::Fmr);
    let seed = pick(a.seed, file.seed, 0);

    let mut s = Settings::new("bench-histogram");
    let data = Dataset::resolve(&a.data, file, &mut s)?;
    basis.record(&mut s);
    s.set_list("variances", &variances).set("order", format!("{},{}", order[0], order[1]));
    s.set("domain", domain_name(domain)).set("seed", seed);
    announce(&s);

    let report = run_histogram_study(&data.images, &variances, &spec, (order[0], order[1]), moment_domain(domain), seed)?;
    let mut body = Vec::new();
    report.write_csv(&mut body)?;
    write_text(&a.output, &s, false, &body)?;
    if let Some(path) = &a.plot {
        let mut plot = Vec::new();
        for row in &report.rows {
            writeln!(plot, "# {}", row.label)?;
            for (v, x) in report.variances.iter().zip(&row.values) {
                writeln!(plot, "{v} {x:e}")?;
            }
            writeln!(plot)?;
            writeln!(plot)?;
        }
        write_text(path, &s, false, &plot)?;
    }
    println!("within_spread {:e} between_gap {:e}", report.within_spread(), report.between_gap());
    Ok(())
}

fn bench_reconstruct(a: BenchReconArgs, file: &FileConfig) -> Result<()> {
    let basis = Basis::resolve(&a.basis, file);
    let spec = basis.spec()?;
    let size = pick(a.size, file.size, 128);
    let noise_var = pick(a.noise_var, file.noise_var, 0.2);
    check_variances(&[noise_var])?;
    let ks = a.ks.clone().or_else(|| file.ks.clone()).unwrap_or_else(|| vec![5, 10, 20, 30, 40, 50]);
    if ks.is_empty() || ks.contains(&0) {
        return Err(usage("--ks must list positive order bounds"));
    }
    let seed = pick(a.seed, file.seed, 0);
    let img = match &a.input {
        Some(path) => load(path)?,
        None => synth::portrait(size),
    };

    let mut s = Settings::new("bench-reconstruct");
    match &a.input {
        Some(p) => s.set("input", p.display()),
        None => s.set("input", format!("portrait{size}")),
    };
    basis.record(&mut s);
    s.set("noise_var", noise_var).set_list("ks", &ks).set("seed", seed);
    announce(&s);

    let rows = run_reconstruction_study(&img, noise_var, seed, &spec, &ks)?;
    let mut body = Vec::new();
    write_recon_csv(&rows, &mut body)?;
    write_text(&a.output, &s, false, &body)?;
    if let Some(path) = &a.plot {
        let mut plot = Vec::new();
        writeln!(plot, "# k msre_fm msre_fmr ssim_fm ssim_fmr")?;
        for r in &rows {
            writeln!(plot, "{} {:e} {:e} {:e} {:e}", r.k, r.msre_fm, r.msre_fmr, r.ssim_fm, r.ssim_fmr)?;
        }
        write_text(path, &s, false, &plot)?;
    }
    Ok(())
}

fn bench_recognize(a: RecognizeArgs, file: &FileConfig) -> Result<()> {
    let basis = Basis::resolve(&a.basis, file);
    let spec = basis.spec()?;
    let k = pick(a.k, file.k, 10);
    let seed = pick(a.seed, file.seed, 0);
    let full = BenchmarkConfig::full_protocol(vec![Method::fmr(spec, k), Method::fm(spec, k)], seed);
    let variances = a.variances.clone().or_else(|| file.variances.clone()).unwrap_or(full.variances);
    let angles = a.angles.clone().or_else(|| file.angles.clone()).unwrap_or(full.angles);
    check_variances(&variances)?;
    if angles.is_empty() {
        return Err(usage("--angles must not be empty"));
    }

    let mut s = Settings::new("bench-recognize");
    let data = Dataset::resolve(&a.data, file, &mut s)?;
    basis.record(&mut s);
    s.set("k", k).set_list("variances", &variances).set_list("angles", &angles).set("seed", seed);
    announce(&s);

    let cfg = BenchmarkConfig { methods: full.methods, variances, angles, seed };
    let images: Vec<GrayImage64> = data.images.into_iter().map(|(_, img)| img).collect();
    let table = run_recognition_benchmark(&cfg, &images)?;
    let mut body = Vec::new();
    table.write_csv(&mut body)?;
    write_text(&a.output, &s, false, &body)?;
    if let Some(path) = &a.plot {
        let mut plot = Vec::new();
        write!(plot, "# variance")?;
        for m in &table.methods {
            write!(plot, " \"{m}\"")?;
        }
        writeln!(plot)?;
        for (j, v) in table.variances.iter().enumerate() {
            write!(plot, "{v}")?;
            for i in 0..table.methods.len() {
                write!(plot, " {:.4}", table.percent(i, j))?;
            }
            writeln!(plot)?;
        }
        write_text(path, &s, false, &plot)?;
    }
    for (i, m) in table.methods.iter().enumerate() {
        let all: Vec<usize> = (0..table.variances.len()).collect();
        println!("{m}: {:.2}%", table.mean_percent(i, &all));
    }
    Ok(())
}

/// Code bits from `--code` or from the SHA-256 stream of `--code-text`.
fn copyright_code(a: &CodeArgs, bits: usize) -> Result<Option<Bits>> {
    if let Some(text) = &a.code {
        let code = Bits::from_bit_string(text).map_err(|e| usage(e.to_string()))?;
        if code.len() != bits {
            return Err(usage(format!("--code has {} bits, the hash has {bits}", code.len())));
        }
        return Ok(Some(code));
    }
    let Some(text) = &a.code_text else { return Ok(None) };
    let mut out = Vec::with_capacity(bits);
    let mut block = 0u32;
    while out.len() < bits {
        let mut h = Sha256::new();
        h.update(block.to_be_bytes());
        h.update(text.as_bytes());
        for byte in h.finalize() {
            for i in (0..8).rev() {
                out.push(byte >> i & 1 == 1);
            }
        }
        block += 1;
    }
    out.truncate(bits);
    Ok(Some(Bits(out)))
}

fn zw_register(a: ZwRegisterArgs, file: &FileConfig) -> Result<()> {
    let bits = pick(a.bits, file.bits, 64);
    let key = pick(a.key, file.key, 0);
    let family = match pick(a.family, file.family, FamilyArg::Polynomial) {
        FamilyArg::Harmonic => HashFamily::Harmonic,
        FamilyArg::Polynomial => HashFamily::Polynomial,
    };
    let domain = pick(a.domain, file.domain, DomainArg::Fmr);
    let cfg = match domain {
        DomainArg::Fmr => HashConfig::fmr(bits, family),
        DomainArg::Fm => HashConfig::fm(bits, family),
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let code = copyright_code(&a.code, bits)?.ok_or_else(|| usage("zw register needs --code or --code-text"))?;
    let img = load(&a.input)?;

    let mut s = Settings::new("zw-register");
    s.set("bits", bits).set("key", key).set("family", family).set("domain", domain_name(domain));
    announce(&s);

    let record = register(&img, &code, key, &cfg)?;
    let mut w = create(&a.output)?;
    record.write_text(&mut w)?;
    w.flush()?;
    Ok(())
}

fn zw_verify(a: ZwVerifyArgs, _file: &FileConfig) -> Result<()> {
    let f = File::open(&a.record).with_context(|| format!("cannot open {}", a.record.display()))?;
    let record = WatermarkRecord::read_text(BufReader::new(f))?;
    let code = copyright_code(&a.code, record.bits())?;
    let img = load(&a.input)?;

    let mut s = Settings::new("zw-verify");
    s.set("bits", record.bits()).set("key", record.key_seed).set("family", record.config.family);
    s.set("domain", record.config.domain.to_string().to_lowercase());
    announce(&s);

    let recovered = perceptual_hash(&img, record.key_seed, &record.config)?.xor(&record.zero_watermark)?;
    println!("recovered {}", recovered.to_bit_string());
    if let Some(code) = code {
        let ber = recovered.hamming(&code)? as f64 / code.len() as f64;
        println!("ber {ber:.6}");
    }
    Ok(())
}

fn plot_basis(a: PlotBasisArgs, file: &FileConfig) -> Result<()> {
    let basis = Basis::resolve(&a.basis, file);
    let spec = basis.spec()?;
    let k = pick(a.k, file.k, 10);
    let points = pick(a.points, file.points, 512);
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let mut s = Settings::new("plot-basis");
    basis.record(&mut s);
    s.set("k", k).set("points", points);
    announce(&s);

    let grid: Vec<f64> = uniform_radii(points);
    let rows = radial_matrix(&spec, k, &grid)?;
    let mut body = Vec::new();
    for (n, values) in spec.radial_orders(k).zip(rows) {
        writeln!(body, "# n {n}")?;
        RadialTable { n, r: grid.clone(), values }.write_csv(&mut body)?;
    }
    write_text(&a.output, &s, false, &body)
}


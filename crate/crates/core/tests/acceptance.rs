//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them). Tests share a lock so the timing
//! criteria are not disturbed by their neighbours.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_complex::Complex;

use fmr_core::basis::{radial_matrix, radial_poly_recursive, BasisSpec};
use fmr_core::degrade::{add_gaussian_noise, rotate};
use fmr_core::explicit::{cross_validate, SeriesTruncation};
use fmr_core::harness::{run_recognition_benchmark, run_reconstruction_study, BenchmarkConfig, Method};
use fmr_core::moments::{fmr_direct, fmr_harmonic_fft, fmr_polynomial, MomentSet};
use fmr_core::quadrature::RadialQuadrature;
use fmr_core::radon::{radon_forward_warped, snr_gain, theoretical_snr_increment};
use fmr_core::watermark::{register, verify, Bits, HashConfig, HashFamily, Hasher};
use fmr_core::{disk_mask, radon_forward, synth, GrayImage64};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: &str, pass: bool, detail: &str) {
    println!("criterion {id}: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

fn info(id: &str, detail: &str) {
    println!("criterion {id} info: {detail}");
}

/// Largest `|a - b| / |b|` over coefficients of `b` at least `floor` times
/// its largest magnitude.
fn max_rel_significant(a: &MomentSet<f64>, b: &MomentSet<f64>, floor: f64) -> f64 {
    let cut = b.max_abs() * floor;
    b.iter()
        .filter(|(_, _, v)| v.norm() >= cut)
        .map(|(n, m, v)| (a.get(n, m).unwrap() - v).norm() / v.norm())
        .fold(0.0, f64::max)
}

fn gram_error(spec: &BasisSpec<f64>, k: usize, quad: &RadialQuadrature<f64>) -> f64 {
    let rows = radial_matrix(spec, k, &quad.nodes).unwrap();
    let mut worst: f64 = 0.0;
    for (i, a) in rows.iter().enumerate() {
        for (j, b) in rows.iter().enumerate() {
            let ip: Complex<f64> = a.iter().zip(b).zip(&quad.weights).map(|((x, y), w)| x * y.conj() * w).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((ip * std::f64::consts::TAU - target).norm());
        }
    }
    worst
}

#[test]
fn criterion_1_orthonormality() {
    let _g = serial();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for alpha in [0.5, 1.0, 2.0] {
        let quad = RadialQuadrature::gauss_warped(alpha, 4096).unwrap();
        for spec in [BasisSpec::harmonic(alpha).unwrap(), BasisSpec::polynomial(alpha, 3.0, 2.0).unwrap()] {
            let e = gram_error(&spec, 10, &quad);
            lines.push(format!("{spec}: {e:.2e}"));
            worst = worst.max(e);
        }
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-5 && elapsed < Duration::from_secs(10);
    report("1", pass, &format!("max |gram - I| {worst:.2e} (< 1e-5), {:.2} s (< 10 s); {}", elapsed.as_secs_f64(), lines.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_2_path_equivalence() {
    let _g = serial();
    let start = Instant::now();
    let img: GrayImage64 = synth::portrait(128);
    let dom = disk_mask(&img);

    let mut fft_worst: f64 = 0.0;
    for alpha in [1.0, 2.0] {
        let spec = BasisSpec::harmonic(alpha).unwrap();
        let sino = radon_forward_warped(&img, &dom, alpha, 256).unwrap();
        let fast = fmr_harmonic_fft(&sino, alpha, 10).unwrap();
        let slow = fmr_direct(&sino, &spec, 10).unwrap();
        fft_worst = fft_worst.max(max_rel_significant(&fast, &slow, 1e-2));
        if alpha == 2.0 {
            let uniform = fmr_direct(&radon_forward(&img, &dom, 256, 256).unwrap(), &spec, 10).unwrap();
            info("2", &format!("cross-grid FFT(warped) vs direct(uniform) at alpha=2: {:.2e}", max_rel_significant(&fast, &uniform, 1e-2)));
        }
    }

    let sino = radon_forward(&img, &dom, 256, 256).unwrap();
    let mut poly_worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        let spec = BasisSpec::polynomial(alpha, 3.0, 2.0).unwrap();
        let rec = fmr_polynomial(&sino, &spec, 10).unwrap();
        let direct = fmr_direct(&sino, &spec, 10).unwrap();
        poly_worst = poly_worst.max(max_rel_significant(&rec, &direct, 1e-2));
    }
    let elapsed = start.elapsed();
    let pass = fft_worst <= 1e-2 && poly_worst <= 1e-8 && elapsed < Duration::from_secs(30);
    report(
        "2",
        pass,
        &format!(
            "fft vs direct {fft_worst:.2e} (<= 1e-2), recursive vs closed form {poly_worst:.2e} (<= 1e-8), {:.2} s (< 30 s)",
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_explicit_series() {
    let _g = serial();
    let start = Instant::now();
    let img: GrayImage64 = synth::portrait(128);
    let dom = disk_mask(&img);
    let sino = radon_forward(&img, &dom, 256, 256).unwrap();
    let trunc = SeriesTruncation { k_max: 60, ..SeriesTruncation::default() };
    let cases = [
        BasisSpec::harmonic(2.0).unwrap(),
        BasisSpec::polynomial(2.0, 4.0, 2.0).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for spec in cases {
        let implicit = fmr_direct(&sino, &spec, 3).unwrap();
        let orders: Vec<(i32, i32)> = spec.radial_orders(3).flat_map(|n| (-3..=3).map(move |m| (n, m))).collect();
        let rows = cross_validate(&img, &dom, &implicit, &orders, &trunc).unwrap();

        let total: f64 = rows.iter().map(|r| r.implicit.norm_sqr()).sum();
        let literal = (rows.iter().map(|r| (r.explicit - r.implicit).norm_sqr()).sum::<f64>() / total).sqrt();
        info("3", &format!("{spec}: literal series vs implicit, relative l2 {literal:.3} (expected near 1, see parity)"));

        let cut = implicit.max_abs() * 1e-3;
        let corrected = rows
            .iter()
            .filter(|r| r.implicit.norm() >= cut)
            .filter_map(|r| r.corrected_rel_diff)
            .fold(0.0, f64::max);
        let compared = rows.iter().filter(|r| r.implicit.norm() >= cut && r.corrected_rel_diff.is_some()).count();
        details.push(format!("{spec}: {corrected:.2e} over {compared} orders"));
        worst = worst.max(corrected);
        assert!(compared > 0);
    }
    let elapsed = start.elapsed();
    let pass = worst < 5e-2 && elapsed < Duration::from_secs(120);
    report(
        "3",
        pass,
        &format!("parity-corrected max relative diff {worst:.2e} (< 5e-2), {:.1} s (< 120 s); {}", elapsed.as_secs_f64(), details.join("; ")),
    );
    assert!(pass);
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

#[test]
fn criterion_4_rotation() {
    let _g = serial();
    let images: Vec<(String, GrayImage64)> = vec![
        ("portrait".into(), synth::portrait(128)),
        ("leaves".into(), synth::dead_leaves(128, 3)),
    ];
    let mut shift_worst: f64 = 0.0;
    let mut quarter_worst: f64 = 0.0;
    let mut arbitrary_worst: f64 = 0.0;
    let method = Method::fmr(BasisSpec::harmonic(1.0).unwrap(), 10);
    for (_, img) in &images {
        let dom = disk_mask(img);
        let base = radon_forward(img, &dom, 128, 256).unwrap();
        let f0 = method.features(img).unwrap();
        for quarter in 1..4 {
            let rot = rotate(img, 90.0 * quarter as f64);
            let sino = radon_forward(&rot, &dom, 128, 256).unwrap();
            let shifted = base.shifted(64 * quarter);
            let diff = sino.values().iter().zip(shifted.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            shift_worst = shift_worst.max(diff / base.max_abs());
            let f = method.features(&rot).unwrap();
            quarter_worst = quarter_worst.max(rel_l2(f.values(), f0.values()));
        }
        for angle in [17.0, 45.0, 133.0, 200.0, 311.0] {
            let f = method.features(&rotate(img, angle)).unwrap();
            arbitrary_worst = arbitrary_worst.max(rel_l2(f.values(), f0.values()));
        }
    }
    let pass = shift_worst < 1e-6 && quarter_worst < 0.05 && arbitrary_worst < 0.10;
    report(
        "4",
        pass,
        &format!(
            "90-degree shift error {shift_worst:.2e} (< 1e-6), feature drift 90-degree {:.2}% (< 5%), arbitrary {:.2}% (< 10%)",
            quarter_worst * 100.0,
            arbitrary_worst * 100.0
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_snr_gain() {
    let _g = serial();
    let theory = theoretical_snr_increment(0.5, 0.1, 256.0).unwrap();
    let img: GrayImage64 = synth::flat(256, 0.5);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for seed in 0..20 {
        let rep = snr_gain(&img, 0.1, 1000 + seed, 16, 1).unwrap();
        let ratio = rep.mean_measured() / rep.mean_theoretical();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let pass = theory == 637.5 && lo >= 0.5 && hi <= 2.0;
    report("5", pass, &format!("theoretical {theory} (= 637.5), measured/theoretical over 20 seeds in [{lo:.3}, {hi:.3}] (within [0.5, 2])"));
    assert!(pass);
}

#[test]
fn criterion_6_noise_robustness() {
    let _g = serial();
    let spec = BasisSpec::harmonic(1.0).unwrap();

    let mut recon_ok = true;
    let mut recon = Vec::new();
    for (name, img) in [
        ("portrait", synth::portrait::<f64>(128)),
        ("blob", synth::blob(128)),
        ("rings", synth::rings(128)),
    ] {
        let row = run_reconstruction_study(&img, 0.2, 7, &spec, &[50]).unwrap()[0];
        recon_ok &= row.msre_fmr < row.msre_fm;
        recon.push(format!("{name} FMR {:.4} vs FM {:.4}", row.msre_fmr, row.msre_fm));
    }

    let methods = vec![Method::fmr(spec, 20), Method::fm(spec, 20)];
    let cfg = BenchmarkConfig { methods, variances: vec![0.1, 0.15, 0.2], angles: vec![0.0, 45.0, 90.0, 200.0], seed: 5 };
    let table = run_recognition_benchmark(&cfg, &synth::leaves_suite::<f64>(10, 128, 11)).unwrap();
    let (fmr_acc, fm_acc) = (table.mean_percent(0, &[0, 1, 2]), table.mean_percent(1, &[0, 1, 2]));
    let recog_ok = fmr_acc >= fm_acc;

    let smooth = run_recognition_benchmark(&cfg, &synth::suite::<f64>(10, 128, 11)).unwrap();
    info(
        "6",
        &format!(
            "smooth-blob suite recognition FMR {:.1}% vs FM {:.1}%",
            smooth.mean_percent(0, &[0, 1, 2]),
            smooth.mean_percent(1, &[0, 1, 2])
        ),
    );

    let pass = recon_ok && recog_ok;
    report(
        "6",
        pass,
        &format!("MSRE at K=50, var 0.2: {}; dead-leaves recognition FMR {fmr_acc:.1}% vs FM {fm_acc:.1}% (FMR >= FM)", recon.join(", ")),
    );
    assert!(pass);
}

/// Mean noisy-duplicate BER per variance and mean unrelated-image BER.
fn hash_study(cfg: &HashConfig, key: u64, suite: &[GrayImage64], others: &[GrayImage64], variances: &[f64]) -> (Vec<f64>, f64, f64) {
    let hasher = Hasher::new::<f64>(cfg, key, 128).unwrap();
    let clean: Vec<Bits> = suite.iter().map(|i| hasher.hash(i).unwrap()).collect();
    let bits = cfg.bits as f64;
    let mut worst: f64 = 0.0;
    let noisy = variances
        .iter()
        .map(|&v| {
            let bers: Vec<f64> = suite
                .iter()
                .enumerate()
                .map(|(i, img)| {
                    let h = hasher.hash(&add_gaussian_noise(img, v, 300 + i as u64).unwrap()).unwrap();
                    h.hamming(&clean[i]).unwrap() as f64 / bits
                })
                .collect();
            if v == 0.05 {
                worst = bers.iter().copied().fold(0.0, f64::max);
            }
            bers.iter().sum::<f64>() / bers.len() as f64
        })
        .collect();
    let unrelated = others
        .iter()
        .enumerate()
        .map(|(j, o)| hasher.hash(o).unwrap().hamming(&clean[j % clean.len()]).unwrap() as f64 / bits)
        .sum::<f64>()
        / others.len() as f64;
    (noisy, unrelated, worst)
}

#[test]
fn criterion_7_zero_watermark() {
    let _g = serial();
    let key = 2024;
    let suite = synth::leaves_suite::<f64>(10, 128, 31);
    let others = synth::leaves_suite::<f64>(20, 128, 77);
    let variances = [0.02, 0.05, 0.1];
    let fmr_cfg = HashConfig::fmr(64, HashFamily::Polynomial);
    let fm_cfg = HashConfig::fm(64, HashFamily::Polynomial);

    let code = Bits((0..64).map(|i| (i * 7 + 3) % 5 < 2).collect());
    let round_trip = suite
        .iter()
        .map(|img| {
            let record = register(img, &code, key, &fmr_cfg).unwrap();
            verify(img, &record, &code).unwrap().1
        })
        .fold(0.0, f64::max);

    let (fmr_noisy, fmr_unrel, fmr_worst) = hash_study(&fmr_cfg, key, &suite, &others, &variances);
    let (fm_noisy, _, _) = hash_study(&fm_cfg, key, &suite, &others, &variances);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (fmr_all, fm_all) = (mean(&fmr_noisy), mean(&fm_noisy));

    let harmonic = HashConfig::fmr(64, HashFamily::Harmonic);
    let (h_noisy, h_unrel, _) = hash_study(&harmonic, key, &suite, &others, &[0.05]);
    info("7", &format!("harmonic-family FMR hash: noisy BER at var 0.05 {:.3}, unrelated {:.3}", h_noisy[0], h_unrel));

    let pass = round_trip == 0.0 && fmr_noisy[1] < 0.2 && (0.35..=0.65).contains(&fmr_unrel) && fmr_all <= fm_all;
    report(
        "7",
        pass,
        &format!(
            "round-trip BER {round_trip} (= 0), noisy BER at var 0.05 {:.3} (< 0.2, worst image {fmr_worst:.3}), unrelated BER {fmr_unrel:.3} (in [0.35, 0.65]), mean BER FMR {fmr_all:.3} vs FM {fm_all:.3} (FMR <= FM)",
            fmr_noisy[1]
        ),
    );
    assert!(pass);
}

fn median_time(mut f: impl FnMut()) -> f64 {
    let mut times: Vec<f64> = (0..15)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[times.len() / 2]
}

#[test]
fn criterion_8_performance() {
    let _g = serial();
    let img: GrayImage64 = synth::portrait(128);
    let sino = radon_forward_warped(&img, &disk_mask(&img), 1.0, 256).unwrap();
    fmr_harmonic_fft(&sino, 1.0, 10).unwrap();
    let t10 = median_time(|| {
        std::hint::black_box(fmr_harmonic_fft(&sino, 1.0, 10).unwrap());
    });
    let t20 = median_time(|| {
        std::hint::black_box(fmr_harmonic_fft(&sino, 1.0, 20).unwrap());
    });
    let change = (t20 - t10).abs() / t10;

    let grid: Vec<f64> = (0..512).map(|u| (u as f64 + 0.5) / 512.0).collect();
    let ks = [10usize, 20, 40, 80];
    let adds: Vec<f64> = ks
        .iter()
        .map(|&k| radial_poly_recursive(1.0, 3.0, 2.0, k, &grid).unwrap().1.additions as f64)
        .collect();
    // Equal increments per doubling step of K mean an affine count in K.
    let slopes: Vec<f64> = ks.windows(2).zip(adds.windows(2)).map(|(k, a)| (a[1] - a[0]) / (k[1] - k[0]) as f64).collect();
    let spread = slopes.iter().copied().fold(0.0, f64::max) / slopes.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let linear = spread < 1e-9 && slopes[0] > 0.0;

    let pass = change < 0.10 && linear;
    report(
        "8",
        pass,
        &format!(
            "FFT time K=10 {:.2} ms, K=20 {:.2} ms, change {:.1}% (< 10%); additions at K={ks:?}: {adds:?}, per-K slope {:.0}",
            t10 * 1e3,
            t20 * 1e3,
            change * 100.0,
            slopes[0]
        ),
    );
    assert!(pass);
}

//! Deterministic synthetic test images.
//!
//! Everything here is generated from closed-form shapes so experiments run
//! without external assets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::{DiskDomain, GrayImage};
use crate::scalar::Scalar;

fn render<T: Scalar>(size: usize, f: impl Fn(f64, f64) -> f64) -> GrayImage<T> {
    let dom = DiskDomain::<f64>::for_dims(size, size);
    GrayImage::from_fn(size, size, |c, r| {
        let (x, y) = dom.to_unit(c as f64, r as f64);
        T::lit(f(x, y))
    })
    .expect("synthetic images are at least 8x8")
}

fn smoothstep(edge: f64, width: f64, d: f64) -> f64 {
    // 1 well inside `edge`, 0 well outside, C1 transition of the given width
    let t = ((edge - d) / width + 0.5).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

fn ellipse(x: f64, y: f64, cx: f64, cy: f64, a: f64, b: f64, tilt: f64) -> f64 {
    let (s, c) = tilt.sin_cos();
    let dx = x - cx;
    let dy = y - cy;
    let u = (c * dx + s * dy) / a;
    let v = (-s * dx + c * dy) / b;
    (u * u + v * v).sqrt()
}

fn gaussian(x: f64, y: f64, cx: f64, cy: f64, sx: f64, sy: f64, tilt: f64) -> f64 {
    let d = ellipse(x, y, cx, cy, sx, sy, tilt);
    (-0.5 * d * d).exp()
}

/// 1 for pixel centres inside the inscribed disk, 0 elsewhere.
pub fn disk_indicator<T: Scalar>(size: usize) -> GrayImage<T> {
    render(size, |x, y| if x * x + y * y <= 1.0 { 1.0 } else { 0.0 })
}

/// Uniform image of the given level.
pub fn flat<T: Scalar>(size: usize, level: f64) -> GrayImage<T> {
    render(size, |_, _| level)
}

/// Smooth head-and-shoulders portrait used as the default test subject.
pub fn portrait<T: Scalar>(size: usize) -> GrayImage<T> {
    render(size, |x, y| {
        let bg = 0.15 + 0.1 * (y + 1.0) / 2.0;
        let shoulders = smoothstep(1.0, 0.08, ellipse(x, y, 0.0, -1.05, 0.85, 0.5, 0.0));
        let head = smoothstep(1.0, 0.06, ellipse(x, y, 0.02, 0.18, 0.36, 0.47, 0.08));
        let hair = smoothstep(1.0, 0.08, ellipse(x, y, 0.0, 0.42, 0.42, 0.3, 0.0))
            * (1.0 - smoothstep(1.0, 0.05, ellipse(x, y, 0.02, 0.08, 0.32, 0.36, 0.08)));
        let eyes = gaussian(x, y, -0.13, 0.25, 0.05, 0.03, 0.0) + gaussian(x, y, 0.15, 0.26, 0.05, 0.03, 0.0);
        let nose = gaussian(x, y, 0.02, 0.12, 0.03, 0.08, 0.05);
        let mouth = gaussian(x, y, 0.03, -0.05, 0.12, 0.025, 0.05);
        let collar = gaussian(x, y, 0.0, -0.5, 0.25, 0.06, 0.0);
        let v = bg + 0.35 * shoulders + 0.45 * head - 0.3 * hair - 0.35 * eyes + 0.1 * nose - 0.25 * mouth
            + 0.25 * collar;
        v.clamp(0.0, 1.0)
    })
}

/// Compact, off-centre, anisotropic Gaussian blob supported well inside `r < 0.5`.
pub fn blob<T: Scalar>(size: usize) -> GrayImage<T> {
    render(size, |x, y| {
        0.9 * gaussian(x, y, 0.12, -0.08, 0.09, 0.05, 0.5) + 0.5 * gaussian(x, y, -0.1, 0.06, 0.05, 0.05, 0.0)
    })
}

/// Radially symmetric image: concentric rings fading to 0 at the disk edge.
pub fn rings<T: Scalar>(size: usize) -> GrayImage<T> {
    render(size, |x, y| {
        let r2 = x * x + y * y;
        let envelope = (1.0 - r2).max(0.0).powi(2);
        envelope * (0.6 + 0.35 * (7.0 * r2.sqrt()).cos())
    })
}

/// A random smooth scene: a few soft ellipses and Gaussian spots on a gradient.
pub fn random_scene<T: Scalar>(size: usize, seed: u64) -> GrayImage<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gx: f64 = rng.random_range(-0.15..0.15);
    let gy: f64 = rng.random_range(-0.15..0.15);
    let base: f64 = rng.random_range(0.1..0.4);
    let shapes: Vec<(bool, [f64; 6])> = (0..rng.random_range(4..8))
        .map(|_| {
            let soft = rng.random_bool(0.5);
            let p = [
                rng.random_range(-0.6..0.6),
                rng.random_range(-0.6..0.6),
                rng.random_range(0.08..0.4),
                rng.random_range(0.08..0.4),
                rng.random_range(0.0..std::f64::consts::PI),
                rng.random_range(-0.4..0.6),
            ];
            (soft, p)
        })
        .collect();
    render(size, |x, y| {
        let mut v = base + gx * x + gy * y;
        for (soft, [cx, cy, a, b, tilt, amp]) in &shapes {
            let s = if *soft {
                gaussian(x, y, *cx, *cy, *a / 2.0, *b / 2.0, *tilt)
            } else {
                smoothstep(1.0, 0.1, ellipse(x, y, *cx, *cy, *a, *b, *tilt))
            };
            v += amp * s;
        }
        v.clamp(0.0, 1.0)
    })
}

/// Dead-leaves scene: occluding ellipses with power-law sizes (density
/// `r^-3`) and uniform gray levels, painted back to front. Edges are softened
/// over about one pixel.
pub fn dead_leaves<T: Scalar>(size: usize, seed: u64) -> GrayImage<T> {
    const LEAVES: usize = 600;
    const R_MIN: f64 = 0.03;
    const R_MAX: f64 = 0.6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let background: f64 = rng.random();
    let leaves: Vec<[f64; 6]> = (0..LEAVES)
        .map(|_| {
            let u: f64 = rng.random();
            let r = (R_MIN.powi(-2) - u * (R_MIN.powi(-2) - R_MAX.powi(-2))).powf(-0.5);
            let aspect = rng.random_range(0.5..1.0);
            [
                rng.random_range(-1.1..1.1),
                rng.random_range(-1.1..1.1),
                r,
                r * aspect,
                rng.random_range(0.0..std::f64::consts::PI),
                rng.random(),
            ]
        })
        .collect();
    let edge = 3.0 / size as f64;
    // rotation and bounding radius per leaf, hoisted out of the pixel loop
    let prepared: Vec<([f64; 6], f64, f64, f64)> = leaves
        .into_iter()
        .map(|l| {
            let (s, c) = l[4].sin_cos();
            (l, s, c, l[2] + 2.0 * edge)
        })
        .collect();
    render(size, |x, y| {
        prepared.iter().fold(background, |v, &([cx, cy, a, b, _, gray], s, c, reach)| {
            let (dx, dy) = (x - cx, y - cy);
            if dx.abs() > reach || dy.abs() > reach {
                return v;
            }
            let u = (c * dx + s * dy) / a;
            let w = (-s * dx + c * dy) / b;
            let cover = smoothstep(1.0, edge / b, (u * u + w * w).sqrt());
            v + cover * (gray - v)
        })
    })
}

/// Seeded suite of distinct random scenes, one per class.
pub fn suite<T: Scalar>(count: usize, size: usize, seed: u64) -> Vec<GrayImage<T>> {
    (0..count as u64)
        .map(|i| random_scene(size, seed.wrapping_mul(1_000_003).wrapping_add(i)))
        .collect()
}

/// Seeded suite of dead-leaves scenes, one per class.
pub fn leaves_suite<T: Scalar>(count: usize, size: usize, seed: u64) -> Vec<GrayImage<T>> {
    (0..count as u64)
        .map(|i| dead_leaves(size, seed.wrapping_mul(1_000_003).wrapping_add(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_and_in_range() {
        let a: GrayImage<f64> = random_scene(32, 9);
        let b: GrayImage<f64> = random_scene(32, 9);
        assert_eq!(a, b);
        assert_ne!(a, random_scene::<f64>(32, 10));
        assert_eq!(dead_leaves::<f64>(32, 3), dead_leaves::<f64>(32, 3));
        assert_ne!(dead_leaves::<f64>(32, 3), dead_leaves::<f64>(32, 4));
        assert_eq!(leaves_suite::<f64>(3, 16, 1).len(), 3);
        for img in [portrait::<f64>(32), blob(32), rings(32), disk_indicator(32), dead_leaves(32, 1)] {
            assert!(img.pixels().iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }

    #[test]
    fn suite_members_differ() {
        let s: Vec<GrayImage<f32>> = suite(5, 16, 1);
        for i in 0..5 {
            for j in i + 1..5 {
                assert_ne!(s[i], s[j]);
            }
        }
    }
}

//! PNG / PGM image reading and writing.

use std::fs;
use std::path::Path;

use crate::error::{FmrError, Result};
use crate::image::GrayImage;
use crate::scalar::Scalar;

/// Loads a PNG or PGM (P2/P5) file, rescaling intensities to `[0, 1]`.
///
/// Color inputs are reduced to the unweighted mean of their RGB channels.
pub fn load_gray<T: Scalar>(path: impl AsRef<Path>) -> Result<GrayImage<T>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| FmrError::UnreadableFile {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let (w, h, samples) = decode_gray(&bytes)?;
    GrayImage::new(w, h, samples.into_iter().map(T::lit).collect())
}

/// Decodes raw bytes to `(width, height, samples in [0, 1])`.
pub fn decode_gray(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        return decode_pgm(bytes);
    }
    if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
            .map_err(|e| FmrError::UnsupportedFormat(e.to_string()))?;
        let (w, h) = (img.width() as usize, img.height() as usize);
        let samples = if img.color().has_color() {
            img.to_rgb32f()
                .pixels()
                .map(|p| (p[0] as f64 + p[1] as f64 + p[2] as f64) / 3.0)
                .collect()
        } else {
            img.to_luma32f().pixels().map(|p| p[0] as f64).collect()
        };
        return Ok((w, h, samples));
    }
    Err(FmrError::UnsupportedFormat("expected PNG or PGM (P2/P5) data".into()))
}

fn decode_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    let binary = bytes[1] == b'5';
    let mut pos = 2;
    let mut header = [0usize; 3];
    for field in header.iter_mut() {
        *field = next_ascii_uint(bytes, &mut pos)?;
    }
    let [w, h, maxval] = header;
    if maxval == 0 || maxval > 65535 {
        return Err(FmrError::format("PGM", format!("maxval {maxval} out of range")));
    }
    let count = w * h;
    let scale = maxval as f64;
    let mut samples = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let wide = maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        let raster = bytes
            .get(pos..pos + need)
            .ok_or_else(|| FmrError::format("PGM", "truncated raster"))?;
        if wide {
            for pair in raster.chunks_exact(2) {
                samples.push(u16::from_be_bytes([pair[0], pair[1]]) as f64 / scale);
            }
        } else {
            samples.extend(raster.iter().map(|&b| b as f64 / scale));
        }
    } else {
        for _ in 0..count {
            samples.push(next_ascii_uint(bytes, &mut pos)? as f64 / scale);
        }
    }
    if samples.iter().any(|&s| s > 1.0) {
        return Err(FmrError::format("PGM", "sample exceeds maxval"));
    }
    Ok((w, h, samples))
}

fn next_ascii_uint(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(FmrError::format("PGM", "unexpected end of header")),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| FmrError::format("PGM", "expected an unsigned integer"))
}

fn quantize<T: Scalar>(img: &GrayImage<T>) -> Vec<u8> {
    img.pixels()
        .iter()
        .map(|p| (p.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Writes an 8-bit binary PGM (P5).
pub fn save_pgm<T: Scalar>(img: &GrayImage<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(quantize(img));
    fs::write(path, out)?;
    Ok(())
}

/// Writes an 8-bit ASCII PGM (P2).
pub fn save_pgm_ascii<T: Scalar>(img: &GrayImage<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = format!("P2\n{} {}\n255\n", img.width(), img.height());
    for row in quantize(img).chunks(img.width()) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes an 8-bit grayscale PNG.
pub fn save_png<T: Scalar>(img: &GrayImage<T>, path: impl AsRef<Path>) -> Result<()> {
    let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, quantize(img))
        .expect("buffer matches dimensions");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| FmrError::UnsupportedFormat(e.to_string()))
}

/// Saves by extension: `.pgm` as P5, anything else as PNG.
pub fn save_gray<T: Scalar>(img: &GrayImage<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("pgm") => save_pgm(img, path),
        _ => save_png(img, path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pgm_p5(w: usize, h: usize, data: &[u8]) -> Vec<u8> {
        let mut v = format!("P5\n{w} {h}\n255\n").into_bytes();
        v.extend_from_slice(data);
        v
    }

    #[test]
    fn linear_rescale_of_four_levels() {
        let (w, h, s) = decode_gray(&pgm_p5(2, 2, &[0, 85, 170, 255])).unwrap();
        assert_eq!((w, h), (2, 2));
        for (got, want) in s.iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert!((got - want).abs() < 1e-6);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.pgm");
        fs::write(&path, pgm_p5(2, 2, &[0, 85, 170, 255])).unwrap();
        assert!(matches!(load_gray::<f64>(&path), Err(FmrError::InvalidImage(_))));
    }

    #[test]
    fn all_white_and_all_black_pgm() {
        let dir = tempfile::tempdir().unwrap();
        for (level, expect) in [(255u8, 1.0), (0u8, 0.0)] {
            let path = dir.path().join(format!("flat{level}.pgm"));
            fs::write(&path, pgm_p5(8, 8, &[level; 64])).unwrap();
            let img: GrayImage<f64> = load_gray(&path).unwrap();
            assert!(img.pixels().iter().all(|&p| p == expect));
        }
    }

    #[test]
    fn ascii_pgm_with_comments() {
        let text = b"P2\n# a comment\n2 1\n# another\n10\n0 10\n";
        let (_, _, s) = decode_gray(text).unwrap();
        assert_eq!(s, vec![0.0, 1.0]);
    }

    #[test]
    fn png_round_trip_and_color_mean() {
        let dir = tempfile::tempdir().unwrap();
        let img = GrayImage::<f64>::from_fn(9, 8, |c, r| ((c + r) * 15) as f64 / 255.0).unwrap();
        let path = dir.path().join("a.png");
        save_png(&img, &path).unwrap();
        let back: GrayImage<f64> = load_gray(&path).unwrap();
        assert!(back.pixels().iter().zip(img.pixels()).all(|(a, b)| (a - b).abs() < 1e-6));

        let rgb = image::RgbImage::from_pixel(8, 8, image::Rgb([255, 0, 0]));
        let cpath = dir.path().join("c.png");
        rgb.save(&cpath).unwrap();
        let gray: GrayImage<f64> = load_gray(&cpath).unwrap();
        assert!(gray.pixels().iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-6));
    }

    #[test]
    fn errors_on_missing_or_unknown() {
        assert!(matches!(
            load_gray::<f64>("/nonexistent/file.png"),
            Err(FmrError::UnreadableFile { .. })
        ));
        assert!(matches!(decode_gray(b"GIF89a...."), Err(FmrError::UnsupportedFormat(_))));
    }

    #[test]
    fn ascii_writer_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let img = GrayImage::<f32>::from_fn(8, 8, |c, _| c as f32 / 7.0).unwrap();
        let p = dir.path().join("x.pgm");
        save_pgm_ascii(&img, &p).unwrap();
        let back: GrayImage<f32> = load_gray(&p).unwrap();
        assert!(back.pixels().iter().zip(img.pixels()).all(|(a, b)| (a - b).abs() < 3e-3));
    }
}

//! Spectrogram images: one 8-bit gray pixel per lattice point.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};
use crate::gabor::GaborCoefficients;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderSpec {
    /// Dynamic range in dB below the maximum mapped to black.
    pub range_db: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { range_db: 60.0 }
    }
}

/// Row-major gray image, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn write_pgm<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.pixels)?;
        Ok(())
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        image::GrayImage::from_raw(self.width as u32, self.height as u32, self.pixels.clone())
            .expect("buffer matches dimensions")
            .save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| GaborError::Io(std::io::Error::other(e)))
    }

    /// PNG for a `.png` extension, binary PGM otherwise.
    pub fn save(&self, path: &Path) -> Result<()> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("png") => self.save_png(path),
            _ => self.write_pgm(std::io::BufWriter::new(std::fs::File::create(path)?)),
        }
    }
}

/// `|c|^2` in dB relative to the maximum, clamped to `[-range, 0]` and mapped
/// linearly to `0..=255`. Column `n` is drawn with its points shifted up by
/// `round(n s / b)` rows (cyclically) so that sheared lattices keep their
/// frequency alignment; frequency 0 is the bottom row.
pub fn render_spectrogram(c: &GaborCoefficients, spec: &RenderSpec) -> Result<GrayImage> {
    if !(spec.range_db > 0.0) || !spec.range_db.is_finite() {
        return Err(GaborError::invalid("dynamic range must be positive"));
    }
    let peak = c.values().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(GaborError::invalid("cannot render all-zero coefficients"));
    }
    let l = c.lattice();
    let (width, height) = (c.cols(), c.rows());
    let mut pixels = vec![0u8; width * height];
    for col in 0..width {
        let offset = (col as f64 * l.shear() as f64 / l.b() as f64).round() as usize;
        for row in 0..height {
            let p = c.get(col, row).norm_sqr();
            let db = if p > 0.0 { 10.0 * (p / peak).log10() } else { f64::NEG_INFINITY };
            let level = (db.max(-spec.range_db) + spec.range_db) / spec.range_db;
            let y = height - 1 - (row + offset) % height;
            pixels[y * width + col] = (255.0 * level).round() as u8;
        }
    }
    Ok(GrayImage { width, height, pixels })
}

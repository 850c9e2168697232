//! File formats: signals (CSV, 16-bit WAV), coefficients (CSV plus a JSON
//! header), JSON/TOML configuration.
//!
//! Floats are written in shortest round-trip form (exponent notation for very
//! small or large magnitudes), so a write/read cycle is
//! bit exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dsp::Signal;
use crate::error::{GaborError, Result};
use crate::gabor::GaborCoefficients;
use crate::lattice::Lattice;

#[derive(Deserialize)]
struct SampleRow {
    index: usize,
    re: f64,
    im: f64,
}

/// CSV with header `index,re,im`.
pub fn write_signal_csv<W: Write>(signal: &Signal, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "re", "im"])?;
    for (i, z) in signal.samples().iter().enumerate() {
        out.write_record([i.to_string(), format!("{:?}", z.re), format!("{:?}", z.im)])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `index,re,im` rows; indices must be `0, 1, ..` in order.
pub fn read_signal_csv<R: Read>(r: R) -> Result<Signal> {
    let mut samples = Vec::new();
    for (expected, row) in csv::Reader::from_reader(r).deserialize::<SampleRow>().enumerate() {
        let row = row?;
        if row.index != expected {
            return Err(GaborError::Parse(format!("expected sample index {expected}, found {}", row.index)));
        }
        samples.push(Complex64::new(row.re, row.im));
    }
    Signal::new(samples)
}

/// Mono 16-bit PCM WAV, scaled to `[-1, 1)`, with its sample rate.
pub fn read_wav(path: &Path) -> Result<(Signal, u32)> {
    let reader = hound::WavReader::open(path).map_err(|e| GaborError::Parse(e.to_string()))?;
    let spec = reader.spec();
    if spec.channels != 1 || spec.bits_per_sample != 16 || spec.sample_format != hound::SampleFormat::Int {
        return Err(GaborError::Parse(format!(
            "expected 16-bit PCM mono, found {} channel(s) of {}-bit {:?}",
            spec.channels, spec.bits_per_sample, spec.sample_format
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| Complex64::new(v as f64 / 32768.0, 0.0)))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| GaborError::Parse(e.to_string()))?;
    Ok((Signal::new(samples)?, spec.sample_rate))
}

/// Loads a signal by extension: `.wav` or CSV.
pub fn load_signal(path: &Path) -> Result<(Signal, Option<u32>)> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("wav") => read_wav(path).map(|(s, r)| (s, Some(r))),
        _ => read_signal_csv(BufReader::new(File::open(path)?)).map(|s| (s, None)),
    }
}

pub fn save_signal(signal: &Signal, path: &Path) -> Result<()> {
    write_signal_csv(signal, BufWriter::new(File::create(path)?))
}

/// Lattice and optional sample rate stored alongside coefficient CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientsHeader {
    pub a: usize,
    pub b: usize,
    pub s: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_rate: Option<u32>,
}

impl CoefficientsHeader {
    pub fn new(lattice: &Lattice, sample_rate: Option<u32>) -> Self {
        CoefficientsHeader {
            a: lattice.a(),
            b: lattice.b(),
            s: lattice.shear(),
            n: lattice.len(),
            sample_rate,
        }
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::from_shear(self.a, self.b, self.s as i64, self.n)
    }
}

#[derive(Deserialize)]
struct CoefficientRow {
    x: usize,
    xi: usize,
    re: f64,
    im: f64,
}

/// CSV with header `x,xi,re,im`, one row per lattice point, column by column.
pub fn write_coefficients_csv<W: Write>(c: &GaborCoefficients, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "xi", "re", "im"])?;
    let l = c.lattice();
    for col in 0..c.cols() {
        for row in 0..c.rows() {
            let p = l.point(col, row);
            let z = c.get(col, row);
            out.write_record([p.x.to_string(), p.xi.to_string(), format!("{:?}", z.re), format!("{:?}", z.im)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads coefficients on `lattice`; every lattice point must appear once.
pub fn read_coefficients_csv<R: Read>(r: R, lattice: &Lattice) -> Result<GaborCoefficients> {
    let n = lattice.len();
    let mut c = GaborCoefficients::zeros(*lattice);
    let mut seen = vec![false; lattice.num_points()];
    for row in csv::Reader::from_reader(r).deserialize::<CoefficientRow>() {
        let row = row?;
        let col = row.x / lattice.a();
        let off = (row.xi + n - lattice.column_offset(col % lattice.cols())) % n;
        if row.x % lattice.a() != 0 || row.x >= n || row.xi >= n || !off.is_multiple_of(lattice.b()) {
            return Err(GaborError::Parse(format!("({}, {}) is not a point of {lattice}", row.x, row.xi)));
        }
        let r = off / lattice.b();
        let idx = col * lattice.rows() + r;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(GaborError::Parse(format!("duplicate point ({}, {})", row.x, row.xi)));
        }
        c.set(col, r, Complex64::new(row.re, row.im));
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        let p = lattice.point(i / lattice.rows(), i % lattice.rows());
        return Err(GaborError::Parse(format!("missing point ({}, {})", p.x, p.xi)));
    }
    Ok(c)
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

pub fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    write_json(value, BufWriter::new(File::create(path)?))
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

/// JSON or TOML chosen by extension (`.toml` is TOML, anything else JSON).
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("toml") => {
            toml::from_str(&text).map_err(|e| GaborError::Parse(e.to_string()))
        }
        _ => Ok(serde_json::from_str(&text)?),
    }
}

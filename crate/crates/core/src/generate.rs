//! Deterministic synthetic test signals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dsp::{gaussian_window, tf_shift, ChirpedGaussianParams, Signal, TfLocation, MIN_LEN};
use crate::error::{GaborError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalKind {
    /// Real chirp `cos(phase(t))` whose instantaneous frequency rises
    /// quadratically from `f0` bins at `t = 0` to `f1` bins at `t = N`.
    Quadchirp { f0: f64, f1: f64 },
    /// `sum_i cos(b cos(c t) + a_i t + theta)`: components sharing one
    /// sinusoidal frequency modulation. `a_i` and `c` are in radians per sample.
    Multitone { a: Vec<f64>, b: f64, c: f64, theta: f64 },
    /// Unit-norm chirped Gaussian centred at the origin.
    GaussAtom { sigma: f64, s: f64 },
    /// Chirped Gaussian moved to time `t0` and frequency bin `f0`.
    ChirpedGauss { sigma: f64, s: f64, t0: i64, f0: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub n: usize,
    #[serde(flatten)]
    pub kind: SignalKind,
    /// Additive white Gaussian noise at this signal-to-noise ratio.
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(GaborError::invalid("signal parameters must be finite"))
    }
}

impl SignalSpec {
    fn is_real(&self) -> bool {
        matches!(self.kind, SignalKind::Quadchirp { .. } | SignalKind::Multitone { .. })
    }

    pub fn generate(&self) -> Result<Signal> {
        let n = self.n;
        if n < MIN_LEN {
            return Err(GaborError::TooShort(n));
        }
        let nf = n as f64;
        let clean = match &self.kind {
            SignalKind::Quadchirp { f0, f1 } => {
                finite(&[*f0, *f1])?;
                Signal::from_real(
                    &(0..n)
                        .map(|t| {
                            let t = t as f64;
                            (2.0 * PI / nf * (f0 * t + (f1 - f0) * t * t * t / (3.0 * nf * nf))).cos()
                        })
                        .collect::<Vec<_>>(),
                )?
            }
            SignalKind::Multitone { a, b, c, theta } => {
                finite(a)?;
                finite(&[*b, *c, *theta])?;
                if a.is_empty() {
                    return Err(GaborError::invalid("multitone needs at least one component"));
                }
                Signal::from_real(
                    &(0..n)
                        .map(|t| {
                            let t = t as f64;
                            let m = b * (c * t).cos() + theta;
                            a.iter().map(|ai| (m + ai * t).cos()).sum()
                        })
                        .collect::<Vec<_>>(),
                )?
            }
            SignalKind::GaussAtom { sigma, s } => gaussian_window(ChirpedGaussianParams::new(*sigma, *s)?, n)?,
            SignalKind::ChirpedGauss { sigma, s, t0, f0 } => tf_shift(
                &gaussian_window(ChirpedGaussianParams::new(*sigma, *s)?, n)?,
                TfLocation::new(*t0, *f0, n),
            ),
        };
        match self.snr_db {
            None => Ok(clean),
            Some(snr) => {
                finite(&[snr])?;
                Ok(self.add_noise(clean, snr))
            }
        }
    }

    fn add_noise(&self, clean: Signal, snr_db: f64) -> Signal {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let power = clean.norm_sqr() / clean.len() as f64;
        let std = (power / 10f64.powf(snr_db / 10.0)).sqrt();
        let real = self.is_real();
        let mut out = clean;
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
        for z in out.samples_mut() {
            let e: Complex64 = if real {
                Complex64::new(std * normal(), 0.0)
            } else {
                let h = std / 2f64.sqrt();
                Complex64::new(
                    h * normal(),
                    h * normal(),
                )
            };
            *z += e;
        }
        out
    }
}

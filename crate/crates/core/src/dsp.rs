//! Elementary operators on periodic signals in `C^N`: the unitary DFT,
//! time-frequency shifts, discrete chirps, chirped Gaussian windows and
//! time-frequency centering.
//!
//! All index arithmetic is modulo `N`. Inner products are linear in the first
//! argument, `<u, v> = sum_t u(t) conj(v(t))`, so a Gabor coefficient
//! `<f, M_xi T_x g>` is linear in the analysed signal `f`.

use std::f64::consts::PI;
use std::ops::Index;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};

/// Minimum supported signal length.
pub const MIN_LEN: usize = 4;

/// A finite complex signal of fixed length `N >= 4` with periodic indexing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct Signal {
    samples: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for Signal {
    type Error = GaborError;

    fn try_from(samples: Vec<Complex64>) -> Result<Self> {
        Signal::new(samples)
    }
}

impl From<Signal> for Vec<Complex64> {
    fn from(s: Signal) -> Self {
        s.samples
    }
}

impl Signal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < MIN_LEN {
            return Err(GaborError::TooShort(samples.len()));
        }
        Ok(Signal { samples })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Signal::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Signal::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Unit impulse at index `at` (reduced modulo `n`).
    pub fn delta(n: usize, at: usize) -> Result<Self> {
        let mut s = Signal::zeros(n)?;
        s.samples[at % n] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub(crate) fn from_vec_unchecked(samples: Vec<Complex64>) -> Self {
        debug_assert!(samples.len() >= MIN_LEN);
        Signal { samples }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `sum |g|^p`-based p-norm; `p = inf` gives the max modulus.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
        } else {
            self.samples
                .iter()
                .map(|z| z.norm().powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
    }

    /// `<self, other> = sum self(t) conj(other(t))`.
    pub fn inner(&self, other: &Signal) -> Complex64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn scaled(&self, c: Complex64) -> Signal {
        Signal::from_vec_unchecked(self.samples.iter().map(|z| z * c).collect())
    }

    /// Copy rescaled to unit l2 norm.
    pub fn normalized(&self) -> Result<Signal> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(GaborError::invalid("cannot normalize a zero or non-finite signal"));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &Signal) -> Result<Signal> {
        check_len(self.len(), other.len())?;
        Ok(Signal::from_vec_unchecked(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + c * b)
                .collect(),
        ))
    }

    pub fn distance(&self, other: &Signal) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for Signal {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.samples[i % self.samples.len()]
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(GaborError::Dimension { expected, found });
    }
    Ok(())
}

/// A time-frequency shift `(x, xi)`, both reduced modulo `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TfLocation {
    pub x: usize,
    pub xi: usize,
}

impl TfLocation {
    pub fn new(x: i64, xi: i64, n: usize) -> Self {
        let n = n as i64;
        TfLocation {
            x: x.rem_euclid(n) as usize,
            xi: xi.rem_euclid(n) as usize,
        }
    }
}

/// Parameters of the chirped, dilated Gaussian window.
///
/// `sigma` is the time width relative to `N` (`sigma = 1` is the round
/// Gaussian, equally spread in time and frequency); `s` is the chirp rate in
/// frequency bins per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpedGaussianParams {
    pub sigma: f64,
    pub s: f64,
}

impl ChirpedGaussianParams {
    pub fn new(sigma: f64, s: f64) -> Result<Self> {
        let p = ChirpedGaussianParams { sigma, s };
        p.validate()?;
        Ok(p)
    }

    pub fn round() -> Self {
        ChirpedGaussianParams { sigma: 1.0, s: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(GaborError::invalid(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if !self.s.is_finite() {
            return Err(GaborError::invalid("chirp rate must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Unitary DFT (`1/sqrt(N)` in both directions).
pub fn dft(g: &Signal, direction: Direction) -> Signal {
    let n = g.len();
    let mut planner = FftPlanner::<f64>::new();
    let fft = match direction {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    };
    let mut buf = g.samples.clone();
    fft.process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|z| *z *= scale);
    Signal::from_vec_unchecked(buf)
}

/// `e^{2 pi i k / n}` with `k` reduced first, so integer phases stay exact.
pub(crate) fn unit_root(k: i64, n: usize) -> Complex64 {
    let k = k.rem_euclid(n as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * k / n as f64)
}

/// `M_xi T_x g`: cyclic translation by `x` followed by modulation by `xi`.
pub fn tf_shift(g: &Signal, loc: TfLocation) -> Signal {
    let n = g.len();
    let out = (0..n)
        .map(|t| {
            let src = (t + n - loc.x % n) % n;
            g.samples[src] * unit_root((loc.xi * t) as i64, n)
        })
        .collect();
    Signal::from_vec_unchecked(out)
}

/// Discrete chirp `U_s g(n) = e^{i pi s n^2 (N+1)/N} g(n)`.
///
/// The integer part of `s` is evaluated with exact integer phase reduction;
/// for integer `s` the multiplier is `N`-periodic.
pub fn chirp(g: &Signal, s: f64) -> Signal {
    let n = g.len();
    let s_int = s.trunc();
    let s_frac = s - s_int;
    let two_n = 2 * n as i128;
    let k = s_int as i128;
    let out = g
        .samples
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            let sq = (idx as i128) * (idx as i128);
            let mut q = (k * (sq % two_n) % two_n * ((n as i128 + 1) % two_n)).rem_euclid(two_n);
            // symmetric residue so that s and -s give exactly opposite phases
            if q > n as i128 {
                q -= two_n;
            }
            let mut phase = PI * q as f64 / n as f64;
            if s_frac != 0.0 {
                phase += PI * s_frac * (sq as f64) * (n as f64 + 1.0) / n as f64;
            }
            z * Complex64::from_polar(1.0, phase)
        })
        .collect();
    Signal::from_vec_unchecked(out)
}

/// Position on the symmetric range `{-floor(N/2), .., ceil(N/2) - 1}` of index `i`.
pub fn symmetric_time(i: usize, n: usize) -> f64 {
    if i < n.div_ceil(2) {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// Raw (not renormalized) window samples `(2/(N sigma))^{1/4} e^{-pi t^2/(N sigma) + i pi s t^2 / N}`.
pub fn gaussian_window_raw(params: ChirpedGaussianParams, n: usize) -> Result<Signal> {
    params.validate()?;
    if n < MIN_LEN {
        return Err(GaborError::TooShort(n));
    }
    let nf = n as f64;
    let amp = (2.0 / (nf * params.sigma)).powf(0.25);
    let out = (0..n)
        .map(|i| {
            let t = symmetric_time(i, n);
            let t2 = t * t;
            Complex64::from_polar(
                amp * (-PI * t2 / (nf * params.sigma)).exp(),
                PI * params.s * t2 / nf,
            )
        })
        .collect();
    Ok(Signal::from_vec_unchecked(out))
}

/// Chirped Gaussian window centred at index 0, renormalized to unit l2 norm.
pub fn gaussian_window(params: ChirpedGaussianParams, n: usize) -> Result<Signal> {
    gaussian_window_raw(params, n)?.normalized()
}

/// A unit-norm window together with its exact derivatives in `sigma` and `s`.
#[derive(Debug, Clone)]
pub struct WindowJet {
    pub window: Signal,
    pub d_sigma: Signal,
    pub d_s: Signal,
}

/// Window and the derivatives of the *normalized* window with respect to its
/// two parameters.
pub fn gaussian_window_jet(params: ChirpedGaussianParams, n: usize) -> Result<WindowJet> {
    let raw = gaussian_window_raw(params, n)?;
    let nf = n as f64;
    let sigma = params.sigma;
    let norm = raw.norm();
    let mut dsig = Vec::with_capacity(n);
    let mut ds = Vec::with_capacity(n);
    for (i, z) in raw.samples.iter().enumerate() {
        let t = symmetric_time(i, n);
        let t2 = t * t;
        dsig.push(z * (PI * t2 / (sigma * sigma * nf) - 0.25 / sigma));
        ds.push(z * Complex64::new(0.0, PI * t2 / nf));
    }
    // d(phi/|phi|) = dphi/|phi| - phi Re<dphi, phi>/|phi|^3
    let dsig = Signal::from_vec_unchecked(dsig);
    let proj = dsig.inner(&raw).re / (norm * norm * norm);
    let inv = 1.0 / norm;
    let d_sigma = Signal::from_vec_unchecked(
        dsig.samples
            .iter()
            .zip(&raw.samples)
            .map(|(d, z)| d * inv - z * proj)
            .collect(),
    );
    let d_s = Signal::from_vec_unchecked(ds.into_iter().map(|d| d * inv).collect());
    Ok(WindowJet {
        window: raw.scaled(Complex64::new(inv, 0.0)),
        d_sigma,
        d_s,
    })
}

/// Von Mises means of `|g|^2` (time) and `|dft(g)|^2` (frequency), in
/// samples and bins on `(-N/2, N/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfMean {
    pub time: f64,
    pub freq: f64,
}

const SPREAD_TOL: f64 = 1e-12;

fn circular_mean(values: &[Complex64], energy: f64) -> Option<f64> {
    let n = values.len();
    let resultant: Complex64 = values
        .iter()
        .enumerate()
        .map(|(i, z)| unit_root(i as i64, n) * z.norm_sqr())
        .sum();
    if resultant.norm() < SPREAD_TOL * energy {
        return None;
    }
    Some(n as f64 * resultant.arg() / (2.0 * PI))
}

pub fn tf_mean(g: &Signal) -> Result<TfMean> {
    let energy = g.norm_sqr();
    if !(energy > 0.0) {
        return Err(GaborError::UndefinedMean("time"));
    }
    let time = circular_mean(&g.samples, energy).ok_or(GaborError::UndefinedMean("time"))?;
    let spec = dft(g, Direction::Forward);
    let freq = circular_mean(&spec.samples, energy).ok_or(GaborError::UndefinedMean("frequency"))?;
    Ok(TfMean { time, freq })
}

/// Integer shift `(x, xi)` such that `M_{-xi} T_{-x} g` is TF-centred.
///
/// An axis along which `g` is perfectly spread has no mean; it is left
/// unshifted. Fails only when neither axis has a mean.
pub fn tf_center_shift(g: &Signal) -> Result<(i64, i64)> {
    let energy = g.norm_sqr();
    if !(energy > 0.0) {
        return Err(GaborError::UndefinedMean("time"));
    }
    let time = circular_mean(&g.samples, energy);
    let freq = circular_mean(&dft(g, Direction::Forward).samples, energy);
    match (time, freq) {
        (None, None) => Err(GaborError::UndefinedMean("time")),
        (t, f) => Ok((
            t.map_or(0, |v| v.round() as i64),
            f.map_or(0, |v| v.round() as i64),
        )),
    }
}

/// TF-centred copy `M_{-mu_f} T_{-mu_t} g` with both means rounded to integers.
pub fn tf_center(g: &Signal) -> Result<Signal> {
    let (x, xi) = tf_center_shift(g)?;
    Ok(tf_shift(g, TfLocation::new(-x, -xi, g.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_signal(n: usize, seed: u64) -> Signal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Signal::new(
            (0..n)
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect(),
        )
        .unwrap()
    }

    fn assert_close(a: &Signal, b: &Signal, tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn short_signals_rejected() {
        assert!(matches!(Signal::zeros(3), Err(GaborError::TooShort(3))));
    }

    #[test]
    fn dft_of_delta_and_constant() {
        let d = dft(&Signal::delta(4, 0).unwrap(), Direction::Forward);
        assert_close(&d, &Signal::from_real(&[0.5; 4]).unwrap(), 1e-15);
        let k = dft(&Signal::from_real(&[1.0; 4]).unwrap(), Direction::Forward);
        assert_close(&k, &Signal::from_real(&[2.0, 0.0, 0.0, 0.0]).unwrap(), 1e-15);
    }

    #[test]
    fn dft_is_unitary_and_invertible() {
        let g = random_signal(64, 1);
        let h = dft(&g, Direction::Forward);
        assert_abs_diff_eq!(h.norm(), g.norm(), epsilon = 1e-12);
        let back = dft(&h, Direction::Inverse);
        assert!(back.distance(&g) / g.norm() < 1e-12);
    }

    #[test]
    fn tf_shift_examples() {
        let g = Signal::from_real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let t = tf_shift(&g, TfLocation::new(1, 0, 4));
        assert_close(&t, &Signal::from_real(&[4.0, 1.0, 2.0, 3.0]).unwrap(), 1e-15);

        let ones = Signal::from_real(&[1.0; 4]).unwrap();
        let m = tf_shift(&ones, TfLocation::new(0, 1, 4));
        let expect = Signal::new(vec![c(1., 0.), c(0., 1.), c(-1., 0.), c(0., -1.)]).unwrap();
        assert_close(&m, &expect, 1e-15);

        let r = random_signal(16, 2);
        assert_eq!(tf_shift(&r, TfLocation::new(16, 16, 16)), r);
    }

    #[test]
    fn tf_shift_preserves_lp_norms() {
        let g = random_signal(32, 3);
        let h = tf_shift(&g, TfLocation::new(5, 11, 32));
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_abs_diff_eq!(h.lp_norm(p), g.lp_norm(p), epsilon = 1e-12);
        }
    }

    #[test]
    fn chirp_examples() {
        let g = random_signal(16, 4);
        assert_eq!(chirp(&g, 0.0), g);

        let ones = Signal::from_real(&[1.0; 4]).unwrap();
        let u = chirp(&ones, 1.0);
        let e = Complex64::from_polar(1.0, 5.0 * PI / 4.0);
        let expect = Signal::new(vec![c(1., 0.), e, c(-1., 0.), e]).unwrap();
        assert_close(&u, &expect, 1e-15);

        let r = random_signal(64, 5);
        assert_abs_diff_eq!(chirp(&r, 2.7).norm(), r.norm(), epsilon = 1e-12);
        assert_close(&chirp(&chirp(&r, 2.7), -2.7), &r, 1e-15);
        assert_close(&chirp(&chirp(&r, 3.0), -3.0), &r, 1e-15);
    }

    #[test]
    fn integer_chirp_is_periodic() {
        // for integer s the multiplier at n and n + N agree
        let n = 12usize;
        for s in [1.0, 2.0, -3.0] {
            let short = chirp(&Signal::from_real(&vec![1.0; n]).unwrap(), s);
            for i in 0..n {
                let m = (i + n) as f64;
                let direct = Complex64::from_polar(1.0, PI * s * m * m * (n as f64 + 1.0) / n as f64);
                assert!((short[i] - direct).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn gaussian_window_round_case() {
        let n = 128;
        let p = ChirpedGaussianParams::round();
        let raw = gaussian_window_raw(p, n).unwrap();
        assert_abs_diff_eq!(raw[0].re, (2.0f64 / 128.0).powf(0.25), epsilon = 1e-15);
        assert!((raw.norm() - 1.0).abs() <= 1e-6);
        let w = gaussian_window(p, n).unwrap();
        assert_abs_diff_eq!(w.norm(), 1.0, epsilon = 1e-15);
        for i in 1..n {
            assert_eq!(w[i].im, 0.0);
            assert_abs_diff_eq!(w[i].re, w[n - i].re, epsilon = 1e-15);
        }
    }

    #[test]
    fn gaussian_window_rejects_bad_sigma() {
        for sigma in [0.0, -1.0, f64::NAN] {
            assert!(gaussian_window(ChirpedGaussianParams { sigma, s: 0.0 }, 64).is_err());
        }
    }

    #[test]
    fn window_jet_matches_finite_differences() {
        let n = 96;
        let p = ChirpedGaussianParams::new(1.7, 0.3).unwrap();
        let jet = gaussian_window_jet(p, n).unwrap();
        let h = 1e-6;
        let fd = |dp: ChirpedGaussianParams| {
            let a = gaussian_window(ChirpedGaussianParams { sigma: p.sigma + dp.sigma, s: p.s + dp.s }, n).unwrap();
            let b = gaussian_window(ChirpedGaussianParams { sigma: p.sigma - dp.sigma, s: p.s - dp.s }, n).unwrap();
            a.add_scaled(c(-1.0, 0.0), &b).unwrap().scaled(c(0.5 / h, 0.0))
        };
        assert_close(&fd(ChirpedGaussianParams { sigma: h, s: 0.0 }), &jet.d_sigma, 1e-8);
        assert_close(&fd(ChirpedGaussianParams { sigma: 0.0, s: h }), &jet.d_s, 1e-8);
    }

    #[test]
    fn tf_mean_examples() {
        let d = Signal::delta(16, 3).unwrap();
        // a delta is perfectly spread in frequency
        assert!(matches!(tf_mean(&d), Err(GaborError::UndefinedMean("frequency"))));
        let m = circular_mean(d.samples(), 1.0).unwrap();
        assert_abs_diff_eq!(m, 3.0, epsilon = 1e-12);

        let g = gaussian_window(ChirpedGaussianParams::round(), 128).unwrap();
        let m = tf_mean(&g).unwrap();
        assert_abs_diff_eq!(m.time, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.freq, 0.0, epsilon = 1e-9);

        let n = 32;
        let tone = Signal::new(
            (0..n)
                .map(|t| unit_root(5 * t as i64, n) / (n as f64).sqrt())
                .collect(),
        )
        .unwrap();
        let freq = circular_mean(dft(&tone, Direction::Forward).samples(), 1.0).unwrap();
        assert_abs_diff_eq!(freq, 5.0, epsilon = 1e-9);
    }

    #[test]
    fn tf_mean_errors() {
        assert!(tf_mean(&Signal::zeros(8).unwrap()).is_err());
        assert!(tf_center(&Signal::zeros(8).unwrap()).is_err());
    }

    #[test]
    fn tf_mean_follows_shifts() {
        let n = 128;
        let g = gaussian_window(ChirpedGaussianParams::round(), n).unwrap();
        for (x, xi) in [(10i64, 7i64), (-20, 30), (63, -64)] {
            let h = tf_shift(&g, TfLocation::new(x, xi, n));
            let m = tf_mean(&h).unwrap();
            let wrap = |v: f64, target: i64| {
                let d = (v - target as f64).rem_euclid(n as f64);
                d.min(n as f64 - d)
            };
            assert!(wrap(m.time, x) < 1e-6, "{m:?}");
            assert!(wrap(m.freq, xi) < 1e-6, "{m:?}");
        }
    }

    #[test]
    fn tf_center_examples() {
        let g = gaussian_window(ChirpedGaussianParams::round(), 64).unwrap();
        assert_eq!(tf_center(&g).unwrap(), g);

        let d = Signal::delta(16, 3).unwrap();
        let centred = tf_center(&d).unwrap();
        assert_abs_diff_eq!(centred[0].norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(centred.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tf_center_is_idempotent() {
        for seed in 0..10 {
            let g = random_signal(48, 100 + seed);
            let once = tf_center(&g).unwrap();
            let twice = tf_center(&once).unwrap();
            let (x, xi) = tf_center_shift(&once).unwrap();
            assert!(x.abs() <= 1 && xi.abs() <= 1, "{x} {xi}");
            let m = tf_mean(&twice).unwrap();
            assert!(m.time.abs() <= 1.0 && m.freq.abs() <= 1.0);
        }
    }
}

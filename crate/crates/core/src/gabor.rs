//! Discrete Gabor transform over normal-form lattices, synthesis and the
//! time-frequency masking operator.
//!
//! Coefficients are `c(n, m) = <f, M_{xi'} T_{x'} g>` at the lattice point
//! `(x', xi') = (n a, m b + n s)`. Column `n` is evaluated exactly with one
//! FFT of length `M = N/b`: the product `f(t) conj(g(t - x')) e^{-2 pi i n s t / N}`
//! is folded modulo `M` and transformed. Synthesis runs the same steps in
//! reverse, so the transform costs `O((N/a) (N log M))` for every shear.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::dsp::{check_len, chirp, tf_shift, unit_root, Signal};
use crate::error::{GaborError, Result};
use crate::exec;
use crate::lattice::Lattice;

/// Gabor coefficients stored column by column: entry `(n, m)` lives at
/// `n * rows + m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaborCoefficients {
    lattice: Lattice,
    values: Vec<Complex64>,
}

impl GaborCoefficients {
    pub fn new(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        check_len(lattice.num_points(), values.len())?;
        Ok(GaborCoefficients { lattice, values })
    }

    pub fn zeros(lattice: Lattice) -> Self {
        GaborCoefficients {
            lattice,
            values: vec![Complex64::new(0.0, 0.0); lattice.num_points()],
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn cols(&self) -> usize {
        self.lattice.cols()
    }

    pub fn rows(&self) -> usize {
        self.lattice.rows()
    }

    pub fn get(&self, col: usize, row: usize) -> Complex64 {
        self.values[col * self.rows() + row]
    }

    pub fn set(&mut self, col: usize, row: usize, v: Complex64) {
        let rows = self.rows();
        self.values[col * rows + row] = v;
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        let rows = self.rows();
        &self.values[col * rows..(col + 1) * rows]
    }

    /// `sum |c|^2`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Coefficients multiplied pointwise by a mask.
    pub fn masked(&self, mask: &TfMask) -> Result<Self> {
        mask.check_shape(&self.lattice)?;
        Ok(GaborCoefficients {
            lattice: self.lattice,
            values: self
                .values
                .iter()
                .zip(&mask.weights)
                .map(|(c, w)| c * *w)
                .collect(),
        })
    }
}

/// Non-negative real weights with the shape of a lattice's coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TfMask {
    cols: usize,
    rows: usize,
    weights: Vec<f64>,
}

impl TfMask {
    pub fn new(lattice: &Lattice, weights: Vec<f64>) -> Result<Self> {
        check_len(lattice.num_points(), weights.len())?;
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(GaborError::invalid(format!("mask weight {w} is not finite and non-negative")));
        }
        Ok(TfMask {
            cols: lattice.cols(),
            rows: lattice.rows(),
            weights,
        })
    }

    pub fn ones(lattice: &Lattice) -> Self {
        TfMask {
            cols: lattice.cols(),
            rows: lattice.rows(),
            weights: vec![1.0; lattice.num_points()],
        }
    }

    pub fn zeros(lattice: &Lattice) -> Self {
        TfMask {
            cols: lattice.cols(),
            rows: lattice.rows(),
            weights: vec![0.0; lattice.num_points()],
        }
    }

    /// Indicator of the single point `(col, row)`.
    pub fn indicator(lattice: &Lattice, col: usize, row: usize) -> Self {
        let mut m = Self::zeros(lattice);
        m.weights[col * lattice.rows() + row] = 1.0;
        m
    }

    /// Weights from a function of the column, row and lattice point.
    pub fn from_fn(
        lattice: &Lattice,
        f: impl Fn(usize, usize, crate::dsp::TfLocation) -> f64,
    ) -> Result<Self> {
        let mut w = Vec::with_capacity(lattice.num_points());
        for col in 0..lattice.cols() {
            for row in 0..lattice.rows() {
                w.push(f(col, row, lattice.point(col, row)));
            }
        }
        Self::new(lattice, w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn check_shape(&self, lattice: &Lattice) -> Result<()> {
        if self.cols != lattice.cols() || self.rows != lattice.rows() {
            return Err(GaborError::Dimension {
                expected: lattice.num_points(),
                found: self.weights.len(),
            });
        }
        Ok(())
    }
}

/// `(i + d) mod m` for `i < m`, `d <= m`.
#[inline]
fn step(i: usize, d: usize, m: usize) -> usize {
    let j = i + d;
    if j >= m {
        j - m
    } else {
        j
    }
}

/// `e^{2 pi i k / N}` for `k = 0..N`.
struct Twiddles(Vec<Complex64>);

impl Twiddles {
    fn new(n: usize) -> Self {
        Twiddles((0..n).map(|k| unit_root(k as i64, n)).collect())
    }

    #[inline]
    fn get(&self, k: usize) -> Complex64 {
        self.0[k % self.0.len()]
    }
}

fn check_inputs(f: &Signal, g: &Signal, lattice: &Lattice) -> Result<()> {
    check_len(lattice.len(), f.len())?;
    check_len(lattice.len(), g.len())
}

/// Fast discrete Gabor transform `c(n, m) = <f, M_{mb + ns} T_{na} g>`.
pub fn dgt(f: &Signal, g: &Signal, lattice: &Lattice) -> Result<GaborCoefficients> {
    check_inputs(f, g, lattice)?;
    let n = lattice.len();
    let rows = lattice.rows();
    let a = lattice.a();
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(rows);
    let tw = Twiddles::new(n);
    let fs = f.samples();
    let gs = g.samples();

    let mut values = vec![Complex64::new(0.0, 0.0); lattice.num_points()];
    exec::fill_chunks(&mut values, rows, |offset, col_out| {
        let col = offset / rows;
        let x = col * a;
        let nu = lattice.column_offset(col);
        col_out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        // running indices: k = nu t mod N, gi = t - x mod N, r = t mod rows
        let (mut k, mut gi, mut r) = (0, (n - x) % n, 0);
        for &ft in fs {
            // e^{-2 pi i nu t / N}
            let phase = tw.get(n - k);
            col_out[r] += ft * gs[gi].conj() * phase;
            k = step(k, nu, n);
            gi = step(gi, 1, n);
            r = step(r, 1, rows);
        }
        fft.process(col_out);
    });
    GaborCoefficients::new(*lattice, values)
}

/// Reference evaluation by explicit inner products, `O(N^2 R)` per call.
pub fn dgt_direct(f: &Signal, g: &Signal, lattice: &Lattice) -> Result<GaborCoefficients> {
    check_inputs(f, g, lattice)?;
    let values = lattice
        .points()
        .into_iter()
        .map(|loc| f.inner(&tf_shift(g, loc)))
        .collect();
    GaborCoefficients::new(*lattice, values)
}

/// `sum_{(n,m)} c(n, m) M_{mb + ns} T_{na} w`.
fn synthesize(c: &GaborCoefficients, w: &Signal) -> Result<Signal> {
    let lattice = c.lattice();
    check_len(lattice.len(), w.len())?;
    let n = lattice.len();
    let rows = lattice.rows();
    let cols = lattice.cols();
    let a = lattice.a();
    let ifft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(rows);

    let mut columns = c.values().to_vec();
    exec::fill_chunks(&mut columns, rows, |_, col| ifft.process(col));

    let tw = Twiddles::new(n);
    let ws = w.samples();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let chunk = n.div_ceil(64).max(64);
    exec::fill_chunks(&mut out, chunk, |t0, seg| {
        for (i, z) in seg.iter_mut().enumerate() {
            let t = t0 + i;
            let mut acc = Complex64::new(0.0, 0.0);
            let r = t % rows;
            let mut wi = t;
            for col in 0..cols {
                let nu = lattice.column_offset(col);
                acc += ws[wi] * tw.get(nu * t % n) * columns[col * rows + r];
                wi = if wi >= a { wi - a } else { wi + n - a };
            }
            *z = acc;
        }
    });
    Ok(Signal::from_vec_unchecked(out))
}

/// Synthesis with window `g_d`: `sum c(x, xi) M_xi T_x g_d`.
pub fn idgt(c: &GaborCoefficients, g_d: &Signal) -> Result<Signal> {
    synthesize(c, g_d)
}

/// Masking operator `sum Gamma(x, xi) <g, M_xi T_x f> M_xi T_x f`.
pub fn mask_operator(g: &Signal, f: &Signal, lattice: &Lattice, mask: &TfMask) -> Result<Signal> {
    let c = dgt(g, f, lattice)?.masked(mask)?;
    synthesize(&c, f)
}

/// Frame operator `S f = sum <f, M_xi T_x g> M_xi T_x g`.
pub fn frame_operator_apply(f: &Signal, g: &Signal, lattice: &Lattice) -> Result<Signal> {
    mask_operator(f, g, lattice, &TfMask::ones(lattice))
}

/// Transform on the lattice sheared by integer chirp rate `c`, computed from a
/// rectangular transform of chirped inputs. `lattice` must be rectangular;
/// the result lives on `lattice.sheared_by_chirp(c)`.
pub fn dgt_by_chirp(f: &Signal, g: &Signal, lattice: &Lattice, c: i64) -> Result<GaborCoefficients> {
    check_inputs(f, g, lattice)?;
    let target = lattice.sheared_by_chirp(c)?;
    let cs = -(c as f64);
    let rect = dgt(&chirp(f, cs), &chirp(g, cs), lattice)?;
    let n = lattice.len() as i128;
    let a = lattice.a() as i64;
    let b = lattice.b() as i64;
    let rows = lattice.rows();
    let sp = target.shear() as i64;
    let mut out = GaborCoefficients::zeros(target);
    for col in 0..lattice.cols() {
        let x = col as i128 * a as i128;
        // <f, M_{xi + c x} T_x g> = e^{-i pi c x^2 (N+1)/N} <U_{-c} f, M_xi T_x U_{-c} g>
        let q = (c as i128 * (x * x % (2 * n)) % (2 * n) * ((n + 1) % (2 * n))).rem_euclid(2 * n);
        let phase = Complex64::from_polar(1.0, -std::f64::consts::PI * q as f64 / n as f64);
        let shift = (col as i64 * (a * c - sp)).div_euclid(b);
        for row in 0..rows {
            let target_row = (row as i64 + shift).rem_euclid(rows as i64) as usize;
            out.set(col, target_row, rect.get(col, row) * phase);
        }
    }
    Ok(out)
}

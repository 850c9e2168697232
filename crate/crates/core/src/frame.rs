//! Frame bounds and canonical dual windows.
//!
//! The frame operator of a lattice system only couples samples congruent
//! modulo `M = N/b`, so it splits into `M` Hermitian blocks of size `b x b`:
//! `B_r(j, k) = M sum_n g(t_j - na) conj(g(t_k - na)) e^{2 pi i (ns)(j - k)/b}`
//! with `t_j = r + jM`. Bounds are the extreme block eigenvalues and the dual
//! window is obtained by block-wise Cholesky solves.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::{check_len, unit_root, Signal};
use crate::error::{GaborError, Result};
use crate::exec;
use crate::lattice::Lattice;

/// Systems with `A/B` below this are treated as numerically singular.
pub const MIN_BOUND_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    /// `B/A`; infinite when `A <= 0`.
    pub fn condition(&self) -> f64 {
        if self.lower > 0.0 {
            self.upper / self.lower
        } else {
            f64::INFINITY
        }
    }

    pub fn is_frame(&self) -> bool {
        self.lower > 0.0 && self.lower / self.upper >= MIN_BOUND_RATIO
    }
}

fn block(g: &Signal, lattice: &Lattice, r: usize) -> DMatrix<Complex64> {
    let n = lattice.len();
    let b = lattice.b();
    let m = lattice.rows();
    let a = lattice.a();
    let gs = g.samples();
    let mut out = DMatrix::<Complex64>::zeros(b, b);
    for col in 0..lattice.cols() {
        let x = col * a;
        let nu = lattice.column_offset(col);
        let w: Vec<Complex64> = (0..b).map(|j| gs[(r + j * m + n - x) % n]).collect();
        for j in 0..b {
            if w[j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..b {
                let phase = unit_root((nu * (j + b - k)) as i64, b);
                out[(j, k)] += w[j] * w[k].conj() * phase;
            }
        }
    }
    out * Complex64::new(m as f64, 0.0)
}

/// Dense frame matrix `S(t, u)`, for tests and small `N`.
pub fn frame_matrix(g: &Signal, lattice: &Lattice) -> Result<DMatrix<Complex64>> {
    check_len(lattice.len(), g.len())?;
    let n = lattice.len();
    let m = lattice.rows();
    let mut s = DMatrix::<Complex64>::zeros(n, n);
    for r in 0..m {
        let blk = block(g, lattice, r);
        for j in 0..lattice.b() {
            for k in 0..lattice.b() {
                s[(r + j * m, r + k * m)] = blk[(j, k)];
            }
        }
    }
    Ok(s)
}

/// Optimal frame bounds, the extreme eigenvalues of the frame operator.
pub fn frame_bounds(g: &Signal, lattice: &Lattice) -> Result<FrameBounds> {
    check_len(lattice.len(), g.len())?;
    if !(g.norm() > 0.0) {
        return Err(GaborError::invalid("window must be non-zero"));
    }
    let extremes = exec::map_indexed(lattice.rows(), |r| {
        let ev = block(g, lattice, r).symmetric_eigenvalues();
        (ev.min(), ev.max())
    });
    let lower = extremes.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
    let upper = extremes.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(FrameBounds {
        lower: lower.max(0.0),
        upper,
    })
}

/// Canonical dual window `S^{-1} g`.
pub fn dual_window(g: &Signal, lattice: &Lattice) -> Result<Signal> {
    let bounds = frame_bounds(g, lattice)?;
    if !bounds.is_frame() {
        return Err(GaborError::NotAFrame {
            ratio: bounds.lower / bounds.upper,
        });
    }
    let n = lattice.len();
    let m = lattice.rows();
    let b = lattice.b();
    let gs = g.samples();
    let solved = exec::map_indexed(m, |r| {
        let rhs = DVector::from_iterator(b, (0..b).map(|j| gs[r + j * m]));
        block(g, lattice, r).cholesky().map(|c| c.solve(&rhs))
    });
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (r, sol) in solved.into_iter().enumerate() {
        let sol = sol.ok_or(GaborError::NotAFrame {
            ratio: bounds.lower / bounds.upper,
        })?;
        for j in 0..b {
            out[r + j * m] = sol[j];
        }
    }
    Signal::new(out)
}

//! Lattices adapted to a chirped Gaussian window.
//!
//! The adapted generator is the hexagonal generator at the requested density,
//! dilated by `sigma` and sheared by the chirp rate `s`. It is real valued and
//! is rounded to a feasible normal-form lattice by [`rationalize_lattice`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::{gaussian_window, ChirpedGaussianParams, Signal};
use crate::error::{GaborError, Result};
use crate::exec;
use crate::lattice::{divisors, Lattice};

/// Lower-triangular generator `[[m11, 0], [m21, m22]]`: time step, shear and
/// frequency step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// Requested redundancy.
    #[serde(rename = "R")]
    pub redundancy: f64,
}

impl GeneratorMatrix {
    pub fn determinant(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }
}

fn hexagonal_shape() -> [[f64; 2]; 2] {
    let q = 3f64.powf(0.25);
    let r2 = 2f64.sqrt();
    [[q / r2, 0.0], [1.0 / (q * r2), r2 / q]]
}

/// `sqrt(N/R) [[1, 0], [s, 1]] diag(sqrt(sigma), 1/sqrt(sigma)) H` with the
/// hexagonal shape `H`; its determinant is `N/R`.
pub fn adapted_lattice_real(params: ChirpedGaussianParams, n: usize, redundancy: f64) -> Result<GeneratorMatrix> {
    params.validate()?;
    if !(redundancy >= 1.0) || !redundancy.is_finite() {
        return Err(GaborError::invalid(format!("redundancy must be >= 1, got {redundancy}")));
    }
    let h = hexagonal_shape();
    let c = (n as f64 / redundancy).sqrt();
    let rs = params.sigma.sqrt();
    Ok(GeneratorMatrix {
        m11: c * rs * h[0][0],
        m12: 0.0,
        m21: c * (params.s * rs * h[0][0] + h[1][0] / rs),
        m22: c * h[1][1] / rs,
        n,
        redundancy,
    })
}

const TIE_TOL: f64 = 1e-12;

/// Divisor of `n` closest to `target` in log distance; ties go to the smaller.
fn nearest_divisor(n: usize, target: f64) -> usize {
    let mut best = (f64::INFINITY, 1);
    for d in divisors(n) {
        let dist = (d as f64 / target).ln().abs();
        if dist < best.0 - TIE_TOL {
            best = (dist, d);
        }
    }
    best.1
}

fn log_err(v: usize, target: f64) -> f64 {
    (v as f64 / target).ln().abs()
}

/// Nearest feasible normal-form lattice: log-nearest divisors for the steps
/// (stepping one down while the redundancy would fall below 1), then the
/// nearest admissible shear. Ties go to the smaller value.
pub fn rationalize_lattice(m: &GeneratorMatrix) -> Result<Lattice> {
    if !(m.m11 > 0.0 && m.m22 > 0.0) || !m.m21.is_finite() {
        return Err(GaborError::invalid("generator needs a positive finite diagonal"));
    }
    let n = m.n;
    let divs = divisors(n);
    let prev = |d: usize| divs.iter().rev().copied().find(|&x| x < d);
    let mut a = nearest_divisor(n, m.m11);
    let mut b = nearest_divisor(n, m.m22);
    while a * b > n {
        let down_a = prev(a).map(|x| log_err(x, m.m11) + log_err(b, m.m22));
        let down_b = prev(b).map(|x| log_err(a, m.m11) + log_err(x, m.m22));
        match (down_a, down_b) {
            (Some(ea), Some(eb)) if eb < ea - TIE_TOL => b = prev(b).unwrap(),
            (Some(_), _) => a = prev(a).unwrap(),
            (None, Some(_)) => b = prev(b).unwrap(),
            (None, None) => unreachable!("1 x 1 always fits"),
        }
    }
    let unit = Lattice::shear_unit(a, b, n) as f64;
    let k = m.m21 / unit;
    let lower = k.floor();
    let k = if k - lower <= 0.5 + TIE_TOL { lower } else { lower + 1.0 };
    Lattice::from_shear(a, b, (k * unit) as i64, n)
}

/// Grid point maximizing `|<phi_{sigma,s}, g>|`; ties go to the smaller
/// `sigma`, then the smaller `|s|`.
pub fn fit_chirped_gaussian(g: &Signal, sigma_grid: &[f64], s_grid: &[f64]) -> Result<ChirpedGaussianParams> {
    if sigma_grid.is_empty() || s_grid.is_empty() {
        return Err(GaborError::invalid("parameter grids must be non-empty"));
    }
    if !(g.norm() > 0.0) {
        return Err(GaborError::invalid("window must be non-zero"));
    }
    let n = g.len();
    let ns = s_grid.len();
    let scores = exec::map_indexed(sigma_grid.len() * ns, |i| -> Result<(ChirpedGaussianParams, f64)> {
        let p = ChirpedGaussianParams::new(sigma_grid[i / ns], s_grid[i % ns])?;
        let overlap: Complex64 = gaussian_window(p, n)?.inner(g);
        Ok((p, overlap.norm()))
    });
    let mut best: Option<(ChirpedGaussianParams, f64)> = None;
    for r in scores {
        let (p, v) = r?;
        let replace = match best {
            None => true,
            Some((bp, bv)) => {
                let tol = TIE_TOL * bv.max(1e-300);
                if v > bv + tol {
                    true
                } else if v >= bv - tol {
                    (p.sigma, p.s.abs()) < (bp.sigma, bp.s.abs())
                } else {
                    false
                }
            }
        };
        if replace {
            best = Some((p, v));
        }
    }
    Ok(best.expect("non-empty grid").0)
}

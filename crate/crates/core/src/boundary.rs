//! Check that far-shifted Gabor coefficients of two signals concentrated near
//! the middle of the period are bounded by their tail amplitude.

use serde::Serialize;

use crate::dsp::{check_len, Signal};
use crate::error::{GaborError, Result};
use crate::gabor::dgt;
use crate::lattice::Lattice;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryReport {
    /// `eps sqrt(N) (|f| + |g|)`.
    pub bound: f64,
    /// Largest `|<f, M_xi T_x g>|` over time shifts outside `[-N/4, N/4]`.
    pub max_coefficient: f64,
    /// `max_coefficient / bound`; the check passes when it is at most 1.
    pub max_ratio: f64,
    pub passed: bool,
}

fn in_central_band(t: usize, n: usize) -> bool {
    let lo = n / 2 - n / 8;
    let hi = n / 2 + n / 8;
    (lo..=hi).contains(&t)
}

/// Largest modulus of `f` and `g` outside the central band
/// `[N/2 - N/8, N/2 + N/8]`, the smallest admissible `eps`.
pub fn tail_amplitude(f: &Signal, g: &Signal) -> f64 {
    let n = f.len();
    (0..n)
        .filter(|&t| !in_central_band(t, n))
        .map(|t| f[t].norm().max(g[t].norm()))
        .fold(0.0, f64::max)
}

pub fn boundary_energy_check(f: &Signal, g: &Signal, eps: f64) -> Result<BoundaryReport> {
    check_len(f.len(), g.len())?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(GaborError::invalid("eps must be positive and finite"));
    }
    let n = f.len();
    for (name, sig) in [("f", f), ("g", g)] {
        if let Some(t) = (0..n).find(|&t| !in_central_band(t, n) && sig[t].norm() > eps) {
            return Err(GaborError::Precondition(format!(
                "|{name}({t})| = {} exceeds eps = {eps} outside the central band",
                sig[t].norm()
            )));
        }
    }
    let bound = eps * (n as f64).sqrt() * (f.norm() + g.norm());
    let c = dgt(f, g, &Lattice::full(n)?)?;
    let max_coefficient = (0..n)
        .filter(|&x| x.min(n - x) * 4 > n)
        .flat_map(|x| c.column(x).iter().map(|z| z.norm()))
        .fold(0.0, f64::max);
    let max_ratio = max_coefficient / bound;
    Ok(BoundaryReport {
        bound,
        max_coefficient,
        max_ratio,
        passed: max_ratio <= 1.0,
    })
}

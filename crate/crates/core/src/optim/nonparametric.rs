use num_complex::Complex64;

use crate::dsp::{gaussian_window, tf_center, ChirpedGaussianParams, Signal};
use crate::error::{GaborError, Result};
use crate::lattice::Lattice;

use super::gradient::{lp_objective, lp_objective_and_grad};
use super::{at_iteration, OptimConfig, OptimTrace, Termination};

const MAX_HALVINGS: usize = 60;

/// Default starting window: a broad Gaussian.
///
/// A constant window is a poor start: it is invariant under every lattice
/// translation, so the ascent cannot pick a location.
pub fn default_start(n: usize) -> Result<Signal> {
    gaussian_window(ChirpedGaussianParams { sigma: 8.0, s: 0.0 }, n)
}

fn check_signal(f: &Signal, lattice: &Lattice) -> Result<()> {
    crate::dsp::check_len(lattice.len(), f.len())?;
    if !(f.norm() > 0.0) || !f.is_finite() {
        return Err(GaborError::invalid("signal must be non-zero and finite"));
    }
    Ok(())
}

pub fn optimize_nonparametric(f: &Signal, lattice: &Lattice, cfg: &OptimConfig) -> Result<(Signal, OptimTrace)> {
    optimize_nonparametric_from(f, lattice, cfg, &default_start(lattice.len())?)
}

/// Projected gradient ascent on the unit sphere,
/// `g <- (g + gamma grad J(g)) / |g + gamma grad J(g)|`, halving `gamma`
/// until the objective does not decrease. Every returned window has unit norm.
pub fn optimize_nonparametric_from(
    f: &Signal,
    lattice: &Lattice,
    cfg: &OptimConfig,
    start: &Signal,
) -> Result<(Signal, OptimTrace)> {
    cfg.validate()?;
    check_signal(f, lattice)?;
    crate::dsp::check_len(lattice.len(), start.len())?;
    let p = cfg.p;
    let mut g = start.normalized()?;
    if cfg.recenter {
        g = tf_center(&g)?;
    }
    let mut trace = OptimTrace::new();
    let (mut value, mut grad) = lp_objective_and_grad(&g, f, lattice, p)?;
    if !value.is_finite() {
        return Err(GaborError::Divergence { iteration: 0 });
    }
    trace.push(0, value, 0.0, None);

    for iter in 1..=cfg.max_iters {
        let mut gamma = cfg.step;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut cand = g.add_scaled(Complex64::new(gamma, 0.0), &grad)?.normalized()?;
            if cfg.recenter {
                cand = tf_center(&cand)?;
            }
            let v = lp_objective(&cand, f, lattice, p).map_err(|e| at_iteration(e, iter))?;
            if !v.is_finite() || !cand.is_finite() {
                return Err(GaborError::Divergence { iteration: iter });
            }
            if v >= value {
                accepted = Some((cand, v));
                break;
            }
            gamma *= 0.5;
        }
        let Some((cand, v)) = accepted else {
            trace.termination = Termination::Stationary;
            break;
        };
        let change = (v - value).abs() / value.abs().max(f64::MIN_POSITIVE);
        g = cand;
        value = v;
        trace.push(iter, value, gamma, None);
        if change < cfg.tol {
            trace.termination = Termination::Converged;
            break;
        }
        grad = lp_objective_and_grad(&g, f, lattice, p).map_err(|e| at_iteration(e, iter))?.1;
    }
    if !cfg.recenter {
        g = tf_center(&g)?;
    }
    Ok((g, trace))
}

use num_complex::Complex64;

use crate::dsp::{check_len, Signal};
use crate::error::{GaborError, Result};
use crate::lattice::Lattice;

use super::gradient::lp_objective_and_grad;
use super::{at_iteration, OptimConfig, OptimTrace, Termination};

const MAX_HALVINGS: usize = 60;

/// Ascent on `Phi(g) = J(g) - lambda |h - g|^2` starting from `h`.
pub fn optimize_regularized(
    f: &Signal,
    lattice: &Lattice,
    h: &Signal,
    cfg: &OptimConfig,
) -> Result<(Signal, OptimTrace)> {
    optimize_regularized_from(f, lattice, h, cfg, h)
}

/// `g <- (1 - gamma lambda) g + gamma lambda h + gamma grad J(g)`, halving
/// `gamma` until `Phi` does not decrease. Iterates are not normalized.
pub fn optimize_regularized_from(
    f: &Signal,
    lattice: &Lattice,
    h: &Signal,
    cfg: &OptimConfig,
    start: &Signal,
) -> Result<(Signal, OptimTrace)> {
    cfg.validate()?;
    check_len(lattice.len(), f.len())?;
    check_len(lattice.len(), h.len())?;
    check_len(lattice.len(), start.len())?;
    if !(cfg.lambda > 0.0) {
        return Err(GaborError::Precondition("lambda must be positive".into()));
    }
    if cfg.step * cfg.lambda >= 1.0 {
        return Err(GaborError::Precondition(format!(
            "step * lambda = {} must be below 1",
            cfg.step * cfg.lambda
        )));
    }
    if (h.norm() - 1.0).abs() > 1e-9 {
        return Err(GaborError::Precondition(format!(
            "reference window must have unit norm, got {}",
            h.norm()
        )));
    }
    let lambda = cfg.lambda;
    let phi_of = |g: &Signal| -> Result<(f64, Signal)> {
        let (j, grad) = lp_objective_and_grad(g, f, lattice, cfg.p)?;
        Ok((j - lambda * h.distance(g).powi(2), grad))
    };

    let mut g = start.clone();
    let (mut value, mut grad) = phi_of(&g)?;
    if !value.is_finite() {
        return Err(GaborError::Divergence { iteration: 0 });
    }
    let mut trace = OptimTrace::new();
    trace.push(0, value, 0.0, None);

    for iter in 1..=cfg.max_iters {
        // ascent direction grad J + lambda (h - g)
        let dir = grad.add_scaled(Complex64::new(lambda, 0.0), &h.add_scaled(Complex64::new(-1.0, 0.0), &g)?)?;
        let mut gamma = cfg.step;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand = g.add_scaled(Complex64::new(gamma, 0.0), &dir)?;
            let (v, cg) = phi_of(&cand).map_err(|e| at_iteration(e, iter))?;
            if !v.is_finite() || !cand.is_finite() {
                return Err(GaborError::Divergence { iteration: iter });
            }
            if v >= value {
                accepted = Some((cand, v, cg));
                break;
            }
            gamma *= 0.5;
        }
        let Some((cand, v, cg)) = accepted else {
            trace.termination = Termination::Stationary;
            break;
        };
        let change = (v - value).abs() / value.abs().max(1.0);
        g = cand;
        value = v;
        grad = cg;
        trace.push(iter, value, gamma, None);
        if change < cfg.tol {
            trace.termination = Termination::Converged;
            break;
        }
    }
    Ok((g, trace))
}

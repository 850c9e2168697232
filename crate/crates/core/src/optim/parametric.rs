//! BFGS over the chirped Gaussian family `(sigma, s)` with a weak Wolfe
//! bisection line search and box bounds on `sigma`.

use crate::dsp::{ChirpedGaussianParams, Signal};
use crate::error::{GaborError, Result};
use crate::exec;
use crate::lattice::Lattice;

use super::gradient::parametric_objective_and_grad;
use super::{at_iteration, OptimConfig, OptimTrace, Termination};

const C1: f64 = 1e-4;
const C2: f64 = 0.9;
const MAX_LINE_SEARCH: usize = 50;
const ROUNDOFF_SLOPE: f64 = 1e3;

/// Widths between one sample and the whole period.
pub fn default_sigma_bounds(n: usize) -> (f64, f64) {
    (1.0 / n as f64, n as f64)
}

type Vec2 = [f64; 2];
type Mat2 = [[f64; 2]; 2];

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

/// Minimization view of `-J` restricted to the box.
struct Problem<'a> {
    f: &'a Signal,
    lattice: &'a Lattice,
    p: f64,
    lo: f64,
    hi: f64,
}

impl Problem<'_> {
    fn clamp(&self, x: Vec2) -> Vec2 {
        [x[0].clamp(self.lo, self.hi), x[1]]
    }

    /// `(-J, -grad J)`.
    fn eval(&self, x: Vec2) -> Result<(f64, Vec2)> {
        let params = ChirpedGaussianParams { sigma: x[0], s: x[1] };
        let (j, g) = parametric_objective_and_grad(params, self.f, self.lattice, self.p)?;
        Ok((-j, [-g[0], -g[1]]))
    }

    /// Gradient with components that point out of an active bound removed.
    fn projected(&self, x: Vec2, g: Vec2) -> Vec2 {
        let blocked = (x[0] <= self.lo && g[0] > 0.0) || (x[0] >= self.hi && g[0] < 0.0);
        [if blocked { 0.0 } else { g[0] }, g[1]]
    }
}

pub fn optimize_parametric(
    f: &Signal,
    lattice: &Lattice,
    cfg: &OptimConfig,
    start: ChirpedGaussianParams,
) -> Result<(ChirpedGaussianParams, OptimTrace)> {
    cfg.validate()?;
    start.validate()?;
    crate::dsp::check_len(lattice.len(), f.len())?;
    if !(f.norm() > 0.0) {
        return Err(GaborError::invalid("signal must be non-zero"));
    }
    let (lo, hi) = cfg.sigma_bounds.unwrap_or_else(|| default_sigma_bounds(lattice.len()));
    if cfg.sigma_bounds.is_some() && !(lo..=hi).contains(&start.sigma) {
        return Err(GaborError::invalid(format!(
            "start sigma {} outside bounds [{lo}, {hi}]",
            start.sigma
        )));
    }
    let prob = Problem { f, lattice, p: cfg.p, lo, hi };

    let mut x = prob.clamp([start.sigma, start.s]);
    let (mut fx, mut gx) = prob.eval(x)?;
    let mut h = IDENTITY;
    let mut scaled = false;
    let mut trace = OptimTrace::new();
    trace.push(0, -fx, 0.0, Some((x[0], x[1])));

    for iter in 1..=cfg.max_iters {
        let pg = prob.projected(x, gx);
        if dot(pg, pg).sqrt() < cfg.tol * (1.0 + fx.abs()) {
            trace.termination = Termination::Converged;
            break;
        }
        let mut d = mat_vec(&h, pg).map(|v| -v);
        if dot(d, pg) >= 0.0 {
            h = IDENTITY;
            d = [-pg[0], -pg[1]];
        }
        if pg[0] == 0.0 {
            d[0] = 0.0;
        }
        let slope0 = dot(gx, d);

        // weak Wolfe bisection
        let (mut a_lo, mut a_hi, mut alpha) = (0.0, f64::INFINITY, 1.0);
        let mut accepted = None;
        for _ in 0..MAX_LINE_SEARCH {
            let xn = prob.clamp([x[0] + alpha * d[0], x[1] + alpha * d[1]]);
            let (fn_, gn) = prob.eval(xn).map_err(|e| at_iteration(e, iter))?;
            if !fn_.is_finite() {
                return Err(GaborError::Divergence { iteration: iter });
            }
            if fn_ > fx + C1 * alpha * slope0 {
                a_hi = alpha;
            } else if dot(gn, d) < C2 * slope0 && xn[0] == x[0] + alpha * d[0] {
                a_lo = alpha;
            } else {
                accepted = Some((xn, fn_, gn));
                break;
            }
            alpha = if a_hi.is_finite() { 0.5 * (a_lo + a_hi) } else { 2.0 * a_lo };
        }
        let Some((xn, fn_, gn)) = accepted else {
            // a full step would change J by less than its own rounding error
            if slope0.abs() <= ROUNDOFF_SLOPE * f64::EPSILON * (1.0 + fx.abs()) {
                trace.termination = Termination::Stationary;
                break;
            }
            return Err(GaborError::Stall {
                iteration: iter,
                trace: Box::new(trace),
            });
        };

        let s = [xn[0] - x[0], xn[1] - x[1]];
        let y = [gn[0] - gx[0], gn[1] - gx[1]];
        let sy = dot(s, y);
        if sy > 1e-300 {
            if !scaled {
                let gamma = sy / dot(y, y);
                h = [[gamma, 0.0], [0.0, gamma]];
                scaled = true;
            }
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            let rho = 1.0 / sy;
            let hy = mat_vec(&h, y);
            let yhy = dot(y, hy);
            let mut next = h;
            for i in 0..2 {
                for j in 0..2 {
                    next[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            h = next;
        }
        x = xn;
        fx = fn_;
        gx = gn;
        trace.push(iter, -fx, alpha, Some((x[0], x[1])));
    }
    Ok((ChirpedGaussianParams { sigma: x[0], s: x[1] }, trace))
}

/// Runs BFGS from each start (in parallel) and keeps the highest objective;
/// ties go to the earliest start. Fails only if every run fails.
pub fn optimize_parametric_multistart(
    f: &Signal,
    lattice: &Lattice,
    cfg: &OptimConfig,
    starts: &[ChirpedGaussianParams],
) -> Result<(ChirpedGaussianParams, OptimTrace)> {
    if starts.is_empty() {
        return Err(GaborError::invalid("at least one start is required"));
    }
    let runs = exec::map_indexed(starts.len(), |i| optimize_parametric(f, lattice, cfg, starts[i]));
    let mut best: Option<(ChirpedGaussianParams, OptimTrace)> = None;
    let mut first_err = None;
    for r in runs {
        match r {
            Ok((p, t)) => {
                let better = match &best {
                    None => true,
                    Some((_, bt)) => t.final_objective() > bt.final_objective(),
                };
                if better {
                    best = Some((p, t));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.expect("non-empty starts"))
}

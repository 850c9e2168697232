//! Window optimization for sparsity of the Gabor coefficients of a pattern.
//!
//! All optimizers maximize `J(g) = sum |<f, M_xi T_x g>|^p` (`p > 2`) over
//! windows `g`, either freely on the unit sphere, over the chirped Gaussian
//! family, or with a quadratic pull towards a reference window.

mod gradient;
mod metrics;
mod nonparametric;
mod parametric;
mod regularized;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};

pub use gradient::{grad_lp_window, grad_parametric, lp_objective, lp_objective_and_grad, parametric_objective_and_grad};
pub use metrics::{entropy_concentration, lp_concentration};
pub use nonparametric::{default_start, optimize_nonparametric, optimize_nonparametric_from};
pub use parametric::{default_sigma_bounds, optimize_parametric, optimize_parametric_multistart};
pub use regularized::{optimize_regularized, optimize_regularized_from};

/// Parameters shared by the window optimizers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimConfig {
    /// Sparsity exponent, finite and greater than 2.
    pub p: f64,
    /// Initial gradient step; halved until the objective does not decrease.
    pub step: f64,
    /// Weight of the pull towards the reference window (regularized ascent).
    pub lambda: f64,
    pub max_iters: usize,
    /// Relative objective change (ascent methods) or relative projected
    /// gradient norm (BFGS) below which iteration stops.
    pub tol: f64,
    /// Admissible range of the Gaussian width for the parametric search.
    pub sigma_bounds: Option<(f64, f64)>,
    /// TF-center every iterate instead of only the final window.
    pub recenter: bool,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            p: 4.0,
            step: 1.0,
            lambda: 0.0,
            max_iters: 200,
            tol: 1e-8,
            sigma_bounds: None,
            recenter: false,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 2.0) || !self.p.is_finite() {
            return Err(GaborError::invalid(format!("p must be finite and > 2, got {}", self.p)));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(GaborError::invalid(format!("step must be positive, got {}", self.step)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(GaborError::invalid(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if self.max_iters == 0 {
            return Err(GaborError::invalid("max_iters must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(GaborError::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some((lo, hi)) = self.sigma_bounds {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(GaborError::invalid(format!("invalid sigma bounds ({lo}, {hi})")));
            }
        }
        Ok(())
    }
}

/// Attaches the iteration index to a divergence raised by an evaluation.
pub(crate) fn at_iteration(e: GaborError, iteration: usize) -> GaborError {
    match e {
        GaborError::Divergence { .. } => GaborError::Divergence { iteration },
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Stopping tolerance reached.
    Converged,
    /// No ascent direction left: every backtracked step failed to increase
    /// the objective.
    Stationary,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub objective: f64,
    pub step: f64,
    pub sigma: Option<f64>,
    pub s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimTrace {
    pub records: Vec<TraceRecord>,
    pub termination: Termination,
}

impl OptimTrace {
    pub(crate) fn new() -> Self {
        OptimTrace {
            records: Vec::new(),
            termination: Termination::MaxIterations,
        }
    }

    pub(crate) fn push(&mut self, iter: usize, objective: f64, step: f64, params: Option<(f64, f64)>) {
        self.records.push(TraceRecord {
            iter,
            objective,
            step,
            sigma: params.map(|p| p.0),
            s: params.map(|p| p.1),
        });
    }

    /// Number of iterations performed (records after the initial one).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.records.last().map(|r| r.objective)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    /// CSV with columns `iter, objective, step, sigma, s`; absent parameters
    /// are left empty.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iter", "objective", "step", "sigma", "s"])?;
        for r in &self.records {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
            out.write_record([
                r.iter.to_string(),
                format!("{:?}", r.objective),
                format!("{:?}", r.step),
                opt(r.sigma),
                opt(r.s),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

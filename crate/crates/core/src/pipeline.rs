//! Pattern extraction, band reduction, the alternating window/lattice
//! optimization and per-column maxima of the coefficients.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::adapt::{adapted_lattice_real, fit_chirped_gaussian, rationalize_lattice};
use crate::dsp::{check_len, dft, gaussian_window, tf_center, ChirpedGaussianParams, Direction, Signal, MIN_LEN};
use crate::error::{GaborError, Result};
use crate::frame::dual_window;
use crate::gabor::{dgt, idgt, GaborCoefficients, TfMask};
use crate::lattice::Lattice;
use crate::optim::{
    default_start, lp_objective, optimize_nonparametric_from, optimize_parametric, OptimConfig,
};

/// Rectangle of the time-frequency plane. The frequency interval wraps
/// around when `f_min > f_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TfRegion {
    pub t_min: usize,
    pub t_max: usize,
    pub f_min: usize,
    pub f_max: usize,
}

impl TfRegion {
    pub fn new(t_min: usize, t_max: usize, f_min: usize, f_max: usize, n: usize) -> Result<Self> {
        if t_min > t_max || t_max >= n || f_min >= n || f_max >= n {
            return Err(GaborError::invalid(format!(
                "region [{t_min}, {t_max}] x [{f_min}, {f_max}] does not fit N = {n}"
            )));
        }
        Ok(TfRegion { t_min, t_max, f_min, f_max })
    }

    pub fn full(n: usize) -> Self {
        TfRegion { t_min: 0, t_max: n - 1, f_min: 0, f_max: n - 1 }
    }

    pub fn contains(&self, x: usize, xi: usize) -> bool {
        let in_freq = if self.f_min <= self.f_max {
            (self.f_min..=self.f_max).contains(&xi)
        } else {
            xi >= self.f_min || xi <= self.f_max
        };
        (self.t_min..=self.t_max).contains(&x) && in_freq
    }

    /// 0/1 mask of the lattice points inside the region.
    pub fn mask(&self, lattice: &Lattice) -> TfMask {
        TfMask::from_fn(lattice, |_, _, loc| if self.contains(loc.x, loc.xi) { 1.0 } else { 0.0 })
            .expect("0/1 weights are valid")
    }
}

/// Reconstruction from the coefficients inside `region`, using the canonical
/// dual of `g0`. The result is not centred.
pub fn mask_region(f: &Signal, g0: &Signal, lattice: &Lattice, region: &TfRegion) -> Result<Signal> {
    let gd = dual_window(g0, lattice)?;
    let c = dgt(f, g0, lattice)?.masked(&region.mask(lattice))?;
    idgt(&c, &gd)
}

/// [`mask_region`] followed by TF centering. An empty selection yields the
/// zero signal.
pub fn extract_pattern(f: &Signal, g0: &Signal, lattice: &Lattice, region: &TfRegion) -> Result<Signal> {
    let h = mask_region(f, g0, lattice, region)?;
    if h.norm() == 0.0 {
        return Ok(h);
    }
    tf_center(&h)
}

/// Largest out-of-band energy share accepted by [`reduce`].
pub const MAX_OUT_OF_BAND: f64 = 0.01;

/// Keeps the `N/factor` central DFT bins `[-N/(2 factor), N/(2 factor))` and
/// returns the corresponding length `N/factor` signal. The DFTs are unitary,
/// so band-limited signals keep their norm and inner products.
pub fn reduce(h: &Signal, factor: usize) -> Result<Signal> {
    let n = h.len();
    if factor == 0 || !n.is_multiple_of(factor) {
        return Err(GaborError::invalid(format!("factor {factor} does not divide N = {n}")));
    }
    let len = n / factor;
    if len < MIN_LEN {
        return Err(GaborError::TooShort(len));
    }
    if factor == 1 {
        return Ok(h.clone());
    }
    let spec = dft(h, Direction::Forward);
    let total = spec.norm_sqr();
    if !(total > 0.0) {
        return Err(GaborError::invalid("cannot reduce a zero signal"));
    }
    let lo = -((len / 2) as i64);
    let mut kept = vec![Complex64::new(0.0, 0.0); len];
    let mut kept_energy = 0.0;
    for j in 0..len as i64 {
        let k = lo + j;
        let z = spec[k.rem_euclid(n as i64) as usize];
        kept_energy += z.norm_sqr();
        kept[k.rem_euclid(len as i64) as usize] = z;
    }
    let outside = (total - kept_energy).max(0.0) / total;
    if outside > MAX_OUT_OF_BAND {
        return Err(GaborError::OutOfBand { percent: 100.0 * outside });
    }
    Ok(dft(&Signal::new(kept)?, Direction::Inverse))
}

/// Largest coefficient modulus of each lattice column.
pub fn max_track(c: &GaborCoefficients) -> Vec<f64> {
    (0..c.cols())
        .map(|col| c.column(col).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowMethod {
    Parametric,
    Nonparametric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlternateConfig {
    pub max_rounds: usize,
    /// Stop as soon as a lattice repeats.
    pub lattice_fixpoint: bool,
    pub inner: OptimConfig,
    /// Starting lattice; defaults to the adapted lattice of the round Gaussian.
    pub initial_lattice: Option<Lattice>,
    pub redundancy: f64,
    pub method: WindowMethod,
    /// First parametric start; later rounds start from the previous optimum.
    pub start: ChirpedGaussianParams,
}

impl Default for AlternateConfig {
    fn default() -> Self {
        AlternateConfig {
            max_rounds: 10,
            lattice_fixpoint: true,
            inner: OptimConfig::default(),
            initial_lattice: None,
            redundancy: 4.0,
            method: WindowMethod::Parametric,
            start: ChirpedGaussianParams::round(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub sigma: f64,
    pub s: f64,
    /// Lattice produced by this round.
    pub lattice: Lattice,
    /// Objective of the optimized window on the lattice used in this round.
    pub objective: f64,
    pub lattice_repeated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlternateOutcome {
    /// The adapted lattice equals the lattice it was computed on.
    Fixpoint,
    /// The lattices visited in order since the first repetition.
    Oscillation { cycle: Vec<Lattice> },
    MaxRounds,
}

#[derive(Debug, Clone)]
pub struct AlternateResult {
    pub window: Signal,
    pub params: ChirpedGaussianParams,
    pub lattice: Lattice,
    pub rounds: Vec<RoundRecord>,
    pub outcome: AlternateOutcome,
}

impl AlternateResult {
    /// CSV with columns `round, sigma, s, a, b, shear, objective, lattice_repeated`.
    pub fn write_rounds_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["round", "sigma", "s", "a", "b", "shear", "objective", "lattice_repeated"])?;
        for r in &self.rounds {
            out.write_record([
                r.round.to_string(),
                format!("{:?}", r.sigma),
                format!("{:?}", r.s),
                r.lattice.a().to_string(),
                r.lattice.b().to_string(),
                r.lattice.shear().to_string(),
                format!("{:?}", r.objective),
                r.lattice_repeated.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Grids for fitting arbitrary windows: widths geometric over `[1/N, N]` with
/// 8 steps per octave, chirp rates `-2..=2` in steps of 1/32.
pub fn fit_grids(n: usize) -> (Vec<f64>, Vec<f64>) {
    let lo = (1.0 / n as f64).log2();
    let hi = (n as f64).log2();
    let steps = ((hi - lo) * 8.0).round() as usize;
    let sigma = (0..=steps).map(|k| 2f64.powf(lo + (hi - lo) * k as f64 / steps as f64)).collect();
    let s = (-64..=64).map(|k| k as f64 / 32.0).collect();
    (sigma, s)
}

/// Alternates window optimization on the current lattice with adapting the
/// lattice to the optimized window, until the lattice repeats or
/// `max_rounds` is reached.
pub fn alternate_optimize(f: &Signal, cfg: &AlternateConfig) -> Result<AlternateResult> {
    if cfg.max_rounds == 0 {
        return Err(GaborError::invalid("max_rounds must be at least 1"));
    }
    cfg.inner.validate()?;
    let n = f.len();
    let adapted = |p: ChirpedGaussianParams| -> Result<Lattice> {
        rationalize_lattice(&adapted_lattice_real(p, n, cfg.redundancy)?)
    };
    let mut lattice = match cfg.initial_lattice {
        Some(l) => {
            check_len(n, l.len())?;
            l
        }
        None => adapted(ChirpedGaussianParams::round())?,
    };
    let mut seen = vec![lattice];
    let mut rounds = Vec::new();
    let mut params = cfg.start;
    let mut window = match cfg.method {
        WindowMethod::Parametric => gaussian_window(params, n)?,
        WindowMethod::Nonparametric => default_start(n)?,
    };
    let mut outcome = AlternateOutcome::MaxRounds;

    for round in 1..=cfg.max_rounds {
        let wrap = |e: GaborError| GaborError::Round { round, source: Box::new(e) };
        match cfg.method {
            WindowMethod::Parametric => {
                let (p, _) = optimize_parametric(f, &lattice, &cfg.inner, params).map_err(wrap)?;
                params = p;
                window = gaussian_window(p, n).map_err(wrap)?;
            }
            WindowMethod::Nonparametric => {
                let (g, _) = optimize_nonparametric_from(f, &lattice, &cfg.inner, &window).map_err(wrap)?;
                let (sg, ss) = fit_grids(n);
                params = fit_chirped_gaussian(&g, &sg, &ss).map_err(wrap)?;
                window = g;
            }
        }
        let objective = lp_objective(&window, f, &lattice, cfg.inner.p).map_err(wrap)?;
        let next = adapted(params).map_err(wrap)?;
        let first_seen = seen.iter().position(|l| *l == next);
        rounds.push(RoundRecord {
            round,
            sigma: params.sigma,
            s: params.s,
            lattice: next,
            objective,
            lattice_repeated: first_seen.is_some(),
        });
        if next == lattice {
            outcome = AlternateOutcome::Fixpoint;
            break;
        }
        if let (true, Some(pos)) = (cfg.lattice_fixpoint, first_seen) {
            outcome = AlternateOutcome::Oscillation { cycle: seen[pos..].to_vec() };
            lattice = next;
            break;
        }
        seen.push(next);
        lattice = next;
    }
    Ok(AlternateResult {
        window,
        params,
        lattice,
        rounds,
        outcome,
    })
}

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use gabopt::adapt::{adapted_lattice_real, fit_chirped_gaussian, rationalize_lattice};
use gabopt::boundary::{boundary_energy_check, tail_amplitude};
use gabopt::dsp::{gaussian_window, ChirpedGaussianParams, Signal};
use gabopt::frame::frame_bounds;
use gabopt::gabor::dgt;
use gabopt::generate::SignalSpec;
use gabopt::io::{
    load_config, load_json, load_signal, read_coefficients_csv, save_json, save_signal, write_coefficients_csv,
    write_json, write_signal_csv, CoefficientsHeader,
};
use gabopt::lattice::Lattice;
use gabopt::optim::{
    entropy_concentration, lp_concentration, optimize_nonparametric, optimize_nonparametric_from,
    optimize_parametric_multistart, optimize_regularized_from, OptimConfig, OptimTrace,
};
use gabopt::pipeline::{alternate_optimize, extract_pattern, fit_grids, mask_region, max_track, reduce, AlternateConfig, TfRegion};
use gabopt::render::{render_spectrogram, RenderSpec};
use gabopt::{GaborError, Result};
use serde_json::json;

use crate::args::{Command, Common, GenArgs, Method, OptimizeArgs, WindowArgs};

const DEFAULT_REDUNDANCY: f64 = 4.0;

fn invalid(msg: impl Into<String>) -> GaborError {
    GaborError::InvalidParameter(msg.into())
}

/// Writes to `--out` when given, standard output otherwise.
fn with_output(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn load_input(path: &Path, common: &Common) -> Result<(Signal, Option<u32>)> {
    let (f, rate) = load_signal(path)?;
    if let Some(n) = common.n {
        if n != f.len() {
            return Err(GaborError::Dimension { expected: n, found: f.len() });
        }
    }
    Ok((f, rate))
}

fn window_params(w: &WindowArgs) -> Result<ChirpedGaussianParams> {
    ChirpedGaussianParams::new(w.sigma, w.chirp)
}

fn load_window(w: &WindowArgs, n: usize) -> Result<Signal> {
    match &w.window {
        Some(path) => {
            let (g, _) = load_signal(path)?;
            if g.len() != n {
                return Err(GaborError::Dimension { expected: n, found: g.len() });
            }
            Ok(g)
        }
        None => gaussian_window(window_params(w)?, n),
    }
}

/// `--lattice` if given, else the lattice adapted to the Gaussian window.
fn lattice_for(common: &Common, n: usize, w: Option<&WindowArgs>) -> Result<Lattice> {
    if let Some((a, b, s)) = common.lattice {
        return Lattice::from_shear(a, b, s as i64, n);
    }
    let params = match w {
        Some(w) if w.window.is_some() => return Err(invalid("--lattice is required with --window")),
        Some(w) => window_params(w)?,
        None => ChirpedGaussianParams::round(),
    };
    let r = common.redundancy.unwrap_or(DEFAULT_REDUNDANCY);
    rationalize_lattice(&adapted_lattice_real(params, n, r)?)
}

fn region(common: &Common, n: usize) -> Result<TfRegion> {
    let [t0, t1, f0, f1] = common.region.ok_or_else(|| invalid("--region is required"))?;
    TfRegion::new(t0, t1, f0, f1, n)
}

fn write_trace(trace: &OptimTrace, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => trace.write_csv(BufWriter::new(File::create(p)?)),
        None => Ok(()),
    }
}

fn header_path(out: &Path) -> Result<PathBuf> {
    if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        return Err(invalid("coefficient output must not use the .json extension (reserved for the header)"));
    }
    Ok(out.with_extension("json"))
}

pub fn run(common: &Common, command: &Command) -> Result<()> {
    let out = common.out.as_deref();
    match command {
        Command::Gen(args) => gen(common, args),
        Command::Dgt { input, window } => {
            let (f, rate) = load_input(input, common)?;
            let g = load_window(window, f.len())?;
            let l = lattice_for(common, f.len(), Some(window))?;
            let c = dgt(&f, &g, &l)?;
            if let Some(path) = out {
                save_json(&CoefficientsHeader::new(&l, rate), &header_path(path)?)?;
            }
            with_output(out, |w| write_coefficients_csv(&c, w))
        }
        Command::OptimizeWindow(args) => optimize(common, args),
        Command::AdaptLattice { window } => {
            let (params, n) = match &window.window {
                Some(path) => {
                    let (g, _) = load_signal(path)?;
                    let n = g.len();
                    let (sg, ss) = fit_grids(n);
                    (fit_chirped_gaussian(&g, &sg, &ss)?, n)
                }
                None => (window_params(window)?, common.n.ok_or_else(|| invalid("--n is required"))?),
            };
            let r = common.redundancy.unwrap_or(DEFAULT_REDUNDANCY);
            let generator = adapted_lattice_real(params, n, r)?;
            let lattice = rationalize_lattice(&generator)?;
            let cond = frame_bounds(&gaussian_window(params, n)?, &lattice)?.condition();
            let report = json!({ "params": params, "generator": generator, "lattice": lattice, "condition": cond });
            with_output(out, |w| write_json(&report, w))
        }
        Command::Alternate { input, rounds, window_out } => {
            let (f, _) = load_input(input, common)?;
            let mut cfg: AlternateConfig = match &common.config {
                Some(path) => load_config(path)?,
                None => AlternateConfig::default(),
            };
            if let Some(r) = common.redundancy {
                cfg.redundancy = r;
            }
            if let Some(p) = common.p {
                cfg.inner.p = p;
            }
            if let Some((a, b, s)) = common.lattice {
                cfg.initial_lattice = Some(Lattice::from_shear(a, b, s as i64, f.len())?);
            }
            let res = alternate_optimize(&f, &cfg)?;
            if let Some(path) = rounds {
                res.write_rounds_csv(BufWriter::new(File::create(path)?))?;
            }
            if let Some(path) = window_out {
                save_signal(&res.window, path)?;
            }
            let report = json!({
                "params": res.params,
                "lattice": res.lattice,
                "outcome": res.outcome,
                "rounds": res.rounds,
            });
            with_output(out, |w| write_json(&report, w))
        }
        Command::Extract { input, window, reduce: factor, no_center } => {
            let (f, _) = load_input(input, common)?;
            let n = f.len();
            let g0 = load_window(window, n)?;
            let l = lattice_for(common, n, Some(window))?;
            let region = region(common, n)?;
            let mut h = if *no_center {
                mask_region(&f, &g0, &l, &region)?
            } else {
                extract_pattern(&f, &g0, &l, &region)?
            };
            if let Some(k) = factor {
                h = reduce(&h, *k)?;
            }
            with_output(out, |w| write_signal_csv(&h, w))
        }
        Command::Metrics { input, window, track } => {
            let (f, _) = load_input(input, common)?;
            let n = f.len();
            let g = load_window(window, n)?;
            let l = lattice_for(common, n, Some(window))?;
            let p = common.p.unwrap_or(OptimConfig::default().p);
            let c = dgt(&f, &g, &l)?;
            let m = max_track(&c);
            if let Some(path) = track {
                let mut w = BufWriter::new(File::create(path)?);
                writeln!(w, "col,x,m")?;
                for (col, v) in m.iter().enumerate() {
                    writeln!(w, "{col},{},{v:?}", col * l.a())?;
                }
                w.flush()?;
            }
            let boundary = boundary_energy_check(&f, &g, tail_amplitude(&f, &g)).ok();
            let report = json!({
                "lattice": l,
                "p": p,
                "lp": lp_concentration(&c, p),
                "entropy": entropy_concentration(&c),
                "energy": c.energy(),
                "max_m": m.iter().copied().fold(0.0, f64::max),
                "frame_bounds": frame_bounds(&g, &l)?,
                "boundary": boundary,
            });
            with_output(out, |w| write_json(&report, w))
        }
        Command::Render { input, coeffs, window, range_db } => {
            let path = out.ok_or_else(|| invalid("render needs --out"))?;
            let c = match (input, coeffs) {
                (Some(input), _) => {
                    let (f, _) = load_input(input, common)?;
                    let g = load_window(window, f.len())?;
                    dgt(&f, &g, &lattice_for(common, f.len(), Some(window))?)?
                }
                (None, Some(cpath)) => {
                    let l = match common.lattice {
                        Some((a, b, s)) => {
                            let n = common.n.ok_or_else(|| invalid("--n is required with --lattice here"))?;
                            Lattice::from_shear(a, b, s as i64, n)?
                        }
                        None => load_json::<CoefficientsHeader>(&cpath.with_extension("json"))?.lattice()?,
                    };
                    read_coefficients_csv(BufReader::new(File::open(cpath)?), &l)?
                }
                (None, None) => return Err(invalid("render needs --input or --coeffs")),
            };
            render_spectrogram(&c, &RenderSpec { range_db: *range_db })?.save(path)
        }
    }
}

fn gen(common: &Common, args: &GenArgs) -> Result<()> {
    let mut spec = match &common.config {
        Some(path) => load_config::<SignalSpec>(path)?,
        None => {
            let kind = args.kind.ok_or_else(|| invalid("--kind or --config is required"))?;
            SignalSpec {
                n: common.n.ok_or_else(|| invalid("--n is required"))?,
                kind: args.kind(kind),
                snr_db: args.snr_db,
                seed: 0,
            }
        }
    };
    if let Some(n) = common.n {
        spec.n = n;
    }
    if let Some(seed) = common.seed {
        spec.seed = seed;
    }
    if args.snr_db.is_some() {
        spec.snr_db = args.snr_db;
    }
    let f = spec.generate()?;
    with_output(common.out.as_deref(), |w| write_signal_csv(&f, w))
}

fn optimize(common: &Common, args: &OptimizeArgs) -> Result<()> {
    let (f, _) = load_input(&args.input, common)?;
    let n = f.len();
    let l = lattice_for(common, n, None)?;
    let mut cfg: OptimConfig = match &common.config {
        Some(path) => load_config(path)?,
        None => OptimConfig::default(),
    };
    if let Some(p) = common.p {
        cfg.p = p;
    }
    if let Some(v) = args.step {
        cfg.step = v;
    }
    if let Some(v) = args.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = args.max_iters {
        cfg.max_iters = v;
    }
    let start = args.start.as_ref().map(|p| load_signal(p).map(|(g, _)| g)).transpose()?;
    let (window, params, trace) = match args.method {
        Method::Nonparam => {
            let (g, t) = match &start {
                Some(s) => optimize_nonparametric_from(&f, &l, &cfg, s)?,
                None => optimize_nonparametric(&f, &l, &cfg)?,
            };
            (g, None, t)
        }
        Method::Param => {
            let starts = if args.from.is_empty() {
                vec![ChirpedGaussianParams::round()]
            } else {
                args.from.iter().map(|&(s, c)| ChirpedGaussianParams::new(s, c)).collect::<Result<_>>()?
            };
            let (p, t) = optimize_parametric_multistart(&f, &l, &cfg, &starts)?;
            (gaussian_window(p, n)?, Some(p), t)
        }
        Method::Reg => {
            let h = match &args.reference {
                Some(path) => load_signal(path)?.0,
                None => gaussian_window(ChirpedGaussianParams::round(), n)?,
            };
            let s = start.unwrap_or_else(|| h.clone());
            let (g, t) = optimize_regularized_from(&f, &l, &h, &cfg, &s)?;
            (g, None, t)
        }
    };
    write_trace(&trace, args.trace.as_ref())?;
    if let Some(path) = &common.out {
        save_signal(&window, path)?;
    }
    let report = json!({
        "lattice": l,
        "params": params,
        "objective": trace.final_objective(),
        "iterations": trace.iterations(),
        "termination": trace.termination,
    });
    write_json(&report, io::stdout().lock())
}

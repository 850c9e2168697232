//! End-to-end acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gabopt::adapt::{adapted_lattice_real, rationalize_lattice};
use gabopt::boundary::{boundary_energy_check, tail_amplitude};
use gabopt::dsp::{chirp, gaussian_window, tf_center, tf_shift, ChirpedGaussianParams, Signal, TfLocation};
use gabopt::frame::{dual_window, frame_bounds};
use gabopt::gabor::{dgt, idgt, GaborCoefficients};
use gabopt::generate::{SignalKind, SignalSpec};
use gabopt::lattice::Lattice;
use gabopt::optim::{
    grad_lp_window, grad_parametric, lp_objective, optimize_nonparametric, optimize_parametric,
    optimize_parametric_multistart, OptimConfig,
};
use gabopt::pipeline::{alternate_optimize, extract_pattern, max_track, AlternateConfig, AlternateOutcome, TfRegion};
use gabopt::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: gabopt::GaborError) -> String {
    e.to_string()
}

fn random_signal(n: usize, rng: &mut ChaCha8Rng) -> Signal {
    Signal::new((0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect())
        .unwrap()
}

fn gauss(sigma: f64, s: f64, n: usize) -> Signal {
    gaussian_window(ChirpedGaussianParams::new(sigma, s).unwrap(), n).unwrap()
}

fn gradient_oracle() -> Outcome {
    const H: f64 = 1e-6;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let n = 16;
    let l = Lattice::new(2, 4, 1, n).map_err(err)?;
    let mut worst_window: f64 = 0.0;
    for _ in 0..20 {
        let f = random_signal(n, &mut rng);
        let g = random_signal(n, &mut rng);
        let d = random_signal(n, &mut rng);
        let an = 2.0 * grad_lp_window(&g, &f, &l, 4.0).map_err(err)?.inner(&d).re;
        let j = |t: f64| lp_objective(&g.add_scaled(Complex64::new(t, 0.0), &d).unwrap(), &f, &l, 4.0).unwrap();
        let fd = (j(H) - j(-H)) / (2.0 * H);
        worst_window = worst_window.max((an - fd).abs() / an.abs());
    }

    let n = 128;
    let l = Lattice::from_shear(4, 4, 2, n).map_err(err)?;
    let mut worst_param: f64 = 0.0;
    for _ in 0..20 {
        let f = random_signal(n, &mut rng);
        let (sigma, s) = (rng.random_range(0.5..4.0), rng.random_range(-2.0..2.0));
        let (ds, dc) = grad_parametric(ChirpedGaussianParams::new(sigma, s).map_err(err)?, &f, &l, 4.0).map_err(err)?;
        let j = |sigma: f64, s: f64| lp_objective(&gauss(sigma, s, n), &f, &l, 4.0).unwrap();
        let fs = (j(sigma + H, s) - j(sigma - H, s)) / (2.0 * H);
        let fc = (j(sigma, s + H) - j(sigma, s - H)) / (2.0 * H);
        let scale = (ds * ds + dc * dc).sqrt();
        worst_param = worst_param.max(((ds - fs).powi(2) + (dc - fc).powi(2)).sqrt() / scale);
    }
    let elapsed = start.elapsed();
    ensure(worst_window < 1e-5, || format!("window gradient relative error {worst_window:e}"))?;
    ensure(worst_param < 1e-4, || format!("parametric gradient relative error {worst_param:e}"))?;
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("max rel. error {worst_window:.1e} (N=16), {worst_param:.1e} (N=128) in {elapsed:.2?}"))
}

fn shear_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for n in [8usize, 12, 16] {
        let f = random_signal(n, &mut rng);
        let g = random_signal(n, &mut rng);
        for s in [0i64, 1, 2] {
            let uf = chirp(&f, -s as f64);
            let ug = chirp(&g, -s as f64);
            for x in 0..n {
                let theta = PI * s as f64 * (x * x) as f64 * (n as f64 + 1.0) / n as f64;
                let phase = Complex64::from_polar(1.0, theta);
                for xi in 0..n {
                    let atom = tf_shift(&g, TfLocation::new(x as i64, (xi + x * s as usize) as i64, n));
                    let chirped_atom = tf_shift(&ug, TfLocation::new(x as i64, xi as i64, n));
                    // bracket antilinear in its first slot: <u, v> = sum conj(u) v
                    let lhs = atom.inner(&f);
                    let rhs = phase * chirped_atom.inner(&uf);
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
    }
    ensure(worst < 1e-10, || format!("max abs error {worst:e}"))?;
    Ok(format!("max abs error {worst:.1e} over N in {{8,12,16}}, s in {{0,1,2}}"))
}

fn frame_correctness() -> Outcome {
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let full = Lattice::full(n).map_err(err)?;
    let mut tight: f64 = 0.0;
    for g in [gauss(1.0, 0.0, n), gauss(3.0, 0.7, n), random_signal(n, &mut rng).normalized().map_err(err)?] {
        let fb = frame_bounds(&g, &full).map_err(err)?;
        tight = tight.max((fb.lower - n as f64).abs()).max((fb.upper - n as f64).abs());
    }
    ensure(tight <= 1e-6, || format!("full lattice bounds off by {tight:e}"))?;

    let g = gauss(1.0, 0.0, n);
    let mut worst: f64 = 0.0;
    for l in [Lattice::rectangular(4, 4, n).map_err(err)?, Lattice::from_shear(4, 4, 2, n).map_err(err)?] {
        let gd = dual_window(&g, &l).map_err(err)?;
        for _ in 0..5 {
            let f = random_signal(n, &mut rng);
            let back = idgt(&dgt(&f, &g, &l).map_err(err)?, &gd).map_err(err)?;
            worst = worst.max(back.distance(&f) / f.norm());
        }
    }
    ensure(worst < 1e-9, || format!("reconstruction error {worst:e}"))?;
    Ok(format!("|A-N|,|B-N| <= {tight:.1e}; reconstruction error {worst:.1e} at R=4"))
}

fn large_p_limit() -> Outcome {
    let start = Instant::now();
    let n = 64;
    let f = tf_center(&tf_shift(&gauss(2.0, 0.5, n), TfLocation::new(9, -5, n))).map_err(err)?;
    let l = Lattice::rectangular(4, 4, n).map_err(err)?;
    let cfg = OptimConfig { p: 20.0, ..OptimConfig::default() };
    let (g, trace) = optimize_nonparametric(&f, &l, &cfg).map_err(err)?;
    let overlap = g.inner(&f).norm();
    let elapsed = start.elapsed();
    ensure(overlap >= 0.99, || format!("|<g, f>| = {overlap}"))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("|<g_opt, f>| = {overlap:.8} after {} iterations in {elapsed:.2?}", trace.iterations()))
}

fn parametric_recovery() -> Outcome {
    let n = 256;
    let f = gauss(2.0, 1.0, n);
    let l = Lattice::from_shear(8, 8, 4, n).map_err(err)?;
    let cfg = OptimConfig { max_iters: 100, ..OptimConfig::default() };
    let (p, trace) = optimize_parametric(&f, &l, &cfg, ChirpedGaussianParams::round()).map_err(err)?;
    ensure((p.sigma / 2.0 - 1.0).abs() <= 0.05 && (p.s - 1.0).abs() <= 0.05, || format!("recovered {p:?}"))?;
    ensure(trace.iterations() <= 100, || format!("{} iterations", trace.iterations()))?;
    Ok(format!(
        "(sigma, s) = ({:.6}, {:.6}) in {} iterations ({:?})",
        p.sigma,
        p.s,
        trace.iterations(),
        trace.termination
    ))
}

fn adapted_geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = 1usize << rng.random_range(4..12);
        let p = ChirpedGaussianParams::new(rng.random_range(0.05..20.0), rng.random_range(-4.0..4.0)).map_err(err)?;
        let r = rng.random_range(1.0..20.0);
        let m = adapted_lattice_real(p, n, r).map_err(err)?;
        worst = worst.max((m.determinant() - n as f64 / r).abs());
    }
    ensure(worst <= 1e-9, || format!("determinant off by {worst:e}"))?;

    let l = rationalize_lattice(&adapted_lattice_real(ChirpedGaussianParams::round(), 128, 2.0).map_err(err)?)
        .map_err(err)?;
    ensure(l == Lattice::from_shear(8, 8, 4, 128).map_err(err)?, || format!("rationalized to {l}"))?;

    let g = gauss(1.0, 0.0, 128);
    let hex = frame_bounds(&g, &l).map_err(err)?.condition();
    let rect = frame_bounds(&g, &Lattice::rectangular(8, 8, 128).map_err(err)?).map_err(err)?.condition();
    ensure(hex < rect, || format!("sheared-hex condition {hex} not below rectangular {rect}"))?;
    Ok(format!("|det - N/R| <= {worst:.1e}; (8, 8, 4); condition {hex:.4} (hex) < {rect:.4} (rect)"))
}

fn alternating_loop() -> Outcome {
    let n = 1024;
    let start = Instant::now();
    let f = gauss(2.0, 0.25, n);
    let cfg = AlternateConfig {
        redundancy: 15.0,
        max_rounds: 5,
        initial_lattice: Some(Lattice::from_shear(8, 8, 4, n).map_err(err)?),
        ..AlternateConfig::default()
    };
    let res = alternate_optimize(&f, &cfg).map_err(err)?;
    ensure(res.outcome == AlternateOutcome::Fixpoint, || format!("R=15 ended with {:?}", res.outcome))?;
    let r15 = format!("R=15 fixpoint {} after {} rounds", res.lattice, res.rounds.len());

    let cfg = AlternateConfig { redundancy: 2.0, max_rounds: 50, lattice_fixpoint: true, ..AlternateConfig::default() };
    let res = alternate_optimize(&f, &cfg).map_err(err)?;
    let r2 = match &res.outcome {
        AlternateOutcome::Fixpoint => format!("R=2 fixpoint {}", res.lattice),
        AlternateOutcome::Oscillation { cycle } => format!("R=2 oscillation of length {}", cycle.len()),
        AlternateOutcome::MaxRounds => return Err("R=2 hit the round cap without a verdict".into()),
    };
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("{r15}; {r2}; {elapsed:.2?}"))
}

/// Strict local maxima of `|c|` along frequency rows `rows` of one column,
/// counting only those at least `floor` times the column maximum.
fn peaks(c: &GaborCoefficients, col: usize, rows: std::ops::Range<usize>, floor: f64) -> usize {
    let m: Vec<f64> = c.column(col).iter().map(|z| z.norm()).collect();
    let top = rows.clone().map(|r| m[r]).fold(0.0, f64::max);
    rows.filter(|&r| m[r] > m[r - 1] && m[r] > m[r + 1] && m[r] >= floor * top).count()
}

fn separation() -> Outcome {
    let n = 4096;
    let nf = n as f64;
    let c = 4.0 * PI / nf;
    let f = SignalSpec {
        n,
        kind: SignalKind::Multitone {
            a: [488.0, 512.0, 552.0].iter().map(|k| 2.0 * PI * k / nf).collect(),
            b: PI / (c * c * nf),
            c,
            theta: 0.3,
        },
        snr_db: None,
        seed: 0,
    }
    .generate()
    .map_err(err)?;

    let g0 = gauss(1.0, 0.0, n);
    let region = TfRegion::new(624, 1424, 300, 750, n).map_err(err)?;
    let h = extract_pattern(&f, &g0, &Lattice::rectangular(16, 16, n).map_err(err)?, &region).map_err(err)?;
    let cfg = OptimConfig { sigma_bounds: Some((0.5, 32.0)), ..OptimConfig::default() };
    let starts = [(1.0, 0.0), (4.0, 0.0), (16.0, 0.0)].map(|(s, c)| ChirpedGaussianParams::new(s, c).unwrap());
    let (p, _) = optimize_parametric_multistart(&h, &Lattice::from_shear(16, 16, 8, n).map_err(err)?, &cfg, &starts)
        .map_err(err)?;
    let g_opt = gaussian_window(p, n).map_err(err)?;

    let view = Lattice::rectangular(16, 4, n).map_err(err)?;
    let c_opt = dgt(&f, &g_opt, &view).map_err(err)?;
    let c_ref = dgt(&f, &g0, &view).map_err(err)?;
    let rows = 300 / 4..748 / 4;
    let centre = 1024usize;
    let cols: Vec<usize> = (100..=300)
        .step_by(view.a())
        .flat_map(|d| [(centre - d) / view.a(), (centre + d) / view.a()])
        .collect();
    let opt_counts: Vec<usize> = cols.iter().map(|&col| peaks(&c_opt, col, rows.clone(), 0.1)).collect();
    let mut ref_counts: Vec<usize> = cols.iter().map(|&col| peaks(&c_ref, col, rows.clone(), 0.1)).collect();
    ref_counts.sort_unstable();
    let ref_median = ref_counts[ref_counts.len() / 2];
    let opt_min = *opt_counts.iter().min().unwrap();
    let m_opt = max_track(&c_opt).into_iter().fold(0.0, f64::max);
    let m_ref = max_track(&c_ref).into_iter().fold(0.0, f64::max);
    ensure(opt_min >= 3, || format!("optimized window resolves only {opt_min} components in some column"))?;
    ensure(ref_median < 3, || format!("round Gaussian already resolves {ref_median} (median)"))?;
    ensure(m_opt > m_ref, || format!("max m(t) {m_opt} not above {m_ref}"))?;
    Ok(format!(
        "window ({:.3}, {:.3}): >= {opt_min} maxima per column vs median {ref_median}; max m {m_opt:.3} > {m_ref:.3}",
        p.sigma, p.s
    ))
}

fn boundary_bound() -> Outcome {
    let n = 256;
    let centred = |sigma: f64, s: f64| tf_shift(&gauss(sigma, s, n), TfLocation::new(n as i64 / 2, 0, n));
    let mut worst: f64 = 0.0;
    for ((sf, cf), (sg, cg)) in [((1.0, 0.0), (1.0, 0.0)), ((1.0, 0.0), (0.5, 0.3)), ((2.0, 0.5), (1.0, -0.5))] {
        let f = centred(sf, cf);
        let g = centred(sg, cg);
        let report = boundary_energy_check(&f, &g, tail_amplitude(&f, &g)).map_err(err)?;
        ensure(report.passed, || format!("{report:?}"))?;
        worst = worst.max(report.max_ratio);
    }
    ensure(worst <= 1.0, || format!("max ratio {worst}"))?;
    Ok(format!("max ratio {worst:.3e}"))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gabopt"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn determinism() -> Outcome {
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let d = dir.path();
        run_cli(d, &["gen", "--kind", "chirped-gauss", "--n", "512", "--sigma", "3", "--chirp", "0.5", "--t0", "200", "--bin", "60", "--snr-db", "5", "--seed", "17", "--out", "f.csv"])?;
        run_cli(d, &["dgt", "--input", "f.csv", "--lattice", "8,8,4", "--out", "c.csv"])?;
        run_cli(d, &["render", "--input", "f.csv", "--lattice", "4,4,2", "--out", "s.pgm"])?;
        run_cli(d, &["optimize-window", "--method", "param", "--input", "f.csv", "--lattice", "8,8,4", "--from", "1,0", "--from", "4,0", "--trace", "t.csv", "--out", "g.csv"])?;
        run_cli(d, &["alternate", "--input", "f.csv", "--redundancy", "4", "--rounds", "r.csv"])?;
        let files = ["f.csv", "c.csv", "s.pgm", "t.csv", "g.csv", "r.csv"];
        runs.push(files.map(|name| (name, std::fs::read(d.join(name)).unwrap())));
    }
    for ((name, a), (_, b)) in runs[0].iter().zip(&runs[1]) {
        ensure(a == b, || format!("{name} differs between runs"))?;
    }
    Ok("gen, dgt, render, optimize-window and alternate outputs identical across two runs".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("gradient oracle", gradient_oracle),
        ("shear/chirp identity", shear_identity),
        ("frame correctness", frame_correctness),
        ("large-p limit", large_p_limit),
        ("parametric self-recovery", parametric_recovery),
        ("adapted-lattice geometry", adapted_geometry),
        ("alternating loop", alternating_loop),
        ("component separation", separation),
        ("boundary bound", boundary_bound),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

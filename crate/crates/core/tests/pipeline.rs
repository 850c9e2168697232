mod common;

use gabopt::adapt::{adapted_lattice_real, fit_chirped_gaussian, rationalize_lattice};
use gabopt::dsp::{gaussian_window, tf_center, ChirpedGaussianParams};
use gabopt::gabor::dgt;
use gabopt::generate::{SignalKind, SignalSpec};
use gabopt::lattice::Lattice;
use gabopt::optim::{lp_objective, optimize_parametric, OptimConfig};
use gabopt::pipeline::{alternate_optimize, extract_pattern, AlternateOutcome, mask_region, AlternateConfig, TfRegion};
use nalgebra::{Matrix3, Vector3};

#[test]
fn region_masking_is_nearly_idempotent() {
    let n = 512;
    let f = SignalSpec {
        n,
        kind: SignalKind::ChirpedGauss { sigma: 4.0, s: 0.5, t0: 200, f0: 100 },
        snr_db: Some(10.0),
        seed: 3,
    }
    .generate()
    .unwrap();
    let g0 = gaussian_window(ChirpedGaussianParams::round(), n).unwrap();
    let l = Lattice::rectangular(4, 4, n).unwrap();
    let region = TfRegion::new(140, 260, 60, 140, n).unwrap();
    let h = mask_region(&f, &g0, &l, &region).unwrap();
    let h2 = mask_region(&h, &g0, &l, &region).unwrap();
    assert!(h.distance(&h2) < 0.05 * h.norm(), "{} vs {}", h.distance(&h2), h.norm());

    let centred = extract_pattern(&f, &g0, &l, &region).unwrap();
    assert!((centred.norm() - h.norm()).abs() < 1e-12 * h.norm());
    assert!(centred.distance(&tf_center(&centred).unwrap()) < 1e-12);
}

#[test]
fn alternating_rounds_improve_on_a_fixed_lattice() {
    let n = 512;
    let f = SignalSpec { n, kind: SignalKind::GaussAtom { sigma: 3.0, s: 0.25 }, snr_db: Some(15.0), seed: 9 }
        .generate()
        .unwrap();
    let cfg = AlternateConfig {
        max_rounds: 6,
        lattice_fixpoint: false,
        redundancy: 4.0,
        inner: OptimConfig { max_iters: 40, ..OptimConfig::default() },
        ..AlternateConfig::default()
    };
    let res = alternate_optimize(&f, &cfg).unwrap();
    assert!(!res.rounds.is_empty());
    let adapted = |p| rationalize_lattice(&adapted_lattice_real(p, n, cfg.redundancy).unwrap()).unwrap();
    let mut used = adapted(ChirpedGaussianParams::round());
    let mut prev: Option<(Lattice, f64)> = None;
    for r in &res.rounds {
        if let Some((l, obj)) = prev {
            if l == used {
                assert!(r.objective >= obj * (1.0 - 1e-12), "round {}: {} < {}", r.round, r.objective, obj);
            }
        }
        prev = Some((used, r.objective));
        used = r.lattice;
    }
    // one more warm-started round on the final lattice cannot lose ground
    let last = res.rounds.last().unwrap();
    if res.outcome == AlternateOutcome::Fixpoint {
        assert_eq!(last.lattice, res.lattice);
        let (p, _) = optimize_parametric(&f, &res.lattice, &cfg.inner, res.params).unwrap();
        let again = lp_objective(&gaussian_window(p, n).unwrap(), &f, &res.lattice, cfg.inner.p).unwrap();
        assert!(again >= last.objective * (1.0 - 1e-12), "{again} < {}", last.objective);
    }
}

#[test]
fn quadchirp_ridge_is_quadratic() {
    let n = 1024;
    let (f0, f1) = (20.0, 300.0);
    let f = SignalSpec { n, kind: SignalKind::Quadchirp { f0, f1 }, snr_db: None, seed: 0 }.generate().unwrap();
    let l = Lattice::rectangular(8, 2, n).unwrap();
    let g = gaussian_window(ChirpedGaussianParams::new(2.0, 0.0).unwrap(), n).unwrap();
    let c = dgt(&f, &g, &l).unwrap();
    // positive frequencies only; the real signal mirrors the ridge
    let half = c.rows() / 2;
    let ridge: Vec<(f64, f64)> = (c.cols() / 8..c.cols() * 7 / 8)
        .map(|col| {
            let row = (0..half).max_by(|&i, &j| c.get(col, i).norm().total_cmp(&c.get(col, j).norm())).unwrap();
            ((col * l.a()) as f64, (row * l.b()) as f64)
        })
        .collect();
    assert!(ridge.windows(2).all(|w| w[1].1 >= w[0].1), "ridge not monotone");

    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for &(t, y) in &ridge {
        let row = Vector3::new(1.0, t, t * t);
        ata += row * row.transpose();
        aty += row * y;
    }
    let coef = ata.cholesky().unwrap().solve(&aty);
    let span = f1 - f0;
    let worst = ridge
        .iter()
        .map(|&(t, y)| (coef[0] + coef[1] * t + coef[2] * t * t - y).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.05 * span, "quadratic residual {worst}");
    let expected_curv = span / (n * n) as f64;
    assert!((coef[2] / expected_curv - 1.0).abs() < 0.05, "curvature {} vs {}", coef[2], expected_curv);
}

#[test]
fn grid_fit_recovers_noisy_chirped_gaussian() {
    let n = 256;
    let g = SignalSpec { n, kind: SignalKind::GaussAtom { sigma: 2.0, s: 1.0 }, snr_db: Some(20.0), seed: 11 }
        .generate()
        .unwrap();
    let sigmas: Vec<f64> = (1..=16).map(|k| 0.25 * k as f64).collect();
    let ss: Vec<f64> = (-8..=8).map(|k| 0.25 * k as f64).collect();
    let p = fit_chirped_gaussian(&g, &sigmas, &ss).unwrap();
    assert_eq!((p.sigma, p.s), (2.0, 1.0));
}

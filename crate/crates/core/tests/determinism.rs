mod common;

use common::random_signal;
use gabopt::dsp::ChirpedGaussianParams;
use gabopt::frame::{dual_window, frame_bounds};
use gabopt::gabor::dgt;
use gabopt::lattice::Lattice;
use gabopt::optim::{grad_lp_window, optimize_parametric_multistart, OptimConfig};

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn four_threads<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(f)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let n = 512;
    let l = Lattice::from_shear(8, 8, 4, n).unwrap();
    let f = random_signal(n, 1);
    let g = random_signal(n, 2);
    let run = || {
        let c = dgt(&f, &g, &l).unwrap();
        let fb = frame_bounds(&g, &l).unwrap();
        let gd = dual_window(&g, &l).unwrap();
        let grad = grad_lp_window(&g, &f, &l, 4.0).unwrap();
        let cfg = OptimConfig { max_iters: 15, ..OptimConfig::default() };
        let starts = [ChirpedGaussianParams::round(), ChirpedGaussianParams::new(4.0, 0.5).unwrap()];
        let (p, trace) = optimize_parametric_multistart(&f, &l, &cfg, &starts).unwrap();
        (c, fb, gd, grad, p, trace.objectives())
    };
    let a = single_threaded(run);
    let b = four_threads(run);
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.2, b.2);
    assert_eq!(a.3, b.3);
    assert_eq!(a.4, b.4);
    assert_eq!(a.5, b.5);
}

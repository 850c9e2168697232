use num_complex::Complex64;

use crate::dsp::{gaussian_window_jet, ChirpedGaussianParams, Signal};
use crate::error::{GaborError, Result};
use crate::gabor::{dgt, mask_operator, GaborCoefficients, TfMask};
use crate::lattice::Lattice;

use super::metrics::lp_concentration;

/// `J(g) = sum |<f, M_xi T_x g>|^p`.
/// Non-finite values are reported as divergence.
pub fn lp_objective(g: &Signal, f: &Signal, lattice: &Lattice, p: f64) -> Result<f64> {
    let v = lp_concentration(&dgt(f, g, lattice)?, p);
    if !v.is_finite() {
        return Err(GaborError::Divergence { iteration: 0 });
    }
    Ok(v)
}

fn mask_from(c: &GaborCoefficients, p: f64) -> Result<TfMask> {
    TfMask::new(
        c.lattice(),
        c.values().iter().map(|z| z.norm().powf(p - 2.0)).collect(),
    )
}

/// `J(g)` and its Wirtinger gradient `dJ/d conj(g) = (p/2) G(g)`, where `G` is
/// the masking operator with atoms of `f` and mask `|<g, M_xi T_x f>|^{p-2}`.
///
/// The directional derivative along `d` is `2 Re <grad, d>`.
pub fn lp_objective_and_grad(g: &Signal, f: &Signal, lattice: &Lattice, p: f64) -> Result<(f64, Signal)> {
    // |<g, pi(l) f>| = |<f, pi(-l) g>| and the lattice is a group, so the
    // moduli of both transforms agree as multisets.
    let c = dgt(g, f, lattice)?;
    let objective = lp_concentration(&c, p);
    if !objective.is_finite() {
        return Err(GaborError::Divergence { iteration: 0 });
    }
    let grad = mask_operator(g, f, lattice, &mask_from(&c, p)?)?;
    Ok((objective, grad.scaled(Complex64::new(p / 2.0, 0.0))))
}

pub fn grad_lp_window(g: &Signal, f: &Signal, lattice: &Lattice, p: f64) -> Result<Signal> {
    lp_objective_and_grad(g, f, lattice, p).map(|r| r.1)
}

/// `J` at the unit-norm window `phi_{sigma,s}` and its partial derivatives
/// `(dJ/dsigma, dJ/ds)`.
pub fn parametric_objective_and_grad(
    params: ChirpedGaussianParams,
    f: &Signal,
    lattice: &Lattice,
    p: f64,
) -> Result<(f64, [f64; 2])> {
    let jet = gaussian_window_jet(params, lattice.len())?;
    let (objective, grad) = lp_objective_and_grad(&jet.window, f, lattice, p)?;
    let d = |dw: &Signal| 2.0 * grad.inner(dw).re;
    Ok((objective, [d(&jet.d_sigma), d(&jet.d_s)]))
}

pub fn grad_parametric(params: ChirpedGaussianParams, f: &Signal, lattice: &Lattice, p: f64) -> Result<(f64, f64)> {
    parametric_objective_and_grad(params, f, lattice, p).map(|(_, [a, b])| (a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::gaussian_window;

    #[test]
    fn zero_signal_has_zero_gradient() {
        let l = Lattice::full(8).unwrap();
        let g = Signal::from_real(&[1.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.5, 0.0]).unwrap();
        let grad = grad_lp_window(&g, &Signal::zeros(8).unwrap(), &l, 4.0).unwrap();
        assert_eq!(grad.norm(), 0.0);
    }

    #[test]
    fn delta_gradient_is_delta() {
        // all mass sits on x = 0: G(delta) = sum_xi |1|^2 M_xi delta = N delta
        let d = Signal::delta(4, 0).unwrap();
        let grad = grad_lp_window(&d, &d, &Lattice::full(4).unwrap(), 4.0).unwrap();
        let expect = d.scaled(Complex64::new(2.0 * 4.0, 0.0));
        assert!(grad.distance(&expect) < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let n = 16;
        let l = Lattice::new(2, 2, 1, n).unwrap();
        let f = Signal::from_real(&(0..n).map(|t| ((t * 7 % 5) as f64 - 2.0) / 3.0).collect::<Vec<_>>()).unwrap();
        let g = gaussian_window(ChirpedGaussianParams::new(0.7, 0.3).unwrap(), n).unwrap();
        let (_, grad) = lp_objective_and_grad(&g, &f, &l, 4.0).unwrap();
        let h = 1e-6;
        for k in 0..n {
            for dir in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                let d = Signal::delta(n, k).unwrap().scaled(dir);
                let plus = lp_objective(&g.add_scaled(Complex64::new(h, 0.0), &d).unwrap(), &f, &l, 4.0).unwrap();
                let minus = lp_objective(&g.add_scaled(Complex64::new(-h, 0.0), &d).unwrap(), &f, &l, 4.0).unwrap();
                let fd = (plus - minus) / (2.0 * h);
                let an = 2.0 * grad.inner(&d).re;
                assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{k} {fd} {an}");
            }
        }
    }

    #[test]
    fn even_real_signal_has_zero_chirp_gradient() {
        let n = 64;
        let f = gaussian_window(ChirpedGaussianParams::new(2.0, 0.0).unwrap(), n).unwrap();
        let l = Lattice::rectangular(4, 4, n).unwrap();
        let (_, ds) = grad_parametric(ChirpedGaussianParams::new(1.3, 0.0).unwrap(), &f, &l, 4.0).unwrap();
        assert!(ds.abs() < 1e-9);
    }
}

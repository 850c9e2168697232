use crate::gabor::GaborCoefficients;

/// `sum |c|^p`, or `max |c|` for `p = inf`.
pub fn lp_concentration(c: &GaborCoefficients, p: f64) -> f64 {
    if p.is_infinite() {
        c.values().iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else {
        c.values().iter().map(|z| z.norm().powf(p)).sum()
    }
}

/// Shannon entropy `-sum |c|^2 ln |c|^2` with `0 ln 0 = 0`.
pub fn entropy_concentration(c: &GaborCoefficients) -> f64 {
    -c.values()
        .iter()
        .map(|z| z.norm_sqr())
        .filter(|&e| e > 0.0)
        .map(|e| e * e.ln())
        .sum::<f64>()
}

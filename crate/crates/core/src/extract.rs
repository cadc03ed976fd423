//! Taylor coefficients from values on a circle, and simple fits.

use std::f64::consts::PI;

use crate::{Error, Result, C64};

/// Coefficients `a_0 .. a_nmax` of `f(center + t) = sum a_n t^n`, from `m` samples on
/// `|t| = radius` (trapezoidal Cauchy integral; aliasing error of order `(radius/R)^m`).
pub fn taylor_coefficients<F>(mut f: F, center: C64, radius: f64, m: usize, nmax: usize) -> Result<Vec<C64>>
where
    F: FnMut(C64) -> Result<C64>,
{
    if m <= nmax {
        return Err(Error::input("need more samples than coefficients"));
    }
    let mut vals = Vec::with_capacity(m);
    for j in 0..m {
        let t = C64::from_polar(radius, 2.0 * PI * j as f64 / m as f64);
        vals.push(f(center + t)?);
    }
    Ok(coefficients_from_samples(&vals, radius, nmax))
}

/// Same as [`taylor_coefficients`] for samples already taken at `radius * exp(2 pi i j/m)`.
pub fn coefficients_from_samples(vals: &[C64], radius: f64, nmax: usize) -> Vec<C64> {
    let m = vals.len();
    (0..=nmax)
        .map(|n| {
            let mut s = C64::new(0.0, 0.0);
            for (j, v) in vals.iter().enumerate() {
                let ang = -2.0 * PI * ((j * n) % m) as f64 / m as f64;
                s += v * C64::from_polar(1.0, ang);
            }
            s / m as f64 / radius.powi(n as i32)
        })
        .collect()
}

/// Least-squares slope of `log |y|` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::FitError("need at least two points".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    if ly.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitError("zero or non-finite sample".into()));
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::FitError("degenerate abscissae".into()));
    }
    Ok(sxy / sxx)
}

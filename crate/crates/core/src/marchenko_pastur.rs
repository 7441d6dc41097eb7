//! Marchenko-Pastur law for aspect `lambda <= 1`.

use std::f64::consts::PI;

use crate::error::{EdgeError, Result};

fn edges(lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(EdgeError::InvalidParameter(format!("lambda = {lambda} outside (0, 1]")));
    }
    let s = lambda.sqrt();
    Ok(((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s)))
}

pub fn mp_density(x: f64, lambda: f64) -> Result<f64> {
    let (lo, hi) = edges(lambda)?;
    if x <= lo || x >= hi {
        return Ok(0.0);
    }
    Ok(((hi - x) * (x - lo)).sqrt() / (2.0 * PI * lambda * x))
}

/// Integrand after `x = d_- + w (1 - cos t) / 2`; smooth on `[0, pi]`, even at `d_- = 0`.
fn angular_integrand(t: f64, lo: f64, w: f64, lambda: f64) -> f64 {
    let sh = (0.5 * t).sin();
    let ch = (0.5 * t).cos();
    let u = 2.0 * sh * sh;
    let v = 2.0 * ch * ch;
    let above = 0.5 * w * u;
    let frac = if lo + above > 0.0 { above / (lo + above) } else { 1.0 };
    0.5 * w * v * frac / (2.0 * PI * lambda)
}

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if diff.abs() <= 15.0 * eps {
        return Ok(left + right + diff / 15.0);
    }
    if depth == 0 {
        return Err(EdgeError::Quadrature(format!("no convergence on [{a}, {b}]")));
    }
    Ok(simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `eps`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, eps: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, eps, 48)
}

pub fn mp_cdf(x: f64, lambda: f64) -> Result<f64> {
    let (lo, hi) = edges(lambda)?;
    if x <= lo {
        return Ok(0.0);
    }
    if x >= hi {
        return Ok(1.0);
    }
    let w = hi - lo;
    let t = (1.0 - 2.0 * (x - lo) / w).clamp(-1.0, 1.0).acos();
    let v = adaptive_simpson(|s| angular_integrand(s, lo, w, lambda), 0.0, t, 1e-13)?;
    Ok(v.clamp(0.0, 1.0))
}

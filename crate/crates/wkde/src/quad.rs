//! Adaptive quadrature with a declared absolute tolerance.
//!
//! Plain adaptive Simpson with Richardson correction.  Callers that know
//! where an integrand has kinks (kernel edges, density support edges) pass
//! them as breakpoints so each piece is smooth; non-convergence is an error,
//! never silently accepted.

use crate::{Error, Result};

const MAX_DEPTH: u32 = 48;

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> std::result::Result<f64, f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol || (b - a) < 1e-15 * (1.0 + a.abs() + b.abs()) {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(err.abs() / 15.0);
    }
    let half = 0.5 * tol;
    let l = adapt(f, a, m, fa, flm, fm, left, half, depth - 1)?;
    let r = adapt(f, m, b, fm, frm, fb, right, half, depth - 1)?;
    Ok(l + r)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let m = 0.5 * (lo + hi);
    let (fa, fm, fb) = (f(lo), f(m), f(hi));
    let whole = simpson(fa, fm, fb, hi - lo);
    match adapt(f, lo, hi, fa, fm, fb, whole, tol, MAX_DEPTH) {
        Ok(v) => Ok(sign * v),
        Err(err) => Err(Error::QuadratureNonConvergence { lo, hi, tol, err }),
    }
}

/// Integrate over `[a, b]` splitting at the interior `breakpoints`.
///
/// Breakpoints outside `(a, b)` are ignored; the per-piece tolerance is
/// `tol` divided by the number of pieces.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<f64> {
    debug_assert!(a <= b);
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    let pieces = cuts.len() + 1;
    let per = tol / pieces as f64;
    let mut lo = a;
    let mut total = 0.0;
    for cut in cuts {
        total += integrate(f, lo, cut, per)?;
        lo = cut;
    }
    total += integrate(f, lo, b, per)?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(&|x: f64| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn exp_integral() {
        let v = integrate(&|x: f64| (-x).exp(), 0.0, 5.0, 1e-13).unwrap();
        assert!((v - (1.0 - (-5.0_f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn kink_with_breakpoint() {
        // ∫_{-1}^{1} |x| dx = 1
        let v = integrate_with_breakpoints(&|x: f64| x.abs(), -1.0, 1.0, &[0.0], 1e-13).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let v = integrate(&|x: f64| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
    }
}

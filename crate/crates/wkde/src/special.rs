//! Log-domain special functions for tail probabilities.
//!
//! The condition scans evaluate tail probabilities at normings as large as
//! 1e16 where the plain probabilities underflow, so everything here works
//! on logarithms and switches to asymptotic expansions once the direct
//! evaluation would lose the exponent.

use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_ur, ln_gamma};

/// log of the upper incomplete gamma function Γ(a, z) = ∫_z^∞ t^{a-1} e^{-t} dt.
pub(crate) fn ln_gamma_upper(a: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return ln_gamma(a);
    }
    if z < 600.0 {
        let q = gamma_ur(a, z);
        if q > 0.0 {
            return q.ln() + ln_gamma(a);
        }
    }
    // Γ(a, z) ~ z^{a-1} e^{-z} (1 + (a-1)/z + (a-1)(a-2)/z² + ...)
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..12 {
        term *= (a - k as f64) / z;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (a - 1.0) * z.ln() - z + sum.ln()
}

/// Exponential integral E1(x) = ∫_x^∞ e^{-t}/t dt for x > 0.
pub(crate) fn exp_int_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 requires x > 0");
    const EULER: f64 = 0.577_215_664_901_532_9;
    if x <= 1.0 {
        // power series: E1 = -γ - ln x + Σ (-1)^{k+1} x^k / (k·k!)
        let mut sum = 0.0_f64;
        let mut term = 1.0_f64;
        for k in 1..40 {
            let kf = k as f64;
            term *= -x / kf;
            let contrib = -term / kf;
            sum += contrib;
            if contrib.abs() < 1e-18 * (1.0 + sum.abs()) {
                break;
            }
        }
        -EULER - x.ln() + sum
    } else {
        // modified Lentz continued fraction: E1 = e^{-x} / (x + 1/(1 + 1/(x + 2/(1 + ...))))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -(i as f64) * (i as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x).exp() * h
    }
}

/// log E1(x), stable for large x where E1 underflows.
pub(crate) fn ln_exp_int_e1(x: f64) -> f64 {
    if x <= 30.0 {
        return exp_int_e1(x).ln();
    }
    // E1(x) = e^{-x}/x (1 - 1/x + 2/x² - 6/x³ + 24/x⁴ - ...)
    let inv = 1.0 / x;
    let series = 1.0 + inv * (-1.0 + inv * (2.0 + inv * (-6.0 + inv * 24.0)));
    -x - x.ln() + series.ln()
}

/// log erfc(v) for v ≥ 0, stable for large v.
pub(crate) fn ln_erfc(v: f64) -> f64 {
    if v < 25.0 {
        return erfc(v).ln();
    }
    // erfc(v) = e^{-v²}/(v√π) (1 - 1/(2v²) + 3/(4v⁴) - 15/(8v⁶) + ...)
    let w = 1.0 / (v * v);
    let series = 1.0 + w * (-0.5 + w * (0.75 + w * -1.875));
    -v * v - (v * std::f64::consts::PI.sqrt()).ln() + series.ln()
}

//! Comparison of experiment output against predicted constants and laws.

use crate::conditions::{LimitLaw, RegimePrediction};
use crate::densities::weight_tail;

use super::config::{ExperimentConfig, Mode};
use super::runner::{statistics_for, ExperimentResult};

/// Kolmogorov-Smirnov distance between sorted samples and a cdf.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sorted.iter().enumerate() {
        let c = cdf(x);
        d = d
            .max((c - i as f64 / n).abs())
            .max((c - (i + 1) as f64 / n).abs());
    }
    d
}

/// Exact finite-`n` cdf of the scaled extreme term
/// `‖K‖_∞ max_i Ψ(X_i) / d_n`, valid for any model with a closed-form
/// weight tail: `Pr{max ≤ u} = (1 - Pr{Ψ(X) > u d_n / ‖K‖_∞})^n`.
pub fn exact_max_term_cdf(cfg: &ExperimentConfig, n: usize) -> impl Fn(f64) -> f64 + '_ {
    let d_n = cfg.norming.as_ref().expect("max-term law needs a norming").d(n as f64);
    let kappa = cfg.kernel.sup_norm();
    move |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let tail = weight_tail(&cfg.model, &cfg.weight, u * d_n / kappa);
        (1.0 - tail).powi(n as i32)
    }
}

/// Per-`n` comparison row.
#[derive(Debug, Clone)]
pub struct TheoryRow {
    pub n: usize,
    pub median: f64,
    /// Relative deviation of the median from the predicted constant.
    pub rel_dev: Option<f64>,
    /// KS distance to the predicted limit law (or exact max-term law).
    pub ks: Option<f64>,
    pub median_abs_residual: f64,
}

/// Trend summary against a regime prediction.
#[derive(Debug, Clone)]
pub struct TheoryComparison {
    pub per_n: Vec<TheoryRow>,
    /// Strictly decreasing deviation from the constant across the schedule.
    pub deviation_decreasing: Option<bool>,
    /// Strictly decreasing KS distance across the schedule.
    pub ks_decreasing: Option<bool>,
    /// Strictly decreasing median absolute residual.
    pub residual_decreasing: bool,
    /// median(largest n) / median(smallest n).
    pub divergence_ratio: Option<f64>,
}

fn median_abs_residual(res: &ExperimentResult, n: usize) -> f64 {
    let mut v: Vec<f64> = res
        .rows
        .iter()
        .filter(|r| r.n == n && !r.failed())
        .map(|r| r.residual.abs())
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if v.is_empty() {
        f64::NAN
    } else {
        super::runner::quantile(&v, 0.5)
    }
}

/// Compare a result against a regime prediction.
///
/// Constant predictions are scored by the relative deviation of the median;
/// distributional predictions by per-`n` KS distances; the max-term-only
/// mode by KS distance to the exact finite-`n` law of the extreme term.
pub fn compare_to_theory(
    cfg: &ExperimentConfig,
    res: &ExperimentResult,
    pred: &RegimePrediction,
) -> TheoryComparison {
    let mut per_n = Vec::new();
    for s in &res.summaries {
        let stats = statistics_for(res, s.n);
        let median = s.stat_q[2];
        let rel_dev = pred
            .limit_constant
            .filter(|c| *c > 0.0)
            .map(|c| (median - c).abs() / c);
        let ks = match cfg.mode {
            Mode::MaxTermOnly => Some(ks_distance(&stats, exact_max_term_cdf(cfg, s.n))),
            _ => pred.limit_law.as_ref().and_then(|law| match law {
                LimitLaw::Constant { .. } => None,
                LimitLaw::MaxFrechetPower { .. } => Some(ks_distance(&stats, |t| law.cdf(t))),
            }),
        };
        per_n.push(TheoryRow {
            n: s.n,
            median,
            rel_dev,
            ks,
            median_abs_residual: median_abs_residual(res, s.n),
        });
    }
    let strictly_decreasing = |vals: Vec<Option<f64>>| -> Option<bool> {
        let v: Vec<f64> = vals.into_iter().collect::<Option<Vec<_>>>()?;
        if v.len() < 2 {
            return None;
        }
        Some(v.windows(2).all(|w| w[1] < w[0]))
    };
    let deviation_decreasing = strictly_decreasing(per_n.iter().map(|r| r.rel_dev).collect());
    let ks_decreasing = strictly_decreasing(per_n.iter().map(|r| r.ks).collect());
    let residual_decreasing = per_n
        .windows(2)
        .all(|w| w[1].median_abs_residual < w[0].median_abs_residual);
    let divergence_ratio = match (per_n.first(), per_n.last()) {
        (Some(a), Some(b)) if per_n.len() >= 2 && a.median > 0.0 => Some(b.median / a.median),
        _ => None,
    };
    TheoryComparison {
        per_n,
        deviation_decreasing,
        ks_decreasing,
        residual_decreasing,
        divergence_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_perfect_grid() {
        // points at the cdf quantiles (i+1/2)/n give KS = 1/(2n)
        let n = 100;
        let sorted: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_distance(&sorted, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
    }

    #[test]
    fn ks_detects_shift() {
        let sorted: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0 + 0.2).collect();
        let d = ks_distance(&sorted, |x| x.clamp(0.0, 1.0));
        assert!(d > 0.19);
    }
}

//! Seeded Monte Carlo execution.
//!
//! Replication streams are counter-based: every `(n-index, replication)`
//! pair owns ChaCha stream `(n_index << 32) | rep` of the master seed, so
//! streams never overlap, any row can be regenerated in isolation, and the
//! result does not depend on scheduling.  Rows are computed by an
//! order-preserving parallel map and reduced deterministically; identical
//! configurations give byte-identical output for any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::densities::weighted_norms;
use crate::estimator::{max_weight, Sample, SupContext};
use crate::exec::{map_collect, with_workers, ExecMode};
use crate::{Error, Result};

use super::config::{ExperimentConfig, Mode};

/// One `(n, replication)` outcome, flattened for CSV emission.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub rep: u32,
    pub statistic: f64,
    pub max_term: f64,
    pub central: Option<f64>,
    pub residual: f64,
    pub argmax: f64,
    pub seed_hi: u64,
    pub seed_lo: u64,
    /// Present when the row failed (quadrature non-convergence); failed
    /// rows carry NaN statistics and are excluded from summaries.
    pub error: Option<String>,
}

impl ResultRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Per-`n` summary: quantiles at the 5/25/50/75/95 percent levels.
#[derive(Debug, Clone, PartialEq)]
pub struct NSummary {
    pub n: usize,
    pub count: usize,
    pub failed: usize,
    pub stat_q: [f64; 5],
    pub max_term_q: [f64; 5],
    pub residual_q: [f64; 5],
}

/// Full experiment output.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub summaries: Vec<NSummary>,
    pub config_echo: String,
}

pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.50, 0.75, 0.95];

/// Deterministic order-statistic quantile with linear interpolation
/// between adjacent order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let idx = p * (sorted.len() - 1) as f64;
    let lo = idx.floor() as usize;
    let hi = idx.ceil() as usize;
    let frac = idx - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

fn summary_quantiles(values: &mut Vec<f64>) -> [f64; 5] {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = [f64::NAN; 5];
    if values.is_empty() {
        return out;
    }
    for (i, &p) in QUANTILE_LEVELS.iter().enumerate() {
        out[i] = quantile(values, p);
    }
    out
}

/// The ChaCha stream for replication `rep` of schedule entry `n_index`.
pub fn replication_stream(master_seed: u64, n_index: usize, rep: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((n_index as u64) << 32) | rep as u64);
    rng
}

/// Run the configured experiment; fully deterministic given the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let threads = std::env::var("WKDE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(cfg.threads);
    with_workers(threads, || run_experiment_inner(cfg))
}

fn run_experiment_inner(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let mode = cfg.exec;
    let mut rows = Vec::with_capacity(cfg.n_schedule.len() * cfg.replications);
    let mut summaries = Vec::with_capacity(cfg.n_schedule.len());
    for (n_index, &n) in cfg.n_schedule.iter().enumerate() {
        // shared per-n scan context (core grid + expected values), built
        // once before the replication fan-out
        let ctx = match cfg.mode {
            Mode::MaxTermOnly => None,
            _ => {
                let h = cfg.band.h(n as f64);
                Some(SupContext::new(
                    &cfg.model,
                    &cfg.kernel,
                    cfg.weight,
                    h,
                    &cfg.grid,
                    mode,
                )?)
            }
        };
        let n_rows: Vec<ResultRow> = map_collect(cfg.replications, mode, |rep| {
            compute_row(cfg, ctx.as_ref(), n_index, n, rep as u32)
        });
        let mut stat = Vec::new();
        let mut max_term = Vec::new();
        let mut residual = Vec::new();
        let mut failed = 0usize;
        for row in &n_rows {
            if row.failed() {
                failed += 1;
            } else {
                stat.push(row.statistic);
                max_term.push(row.max_term);
                residual.push(row.residual);
            }
        }
        summaries.push(NSummary {
            n,
            count: n_rows.len(),
            failed,
            stat_q: summary_quantiles(&mut stat),
            max_term_q: summary_quantiles(&mut max_term),
            residual_q: summary_quantiles(&mut residual),
        });
        rows.extend(n_rows);
    }
    Ok(ExperimentResult {
        rows,
        summaries,
        config_echo: cfg.echo(),
    })
}

fn compute_row(
    cfg: &ExperimentConfig,
    ctx: Option<&SupContext<'_>>,
    n_index: usize,
    n: usize,
    rep: u32,
) -> ResultRow {
    let seed_lo = ((n_index as u64) << 32) | rep as u64;
    let mut rng = replication_stream(cfg.master_seed, n_index, rep);
    let sample = Sample::draw(&cfg.model, n, &mut rng, (cfg.master_seed, seed_lo));
    let computed = match cfg.mode {
        Mode::Classical => ctx
            .unwrap()
            .deviation(&sample, &cfg.band, ExecMode::Sequential)
            .map(|d| (d.statistic, d.max_term, d.central_constant, d.residual, d.argmax[0])),
        Mode::Large => ctx
            .unwrap()
            .large_deviation(&sample, cfg.norming.as_ref().unwrap(), ExecMode::Sequential)
            .map(|d| (d.statistic, d.max_term, d.central_constant, d.residual, d.argmax[0])),
        Mode::MaxTermOnly => {
            let d = cfg.norming.as_ref().unwrap().d(n as f64);
            let (max_psi, arg) = max_weight(&sample, &cfg.model, &cfg.weight);
            let m = cfg.kernel.sup_norm() * max_psi / d;
            Ok((m, m, None, 0.0, arg))
        }
    };
    match computed {
        Ok((statistic, max_term, central, residual, argmax)) => ResultRow {
            n,
            rep,
            statistic,
            max_term,
            central,
            residual,
            argmax,
            seed_hi: cfg.master_seed,
            seed_lo,
            error: None,
        },
        Err(e) => ResultRow {
            n,
            rep,
            statistic: f64::NAN,
            max_term: f64::NAN,
            central: None,
            residual: f64::NAN,
            argmax: f64::NAN,
            seed_hi: cfg.master_seed,
            seed_lo,
            error: Some(e.to_string()),
        },
    }
}

/// Recompute per-`n` summaries from rows (used by the emit round-trip
/// checks); must agree exactly with the runner's summaries.
pub fn summarize_rows(rows: &[ResultRow]) -> Vec<NSummary> {
    let mut by_n: Vec<usize> = rows.iter().map(|r| r.n).collect();
    by_n.dedup();
    let mut out = Vec::new();
    for n in by_n {
        let group: Vec<&ResultRow> = rows.iter().filter(|r| r.n == n).collect();
        let mut stat = Vec::new();
        let mut max_term = Vec::new();
        let mut residual = Vec::new();
        let mut failed = 0;
        for row in &group {
            if row.failed() || row.statistic.is_nan() {
                failed += 1;
            } else {
                stat.push(row.statistic);
                max_term.push(row.max_term);
                residual.push(row.residual);
            }
        }
        out.push(NSummary {
            n,
            count: group.len(),
            failed,
            stat_q: summary_quantiles(&mut stat),
            max_term_q: summary_quantiles(&mut max_term),
            residual_q: summary_quantiles(&mut residual),
        });
    }
    out
}

/// Convenience: sorted successful statistics for one `n`.
pub fn statistics_for(res: &ExperimentResult, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = res
        .rows
        .iter()
        .filter(|r| r.n == n && !r.failed())
        .map(|r| r.statistic)
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[derive(Debug, Clone, Copy)]
pub struct RowError;

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "row failed")
    }
}

#[allow(dead_code)]
fn _assert_send<T: Send>() {}
const _: () = {
    fn check() {
        _assert_send::<ResultRow>();
        _assert_send::<Error>();
    }
};

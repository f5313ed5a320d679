//! Tail and integral condition evaluation and the asymptotic regime
//! classifier.
//!
//! Boundedness of the normalized deviation is decided by whether
//! `g(t) = t · Pr{Ψ(X) > norming(t)}` stays bounded; the almost sure
//! dichotomy by whether `∫ Pr{Ψ(X) > norming(t)} dt` converges.  Both are
//! limit statements, so the numeric verdicts here are trend classifications
//! on finite log grids with declared tolerances: a condition "holds" when
//! the fitted log-log slope over the top three decades of a `[1e2, 1e16]`
//! scan is at most 0.02 and the trace never exceeds a thousand times its
//! starting value; the integral converges or diverges when the fitted local
//! exponent of the integrand at the `1e12` horizon is clearly below or
//! above -1, with a log-correction fit deciding the near-critical band and
//! an explicit inconclusive verdict when even that is ambiguous.

use crate::bandwidths::{fit_tail, linear_fit, log_grid, BandForm, BandSequence, LargeNorming, Norming};
use crate::densities::{ln_weight_tail, weighted_norms, DensityFamily, DensityModel, WeightSpec};
use crate::kernels::KernelSpec;
use crate::quad::integrate;
use crate::Result;

const SCAN_LO: f64 = 1e2;
const SCAN_HI: f64 = 1e16;
const SCAN_POINTS: usize = 1401;
const SLOPE_TOL: f64 = 0.02;
const GROWTH_CAP_LN: f64 = 6.907_755_278_982_137; // ln 1e3
const EXPONENT_BAND: f64 = 0.02;

/// Trace of `g(t) = t · Pr{Ψ(X) > norming(t)}` on a log grid.
#[derive(Debug, Clone)]
pub struct ScanTrace {
    pub ln_t: Vec<f64>,
    /// `ln g`; `-inf` marks exact zeros.
    pub ln_g: Vec<f64>,
    /// Fitted slope of `ln g` against `ln t` over the top three decades.
    pub slope: f64,
    /// `max ln g - ln g(start)`.
    pub max_growth_ln: f64,
    /// Whether the boundedness condition holds numerically.
    pub holds: bool,
}

/// Evaluate the boundedness condition trace for a weight and norming.
pub fn condition_scan(
    m: &DensityModel,
    w: &WeightSpec,
    norming: Norming<'_>,
) -> Result<ScanTrace> {
    let grid = log_grid(SCAN_LO, SCAN_HI, SCAN_POINTS);
    let mut ln_t = Vec::with_capacity(grid.len());
    let mut ln_g = Vec::with_capacity(grid.len());
    for &t in &grid {
        let ln_norm = norming.ln_value(t)?;
        ln_t.push(t.ln());
        ln_g.push(t.ln() + ln_weight_tail(m, w, ln_norm));
    }
    let finite: Vec<(f64, f64)> = ln_t
        .iter()
        .zip(&ln_g)
        .filter(|(_, g)| g.is_finite())
        .map(|(&t, &g)| (t, g))
        .collect();
    let (slope, max_growth_ln) = if finite.len() < 2 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        let xs: Vec<f64> = finite.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = finite.iter().map(|p| p.1).collect();
        let cut = SCAN_HI.ln() - 3.0 * 10f64.ln();
        let (slope, _) = fit_tail(&xs, &ys, cut);
        let base = ys[0];
        let growth = ys.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - base;
        (slope, growth)
    };
    let holds = slope <= SLOPE_TOL && max_growth_ln <= GROWTH_CAP_LN;
    Ok(ScanTrace { ln_t, ln_g, slope, max_growth_ln, holds })
}

/// Theorem-backed tightness verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tightness {
    Bounded,
    Unbounded,
    /// The hypotheses behind the verdict do not apply; the raw condition
    /// trace is still reported.
    Inapplicable,
}

#[derive(Debug, Clone)]
pub struct TightnessReport {
    pub verdict: Tightness,
    pub scan: ScanTrace,
    pub note: Option<String>,
}

/// Boundedness check under the classical norming scale.
///
/// The condition trace is evaluated for any weight; the verdict is
/// `Inapplicable` when the model violates the local regularity conditions
/// or the weight exponent is outside `(0, 1/2)`.
pub fn check_tightness_classical(
    m: &DensityModel,
    w: &WeightSpec,
    seq: &BandSequence,
) -> Result<TightnessReport> {
    let scan = condition_scan(m, w, Norming::Classical(seq))?;
    let (verdict, note) = if !m.satisfies_local_regularity() {
        (
            Tightness::Inapplicable,
            Some("model violates the local density regularity assumptions".to_string()),
        )
    } else if !(w.beta() > 0.0 && w.beta() < 0.5) {
        (
            Tightness::Inapplicable,
            Some(format!(
                "classical-norming boundedness covers weight exponents in (0, 1/2); got {}",
                w.beta()
            )),
        )
    } else if scan.holds {
        (Tightness::Bounded, None)
    } else {
        (Tightness::Unbounded, None)
    };
    Ok(TightnessReport { verdict, scan, note })
}

/// Boundedness check under an explicit large norming.
pub fn check_tightness_large(
    m: &DensityModel,
    w: &WeightSpec,
    seq: &BandSequence,
    dnorm: &LargeNorming,
) -> Result<TightnessReport> {
    let scan = condition_scan(m, w, Norming::Large(dnorm))?;
    let (verdict, note) = if !m.satisfies_local_regularity() {
        (
            Tightness::Inapplicable,
            Some("model violates the local density regularity assumptions".to_string()),
        )
    } else if w.beta() == 0.0 {
        (
            Tightness::Inapplicable,
            Some("large-norming results need a positive weight exponent".to_string()),
        )
    } else if let Err(e) = dnorm.validate_for(seq, w.beta()) {
        (Tightness::Inapplicable, Some(e.to_string()))
    } else if scan.holds {
        (Tightness::Bounded, None)
    } else {
        (Tightness::Unbounded, None)
    };
    Ok(TightnessReport { verdict, scan, note })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralVerdict {
    Converges,
    Diverges,
    /// Neither the exponent fit nor the log-correction fit is decisive.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct IntegralReport {
    pub verdict: IntegralVerdict,
    /// `∫ Pr{Ψ(X) > norming(t)} dt` accumulated up to the 1e12 horizon
    /// (from the first index where the norming is defined).
    pub partial_integral: f64,
    /// Fitted log-log exponent of the integrand over the top decade.
    pub exponent: f64,
    /// Log-correction exponent from the near-critical fit, when used.
    pub log_exponent: Option<f64>,
}

/// Integral test deciding the almost sure dichotomy.
pub fn integral_test(
    m: &DensityModel,
    w: &WeightSpec,
    norming: Norming<'_>,
) -> Result<IntegralReport> {
    const HORIZON: f64 = 1e12;
    let grid = log_grid(crate::bandwidths::T_MIN, HORIZON, 1201);
    // skip any initial region where the norming is undefined (h_t >= 1)
    let mut start = None;
    for (i, &t) in grid.iter().enumerate() {
        if norming.ln_value(t).is_ok() {
            start = Some(i);
            break;
        }
    }
    let start = start.ok_or_else(|| crate::Error::InvalidNorming(
        "norming undefined over the whole scan horizon".into(),
    ))?;
    let ln_p = |t: f64| -> f64 {
        match norming.ln_value(t) {
            Ok(v) => ln_weight_tail(m, w, v),
            Err(_) => 0.0,
        }
    };
    // piecewise adaptive quadrature on the log scale, cell by cell
    let mut total = 0.0;
    for win in grid[start..].windows(2) {
        let (a, b) = (win[0].ln(), win[1].ln());
        total += integrate(&|s: f64| (s + ln_p(s.exp())).exp(), a, b, 1e-10)?;
    }
    // local exponent at the horizon: top decade
    let tail_grid = log_grid(HORIZON / 1e2, HORIZON, 401);
    let ln_t: Vec<f64> = tail_grid.iter().map(|t| t.ln()).collect();
    let ln_pv: Vec<f64> = tail_grid.iter().map(|&t| ln_p(t)).collect();
    if ln_pv.iter().any(|v| !v.is_finite()) {
        // the integrand has already underflowed to zero: converged
        return Ok(IntegralReport {
            verdict: IntegralVerdict::Converges,
            partial_integral: total,
            exponent: f64::NEG_INFINITY,
            log_exponent: None,
        });
    }
    let cut = (HORIZON / 10.0).ln();
    let (exponent, _) = fit_tail(&ln_t, &ln_pv, cut);
    let verdict;
    let mut log_exponent = None;
    if exponent < -1.0 - EXPONENT_BAND {
        verdict = IntegralVerdict::Converges;
    } else if exponent > -1.0 + EXPONENT_BAND {
        verdict = IntegralVerdict::Diverges;
    } else {
        // near-critical: fit ln p + ln t against ln ln t on the top two decades
        let xs: Vec<f64> = ln_t.iter().map(|&lt| lt.ln()).collect();
        let ys: Vec<f64> = ln_t.iter().zip(&ln_pv).map(|(&lt, &lp)| lp + lt).collect();
        let (q, _) = linear_fit(&xs, &ys);
        log_exponent = Some(q);
        verdict = if q < -1.0 - EXPONENT_BAND {
            IntegralVerdict::Converges
        } else if q > -1.0 + EXPONENT_BAND {
            IntegralVerdict::Diverges
        } else {
            IntegralVerdict::Inconclusive
        };
    }
    Ok(IntegralReport { verdict, partial_integral: total, exponent, log_exponent })
}

/// Distributional limit shapes the classifier can name.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitLaw {
    Constant { value: f64 },
    /// `max(scale · Z^beta, floor)` with the Fréchet-type
    /// `Pr{Z ≤ t} = e^{-2/t}` of the scaled extreme inverse density of the
    /// symmetric exponential model.
    MaxFrechetPower { scale: f64, floor: f64, beta: f64 },
}

impl LimitLaw {
    pub fn cdf(&self, t: f64) -> f64 {
        match *self {
            LimitLaw::Constant { value } => {
                if t >= value {
                    1.0
                } else {
                    0.0
                }
            }
            LimitLaw::MaxFrechetPower { scale, floor, beta } => {
                if t <= 0.0 || t < floor {
                    0.0
                } else {
                    (-2.0 * (t / scale).powf(-1.0 / beta)).exp()
                }
            }
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        debug_assert!(p > 0.0 && p < 1.0);
        match *self {
            LimitLaw::Constant { value } => value,
            LimitLaw::MaxFrechetPower { scale, floor, beta } => {
                let z = scale * (2.0 / -p.ln()).powf(beta);
                z.max(floor)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormingKind {
    Classical,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsBehavior {
    ConvergesToConstant,
    LimsupInfinite,
    ConvergesToZero,
    Inapplicable,
}

/// The theorem-mandated verdict with the condition evaluations backing it.
#[derive(Debug, Clone)]
pub struct RegimePrediction {
    pub norming: NormingKind,
    pub tightness: Tightness,
    pub as_behavior: AsBehavior,
    pub limit_constant: Option<f64>,
    pub limit_law: Option<LimitLaw>,
    pub tightness_report: Option<TightnessReport>,
    pub integral_report: Option<IntegralReport>,
    pub notes: Vec<String>,
}

impl RegimePrediction {
    fn refused(norming: NormingKind, note: String, tr: Option<TightnessReport>) -> Self {
        RegimePrediction {
            norming,
            tightness: Tightness::Inapplicable,
            as_behavior: AsBehavior::Inapplicable,
            limit_constant: None,
            limit_law: None,
            tightness_report: tr,
            integral_report: None,
            notes: vec![note],
        }
    }
}

fn has_full_support(m: &DensityModel) -> bool {
    m.support() == vec![(f64::NEG_INFINITY, f64::INFINITY)]
}

/// Classify the asymptotic regime of the deviation statistic for the given
/// model, weight, kernel and norming.
pub fn classify_regime(
    m: &DensityModel,
    w: &WeightSpec,
    k: &KernelSpec,
    seq: &BandSequence,
    dnorm: Option<&LargeNorming>,
) -> Result<RegimePrediction> {
    let beta = w.beta();
    let norming_kind = if dnorm.is_some() { NormingKind::Large } else { NormingKind::Classical };
    if !m.satisfies_local_regularity() {
        // still surface the raw condition trace as evidence
        let tr = match dnorm {
            Some(d) => check_tightness_large(m, w, seq, d).ok(),
            None => check_tightness_classical(m, w, seq).ok(),
        };
        return Ok(RegimePrediction::refused(
            norming_kind,
            "prediction refused: the density violates the local regularity conditions \
             (smoothness of log f under small shifts, positivity away from the tails) \
             that the boundedness and dichotomy theorems assume; with such densities the \
             statistic is driven by the local behavior at the irregular points and the \
             tail condition alone does not decide boundedness"
                .to_string(),
            tr,
        ));
    }
    match dnorm {
        Some(d) => {
            if beta == 0.0 {
                return Ok(RegimePrediction::refused(
                    norming_kind,
                    "large-norming results need a positive weight exponent".into(),
                    None,
                ));
            }
            if let Err(e) = d.validate_for(seq, beta) {
                return Ok(RegimePrediction::refused(
                    norming_kind,
                    format!("large norming rejected: {e}"),
                    None,
                ));
            }
            let tr = check_tightness_large(m, w, seq, d)?;
            let ir = integral_test(m, w, Norming::Large(d))?;
            let mut notes = Vec::new();
            let (as_behavior, limit_constant) = match ir.verdict {
                IntegralVerdict::Converges => (AsBehavior::ConvergesToZero, Some(0.0)),
                IntegralVerdict::Diverges => (AsBehavior::LimsupInfinite, None),
                IntegralVerdict::Inconclusive => {
                    notes.push("integral test inconclusive near the critical exponent".into());
                    (AsBehavior::Inapplicable, None)
                }
            };
            let limit_law = if tr.verdict == Tightness::Bounded
                && matches!(m.family(), DensityFamily::SymExponential)
                && w.scale() == 1.0
                && d.p == 0.0
                && (d.gamma - beta).abs() < 1e-12
            {
                Some(LimitLaw::MaxFrechetPower {
                    scale: k.sup_norm() / d.coef,
                    floor: 0.0,
                    beta,
                })
            } else {
                None
            };
            Ok(RegimePrediction {
                norming: NormingKind::Large,
                tightness: tr.verdict,
                as_behavior,
                limit_constant,
                limit_law,
                tightness_report: Some(tr),
                integral_report: Some(ir),
                notes,
            })
        }
        None => classify_classical(m, w, k, seq, beta),
    }
}

fn classify_classical(
    m: &DensityModel,
    w: &WeightSpec,
    k: &KernelSpec,
    seq: &BandSequence,
    beta: f64,
) -> Result<RegimePrediction> {
    let mut notes = Vec::new();
    if beta == 0.0 {
        // degenerate unit weight: the unweighted sup converges to
        // ‖K‖₂ ‖f‖_∞^{1/2}
        let scan = condition_scan(m, w, Norming::Classical(seq))?;
        let constant = k.l2_norm() * w.scale() * m.sup_norm().sqrt();
        return Ok(RegimePrediction {
            norming: NormingKind::Classical,
            tightness: Tightness::Bounded,
            as_behavior: AsBehavior::ConvergesToConstant,
            limit_constant: Some(constant),
            limit_law: Some(LimitLaw::Constant { value: constant }),
            tightness_report: Some(TightnessReport {
                verdict: Tightness::Bounded,
                scan,
                note: Some("degenerate bounded weight".into()),
            }),
            integral_report: None,
            notes: vec!["weight exponent zero: bounded weight, unweighted limit".into()],
        });
    }
    if (beta - 0.5).abs() < 1e-12 {
        if has_full_support(m) {
            let ir = integral_test(m, w, Norming::Classical(seq))?;
            let as_behavior = match ir.verdict {
                IntegralVerdict::Diverges => AsBehavior::LimsupInfinite,
                _ => AsBehavior::Inapplicable,
            };
            return Ok(RegimePrediction {
                norming: NormingKind::Classical,
                tightness: Tightness::Unbounded,
                as_behavior,
                limit_constant: None,
                limit_law: None,
                tightness_report: None,
                integral_report: Some(ir),
                notes: vec![
                    "critical weight exponent 1/2 with full support: the normalized \
                     statistic is never stochastically bounded"
                        .into(),
                ],
            });
        }
        return Ok(RegimePrediction::refused(
            NormingKind::Classical,
            "weight exponent 1/2 outside the full-support case is not classified".into(),
            None,
        ));
    }
    if beta > 0.5 {
        return Ok(RegimePrediction::refused(
            NormingKind::Classical,
            "classical norming covers weight exponents below 1/2; use a large norming".into(),
            None,
        ));
    }
    // 0 < beta < 1/2
    let central = weighted_norms(m, w).0.map(|f| k.l2_norm() * f);
    // boundary lookup for slow stretched-exponential tails at the critical
    // bandwidth exponent, where the enumerated sub-case outcomes replace
    // the generic trend classification
    if let DensityFamily::ExpTail { r, .. } = m.family() {
        if r < 1.0 {
            if let BandForm::Power { alpha } = seq.form() {
                if (2.0 * beta - (1.0 - alpha)).abs() < 1e-12 {
                    return classify_exp_tail_boundary(m, w, seq, beta, r, central);
                }
            }
        }
    }
    let tr = check_tightness_classical(m, w, seq)?;
    let ir = integral_test(m, w, Norming::Classical(seq))?;
    let mut limit_constant = None;
    let mut limit_law = None;
    let as_behavior = match (tr.verdict, ir.verdict) {
        (Tightness::Bounded, IntegralVerdict::Converges) => {
            limit_constant = central;
            limit_law = central.map(|value| LimitLaw::Constant { value });
            AsBehavior::ConvergesToConstant
        }
        (Tightness::Bounded, IntegralVerdict::Diverges) => {
            // tight but not almost surely convergent; a distributional limit
            // exists exactly when the max term stabilizes in law
            if matches!(m.family(), DensityFamily::SymExponential) && w.scale() == 1.0 {
                if let BandForm::MaxTermCritical { beta: b } = seq.form() {
                    if (b - beta).abs() < 1e-12 {
                        limit_law = Some(LimitLaw::MaxFrechetPower {
                            scale: k.sup_norm() / (2.0 * (1.0 - 2.0 * beta)).sqrt(),
                            floor: k.l2_norm() / 2f64.powf(0.5 - beta),
                            beta,
                        });
                    }
                }
            }
            if limit_law.is_none() {
                notes.push(
                    "stochastically bounded with a divergent tail integral: no closed-form \
                     max-term law for this configuration, distributional behavior is \
                     empirical-only"
                        .into(),
                );
            }
            AsBehavior::LimsupInfinite
        }
        (Tightness::Unbounded, _) => AsBehavior::LimsupInfinite,
        (_, IntegralVerdict::Inconclusive) => {
            notes.push("integral test inconclusive near the critical exponent".into());
            AsBehavior::Inapplicable
        }
        (Tightness::Inapplicable, _) => AsBehavior::Inapplicable,
    };
    Ok(RegimePrediction {
        norming: NormingKind::Classical,
        tightness: tr.verdict,
        as_behavior,
        limit_constant,
        limit_law,
        tightness_report: Some(tr),
        integral_report: Some(ir),
        notes,
    })
}

/// Enumerated sub-case outcomes for stretched-exponential tails (`r < 1`)
/// at the critical bandwidth exponent `2β = 1 - α`, decided by
/// `q = (1-r)/r - 1/(2β)`.
fn classify_exp_tail_boundary(
    m: &DensityModel,
    w: &WeightSpec,
    seq: &BandSequence,
    beta: f64,
    r: f64,
    central: Option<f64>,
) -> Result<RegimePrediction> {
    let q = (1.0 - r) / r - 1.0 / (2.0 * beta);
    let scan = condition_scan(m, w, Norming::Classical(seq))?;
    let (tightness, as_behavior, limit_constant, note): (_, _, Option<f64>, String) =
        if q > 1e-9 {
            (
                Tightness::Unbounded,
                AsBehavior::LimsupInfinite,
                None,
                format!("critical-bandwidth sub-case q = {q:.4} > 0: not stochastically bounded"),
            )
        } else if q.abs() <= 1e-9 {
            (
                Tightness::Bounded,
                AsBehavior::LimsupInfinite,
                None,
                "critical-bandwidth sub-case q = 0: converges in distribution to an \
                 unbounded max-term law (not shipped in closed form)"
                    .to_string(),
            )
        } else if q < -1.0 {
            (
                Tightness::Bounded,
                AsBehavior::ConvergesToConstant,
                central,
                format!("critical-bandwidth sub-case q = {q:.4} < -1: almost sure constant limit"),
            )
        } else {
            (
                Tightness::Bounded,
                AsBehavior::LimsupInfinite,
                central,
                format!(
                    "critical-bandwidth sub-case q = {q:.4} in [-1, 0): converges in \
                     probability to the constant but the almost sure limsup is infinite"
                ),
            )
        };
    Ok(RegimePrediction {
        norming: NormingKind::Classical,
        tightness,
        as_behavior,
        limit_constant,
        limit_law: limit_constant.map(|value| LimitLaw::Constant { value }),
        tightness_report: Some(TightnessReport {
            verdict: tightness,
            scan,
            note: Some(note.clone()),
        }),
        integral_report: None,
        notes: vec![note],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandwidths::BandForm;
    use crate::densities::weight_tail;
    use crate::kernels::KernelFamily;

    fn boxcar() -> KernelSpec {
        KernelSpec::new(KernelFamily::Boxcar, 1).unwrap()
    }

    fn band(alpha: f64) -> BandSequence {
        BandSequence::new(BandForm::Power { alpha }, 1).unwrap()
    }

    #[test]
    fn classical_tightness_examples() {
        let m = DensityModel::sym_exponential();
        let seq = band(0.4);
        let r1 = check_tightness_classical(&m, &WeightSpec::new(0.2).unwrap(), &seq).unwrap();
        assert_eq!(r1.verdict, Tightness::Bounded, "{:?}", r1.scan.slope);
        let r2 = check_tightness_classical(&m, &WeightSpec::new(0.4).unwrap(), &seq).unwrap();
        assert_eq!(r2.verdict, Tightness::Unbounded, "{:?}", r2.scan.slope);
        // boundary of the power-tail criterion: β = (r-1)/r · (1-α)/2 = 0.2
        let pt = DensityModel::power_tail(3.0).unwrap();
        let r3 = check_tightness_classical(&pt, &WeightSpec::new(0.2).unwrap(), &seq).unwrap();
        assert_eq!(r3.verdict, Tightness::Bounded, "{:?}", r3.scan.slope);
    }

    #[test]
    fn large_tightness_examples() {
        let m = DensityModel::sym_exponential();
        let seq = band(0.4);
        let d = LargeNorming::new(1.0, 0.7, 0.0).unwrap();
        let r = check_tightness_large(&m, &WeightSpec::new(0.7).unwrap(), &seq, &d).unwrap();
        assert_eq!(r.verdict, Tightness::Bounded);

        // β = 1 with d_t = t: the trace is exactly t · min(1, 2/t) = 2
        let d1 = LargeNorming::new(1.0, 1.0, 0.0).unwrap();
        let r1 = check_tightness_large(&m, &WeightSpec::new(1.0).unwrap(), &seq, &d1).unwrap();
        assert_eq!(r1.verdict, Tightness::Bounded);
        for (&lt, &lg) in r1.scan.ln_t.iter().zip(&r1.scan.ln_g) {
            let _ = lt;
            assert!((lg - 2.0_f64.ln()).abs() < 1e-9);
        }

        // weight exponents above 1 are rejected at construction
        assert!(WeightSpec::new(1.2).is_err());
    }

    #[test]
    fn large_tightness_unbounded_when_norming_too_slow() {
        // β = 0.7 needs γ ≥ 0.7; γ = 0.72 with tail exponent 1/β ≈ 1.43
        // gives g(t) ≈ t · d_t^{-1/β} = t^{1-0.72/0.7}, slowly growing
        let m = DensityModel::sym_exponential();
        let seq = band(0.4);
        let d = LargeNorming::new(0.05, 0.7, 0.0).unwrap();
        // coef < 1 shifts the trace up but boundedness is scale-free;
        // the verdict stays bounded
        let r = check_tightness_large(&m, &WeightSpec::new(0.7).unwrap(), &seq, &d).unwrap();
        assert_eq!(r.verdict, Tightness::Bounded);
        // a slower-than-floor norming is inapplicable, not unbounded
        let slow = LargeNorming::new(1.0, 0.55, 0.0).unwrap();
        let r2 = check_tightness_large(&m, &WeightSpec::new(0.7).unwrap(), &seq, &slow).unwrap();
        assert_eq!(r2.verdict, Tightness::Inapplicable);
        assert!(!r2.scan.holds);
    }

    #[test]
    fn integral_examples() {
        let m = DensityModel::sym_exponential();
        let w = WeightSpec::new(0.25).unwrap();
        let seq = band(0.4);
        let ir = integral_test(&m, &w, Norming::Classical(&seq)).unwrap();
        assert_eq!(ir.verdict, IntegralVerdict::Converges);
        assert!((ir.exponent + 1.2).abs() < 0.1, "{}", ir.exponent);
        // closed-form oracle for the integrand: 2 (t^0.6 · 0.4 ln t)^{-2}
        let t = 1e8;
        let lam = seq.classical_norming(t).unwrap();
        let p = weight_tail(&m, &w, lam);
        let oracle = 2.0 * (t.powf(0.6) * 0.4 * t.ln()).powi(-2);
        assert!((p - oracle).abs() < 1e-10 * oracle);
    }

    #[test]
    fn integral_near_critical_normings() {
        let m = DensityModel::sym_exponential();
        let w = WeightSpec::new(0.7).unwrap();
        // d_t = (t (log t)^2)^0.7: Pr{Ψ > d_t} = 2/(t (log t)^2), converges
        let d_conv = LargeNorming::new(1.0, 0.7, 1.4).unwrap();
        let ir = integral_test(&m, &w, Norming::Large(&d_conv)).unwrap();
        assert_eq!(ir.verdict, IntegralVerdict::Converges);
        // d_t = t^0.7: Pr{Ψ > d_t} = 2/t, harmonic, diverges
        let d_div = LargeNorming::new(1.0, 0.7, 0.0).unwrap();
        let ir2 = integral_test(&m, &w, Norming::Large(&d_div)).unwrap();
        assert_eq!(ir2.verdict, IntegralVerdict::Diverges);
        assert!((ir2.exponent + 1.0).abs() < EXPONENT_BAND);
        assert!(ir2.log_exponent.unwrap().abs() < 0.1);
        // partial integral of 2/t from 2 to 1e12 is 2 ln(1e12/2)
        let oracle = 2.0 * (1e12_f64 / 2.0).ln();
        assert!(
            (ir2.partial_integral - oracle).abs() < 1e-4 * oracle,
            "{} vs {oracle}",
            ir2.partial_integral
        );
    }

    #[test]
    fn classify_constant_regime() {
        let m = DensityModel::sym_exponential();
        let pred = classify_regime(
            &m,
            &WeightSpec::new(0.25).unwrap(),
            &boxcar(),
            &band(0.4),
            None,
        )
        .unwrap();
        assert_eq!(pred.tightness, Tightness::Bounded);
        assert_eq!(pred.as_behavior, AsBehavior::ConvergesToConstant);
        assert!((pred.limit_constant.unwrap() - 2f64.powf(-0.25)).abs() < 1e-12);
    }

    #[test]
    fn classify_critical_bandwidth_law() {
        let m = DensityModel::sym_exponential();
        let seq = BandSequence::new(BandForm::MaxTermCritical { beta: 0.25 }, 1).unwrap();
        let pred = classify_regime(
            &m,
            &WeightSpec::new(0.25).unwrap(),
            &boxcar(),
            &seq,
            None,
        )
        .unwrap();
        assert_eq!(pred.tightness, Tightness::Bounded);
        assert_eq!(pred.as_behavior, AsBehavior::LimsupInfinite);
        match pred.limit_law.unwrap() {
            LimitLaw::MaxFrechetPower { scale, floor, beta } => {
                assert!((scale - 1.0).abs() < 1e-12);
                assert!((floor - 2f64.powf(-0.25)).abs() < 1e-12);
                assert!((beta - 0.25).abs() < 1e-15);
            }
            other => panic!("unexpected law {other:?}"),
        }
    }

    #[test]
    fn classify_critical_weight_unbounded() {
        let m = DensityModel::sym_exponential();
        let pred = classify_regime(
            &m,
            &WeightSpec::new(0.5).unwrap(),
            &boxcar(),
            &band(0.4),
            None,
        )
        .unwrap();
        assert_eq!(pred.tightness, Tightness::Unbounded);
        assert_eq!(pred.as_behavior, AsBehavior::LimsupInfinite);
    }

    #[test]
    fn classify_large_norming_regimes() {
        let m = DensityModel::sym_exponential();
        let w = WeightSpec::new(0.7).unwrap();
        let seq = band(0.4);
        let d = LargeNorming::new(1.0, 0.7, 0.0).unwrap();
        let pred = classify_regime(&m, &w, &boxcar(), &seq, Some(&d)).unwrap();
        assert_eq!(pred.tightness, Tightness::Bounded);
        assert_eq!(pred.as_behavior, AsBehavior::LimsupInfinite);
        match pred.limit_law.unwrap() {
            LimitLaw::MaxFrechetPower { scale, floor, beta } => {
                assert_eq!(floor, 0.0);
                assert!((scale - 1.0).abs() < 1e-12);
                assert!((beta - 0.7).abs() < 1e-15);
            }
            other => panic!("unexpected law {other:?}"),
        }
        let d_conv = LargeNorming::new(1.0, 0.7, 1.4).unwrap();
        let pred2 = classify_regime(&m, &w, &boxcar(), &seq, Some(&d_conv)).unwrap();
        assert_eq!(pred2.as_behavior, AsBehavior::ConvergesToZero);
        assert_eq!(pred2.limit_constant, Some(0.0));
    }

    #[test]
    fn classify_refuses_counterexample_models() {
        for m in [
            DensityModel::super_exp_tail(),
            DensityModel::zero_at_origin(2.0, 1.0).unwrap(),
        ] {
            let pred = classify_regime(
                &m,
                &WeightSpec::new(0.25).unwrap(),
                &boxcar(),
                &band(0.4),
                None,
            )
            .unwrap();
            assert_eq!(pred.tightness, Tightness::Inapplicable);
            assert_eq!(pred.as_behavior, AsBehavior::Inapplicable);
            assert!(!pred.notes.is_empty());
            // the raw condition trace is still available
            assert!(pred.tightness_report.is_some());
        }
    }

    #[test]
    fn classify_degenerate_unit_weight() {
        let m = DensityModel::sym_exponential();
        let pred = classify_regime(
            &m,
            &WeightSpec::new(0.0).unwrap(),
            &boxcar(),
            &band(0.4),
            None,
        )
        .unwrap();
        assert_eq!(pred.as_behavior, AsBehavior::ConvergesToConstant);
        assert!((pred.limit_constant.unwrap() - 2f64.powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn limit_law_roundtrip() {
        let laws = [
            LimitLaw::MaxFrechetPower { scale: 1.0, floor: 0.0, beta: 1.0 },
            LimitLaw::MaxFrechetPower { scale: 0.4, floor: 0.0, beta: 0.25 },
            LimitLaw::MaxFrechetPower { scale: 2.0, floor: 0.0, beta: 0.7 },
        ];
        for law in laws {
            for i in 1..999 {
                let p = i as f64 / 1000.0;
                let q = law.quantile(p);
                assert!(
                    (law.cdf(q) - p).abs() < 1e-12,
                    "{law:?} p={p} q={q} cdf={}",
                    law.cdf(q)
                );
            }
        }
        // the unit-scale Fréchet quantile is -2/ln p
        let z = LimitLaw::MaxFrechetPower { scale: 1.0, floor: 0.0, beta: 1.0 };
        assert!((z.quantile(0.5) - 2.0 / std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn law_cdf_monotone_with_floor() {
        let law = LimitLaw::MaxFrechetPower { scale: 1.0, floor: 0.8409, beta: 0.25 };
        let mut prev = -1.0;
        for i in 0..400 {
            let t = i as f64 * 0.01;
            let c = law.cdf(t);
            assert!(c >= prev);
            assert!((0.0..=1.0).contains(&c));
            prev = c;
        }
        assert_eq!(law.cdf(0.84), 0.0);
        assert!(law.cdf(0.8409) > 0.0);
    }

    #[test]
    fn integral_convergence_implies_boundedness() {
        // nested-condition consistency across built-in scenarios
        let models = [
            DensityModel::sym_exponential(),
            DensityModel::exp_tail(1.0, 2.0).unwrap(),
            DensityModel::power_tail(3.0).unwrap(),
            DensityModel::normal(0.0, 1.0).unwrap(),
        ];
        for m in models {
            for &alpha in &[0.2, 0.4, 0.6, 0.8] {
                for &beta in &[0.1, 0.2, 0.3, 0.4] {
                    let w = WeightSpec::new(beta).unwrap();
                    let seq = band(alpha);
                    let ir = integral_test(&m, &w, Norming::Classical(&seq)).unwrap();
                    let tr = check_tightness_classical(&m, &w, &seq).unwrap();
                    if ir.verdict == IntegralVerdict::Converges {
                        assert_eq!(
                            tr.verdict,
                            Tightness::Bounded,
                            "alpha={alpha} beta={beta}"
                        );
                    }
                }
            }
        }
    }
}

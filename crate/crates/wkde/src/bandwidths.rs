//! Bandwidth sequences `t ↦ h_t`, the classical and large norming scales
//! derived from them, and numeric regular-variation validators.
//!
//! Everything works on a log grid over `t ∈ [2, 1e12]`; the validators are
//! finite-grid trend checks with declared tolerances, not proofs.  The
//! domain is restricted to `t ≥ 2` so `log t` and `|log h_t|` stay safely
//! positive for the built-in forms.

use crate::{Error, Result};

/// Smallest admissible index.
pub const T_MIN: f64 = 2.0;

/// Parametric bandwidth forms; `alpha` is the decay exponent of `h_t^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandForm {
    /// `h_t = t^{-alpha/d}`.
    Power { alpha: f64 },
    /// `h_t = (t^{-alpha} (log t)^{-p})^{1/d}`.
    PowerLog { alpha: f64, p: f64 },
    /// `h_t = (t^{1-2β} log t)^{-1}`, the scale at which the extreme
    /// sample term of the weighted deviation stabilizes in law (d = 1,
    /// β < 1/2).
    MaxTermCritical { beta: f64 },
}

/// A bandwidth sequence with its dimension.
#[derive(Debug, Clone, Copy)]
pub struct BandSequence {
    form: BandForm,
    dim: usize,
}

impl BandSequence {
    pub fn new(form: BandForm, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("bandwidth dimension must be >= 1".into()));
        }
        match form {
            BandForm::Power { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "power bandwidth requires alpha in (0, 1) (got {alpha})"
                    )));
                }
            }
            BandForm::PowerLog { alpha, .. } => {
                // alpha = 0 (purely logarithmic decay) is constructible so the
                // validator can demonstrate failure of the exponent band
                if !(0.0..1.0).contains(&alpha) {
                    return Err(Error::InvalidParameter(format!(
                        "power_log bandwidth requires alpha in [0, 1) (got {alpha})"
                    )));
                }
            }
            BandForm::MaxTermCritical { beta } => {
                if !(beta > 0.0 && beta < 0.5) {
                    return Err(Error::InvalidParameter(format!(
                        "max_term_critical bandwidth requires beta in (0, 1/2) (got {beta})"
                    )));
                }
                if dim != 1 {
                    return Err(Error::InvalidParameter(
                        "max_term_critical bandwidth is defined for d = 1".into(),
                    ));
                }
            }
        }
        Ok(BandSequence { form, dim })
    }

    pub fn form(&self) -> BandForm {
        self.form
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// log h_t, `t ≥ 2`.
    pub fn ln_h(&self, t: f64) -> f64 {
        debug_assert!(t >= T_MIN);
        let d = self.dim as f64;
        match self.form {
            BandForm::Power { alpha } => -alpha / d * t.ln(),
            BandForm::PowerLog { alpha, p } => -(alpha * t.ln() + p * t.ln().ln()) / d,
            BandForm::MaxTermCritical { beta } => {
                -((1.0 - 2.0 * beta) * t.ln() + t.ln().ln())
            }
        }
    }

    /// Bandwidth value `h_t`.
    pub fn h(&self, t: f64) -> f64 {
        self.ln_h(t).exp()
    }

    /// log of the classical norming scale `sqrt(t h_t^d |log h_t|)`;
    /// errors when `h_t ≥ 1` (the logarithm is not yet negative).
    pub fn ln_classical_norming(&self, t: f64) -> Result<f64> {
        let lh = self.ln_h(t);
        if lh >= 0.0 {
            return Err(Error::InvalidBandwidth { t, h: lh.exp() });
        }
        Ok(0.5 * (t.ln() + self.dim as f64 * lh + (-lh).ln()))
    }

    /// The classical norming scale `sqrt(t h_t^d |log h_t|)`.
    pub fn classical_norming(&self, t: f64) -> Result<f64> {
        Ok(self.ln_classical_norming(t)?.exp())
    }

    /// Normalizer `sqrt(2 n h_n^d |log h_n^d|)` of the deviation statistic;
    /// its square is exactly `2 d n h_n^d |log h_n|`.
    pub fn deviation_normalizer(&self, n: f64) -> Result<f64> {
        let lh = self.ln_h(n);
        if lh >= 0.0 {
            return Err(Error::InvalidBandwidth { t: n, h: lh.exp() });
        }
        let d = self.dim as f64;
        Ok((0.5 * ((2.0_f64).ln() + n.ln() + d * lh + (d * -lh).ln())).exp())
    }

    /// Grid scan of monotonicity and regular variation.
    pub fn validate(&self) -> RegVarReport {
        let grid = log_grid(T_MIN, 1e12, 10_000);
        let mut h1_ok = true;
        let mut prev_h = f64::INFINITY;
        let mut prev_nh = 0.0;
        let d = self.dim as f64;
        let mut ln_t = Vec::with_capacity(grid.len());
        let mut ln_hd = Vec::with_capacity(grid.len());
        for &t in &grid {
            let lh = self.ln_h(t);
            let h = lh.exp();
            let nh = t.ln() + d * lh; // log(t h_t^d)
            if h >= prev_h || nh <= prev_nh && t > grid[0] {
                h1_ok = false;
            }
            prev_h = h;
            prev_nh = nh;
            ln_t.push(t.ln());
            ln_hd.push(d * lh);
        }
        // exponent fitted on the top three decades
        let cut = 1e9_f64.ln();
        let (slope, max_residual) = fit_tail(&ln_t, &ln_hd, cut);
        let h2_ok = (-0.95..=-0.05).contains(&slope) && max_residual < 0.05;
        // growth exponent of the classical norming scale
        let lambda_exponent = if h2_ok {
            let ln_lam: Vec<f64> = grid
                .iter()
                .map(|&t| self.ln_classical_norming(t).unwrap_or(f64::NAN))
                .collect();
            if ln_lam.iter().all(|v| v.is_finite()) {
                Some(fit_tail(&ln_t, &ln_lam, cut).0)
            } else {
                None
            }
        } else {
            None
        };
        RegVarReport {
            exponent_estimate: slope,
            max_residual,
            h1_ok,
            h2_ok,
            lambda_exponent,
        }
    }

    /// Parse a config-file bandwidth description.
    pub fn parse(
        form: &str,
        dim: usize,
        get: &dyn Fn(&str) -> Option<f64>,
        weight_beta: f64,
    ) -> Result<Self> {
        let req = |key: &str| {
            get(key).ok_or_else(|| {
                Error::InvalidConfig(format!("bandwidth form `{form}` requires key `{key}`"))
            })
        };
        let parsed = match form {
            "power" => BandForm::Power { alpha: req("alpha")? },
            "power_log" => BandForm::PowerLog {
                alpha: req("alpha")?,
                p: req("p")?,
            },
            "max_term_critical" => BandForm::MaxTermCritical {
                beta: get("beta").unwrap_or(weight_beta),
            },
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown bandwidth form `{other}`"
                )))
            }
        };
        BandSequence::new(parsed, dim)
    }
}

/// Numeric regular-variation report.
#[derive(Debug, Clone)]
pub struct RegVarReport {
    /// Fitted log-log slope of `h_t^d` over the top three decades.
    pub exponent_estimate: f64,
    /// Worst absolute deviation from the fitted line on that window.
    pub max_residual: f64,
    /// Monotonicity scan: `h_t` strictly decreasing, `t h_t^d` strictly
    /// increasing.
    pub h1_ok: bool,
    /// Exponent inside `[-0.95, -0.05]` with residual below 0.05.
    pub h2_ok: bool,
    /// Fitted growth exponent of the classical norming scale, when defined.
    pub lambda_exponent: Option<f64>,
}

/// A faster-than-classical norming `d_t = coef · t^gamma (log t)^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeNorming {
    pub coef: f64,
    pub gamma: f64,
    pub p: f64,
}

impl LargeNorming {
    pub fn new(coef: f64, gamma: f64, p: f64) -> Result<Self> {
        if !(coef > 0.0) || !(gamma > 0.0) {
            return Err(Error::InvalidNorming(format!(
                "large norming requires coef > 0 and gamma > 0 (got coef = {coef}, gamma = {gamma})"
            )));
        }
        Ok(LargeNorming { coef, gamma, p })
    }

    pub fn ln_d(&self, t: f64) -> f64 {
        debug_assert!(t >= T_MIN);
        self.coef.ln() + self.gamma * t.ln() + self.p * t.ln().ln()
    }

    pub fn d(&self, t: f64) -> f64 {
        self.ln_d(t).exp()
    }

    /// Grid check of the large-norming hypotheses relative to a bandwidth
    /// sequence and weight exponent: `d_t` strictly increasing,
    /// `d_t / λ_t → ∞`, and `d_t ≥ C t^β` for some `C > 0`.
    pub fn validate_for(&self, band: &BandSequence, beta: f64) -> Result<()> {
        let grid = log_grid(T_MIN.max(10.0), 1e12, 2_000);
        let mut ln_t = Vec::with_capacity(grid.len());
        let mut ln_ratio = Vec::with_capacity(grid.len());
        let mut ln_d_shift = Vec::with_capacity(grid.len());
        let mut prev_d = f64::NEG_INFINITY;
        for &t in &grid {
            let ld = self.ln_d(t);
            if ld <= prev_d {
                return Err(Error::InvalidNorming(format!(
                    "norming is not strictly increasing near t = {t}"
                )));
            }
            prev_d = ld;
            let lam = band.ln_classical_norming(t)?;
            ln_t.push(t.ln());
            ln_ratio.push(ld - lam);
            ln_d_shift.push(ld - beta * t.ln());
        }
        let cut = 1e9_f64.ln();
        let (ratio_slope, _) = fit_tail(&ln_t, &ln_ratio, cut);
        if ratio_slope < 0.01 {
            return Err(Error::InvalidNorming(format!(
                "norming does not outgrow the classical scale (log-log slope {ratio_slope:.4})"
            )));
        }
        let (floor_slope, _) = fit_tail(&ln_t, &ln_d_shift, cut);
        if floor_slope < -0.005 {
            return Err(Error::InvalidNorming(format!(
                "norming falls below the t^beta floor (log-log slope {floor_slope:.4} for beta = {beta})"
            )));
        }
        Ok(())
    }

    pub fn parse(form: &str, get: &dyn Fn(&str) -> Option<f64>) -> Result<Self> {
        let coef = get("coef").unwrap_or(1.0);
        let req = |key: &str| {
            get(key).ok_or_else(|| {
                Error::InvalidConfig(format!("norming form `{form}` requires key `{key}`"))
            })
        };
        match form {
            "power" => LargeNorming::new(coef, req("gamma")?, 0.0),
            "power_log" => LargeNorming::new(coef, req("gamma")?, req("p")?),
            other => Err(Error::InvalidConfig(format!(
                "unknown norming form `{other}`"
            ))),
        }
    }
}

/// Either the classical norming scale of a bandwidth sequence or an
/// explicit large norming.
#[derive(Debug, Clone, Copy)]
pub enum Norming<'a> {
    Classical(&'a BandSequence),
    Large(&'a LargeNorming),
}

impl Norming<'_> {
    pub fn ln_value(&self, t: f64) -> Result<f64> {
        match self {
            Norming::Classical(b) => b.ln_classical_norming(t),
            Norming::Large(d) => Ok(d.ln_d(t)),
        }
    }
}

/// Log-spaced grid of `count` points on `[lo, hi]`.
pub(crate) fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    debug_assert!(count >= 2 && hi > lo && lo > 0.0);
    let llo = lo.ln();
    let lhi = hi.ln();
    (0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Least-squares line through `(xs, ys)`: returns `(slope, intercept)`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fit the points with `x ≥ cut`: returns `(slope, max |residual|)`.
pub(crate) fn fit_tail(xs: &[f64], ys: &[f64], cut: f64) -> (f64, f64) {
    let start = xs.partition_point(|&x| x < cut);
    let start = start.min(xs.len().saturating_sub(2));
    let (xs, ys) = (&xs[start..], &ys[start..]);
    let (slope, intercept) = linear_fit(xs, ys);
    let max_resid = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - slope * x - intercept).abs())
        .fold(0.0_f64, f64::max);
    (slope, max_resid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power04() -> BandSequence {
        BandSequence::new(BandForm::Power { alpha: 0.4 }, 1).unwrap()
    }

    #[test]
    fn power_evaluation() {
        let s = power04();
        assert!((s.h(1e5) - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn critical_form_evaluation() {
        let s = BandSequence::new(BandForm::MaxTermCritical { beta: 0.25 }, 1).unwrap();
        let e = std::f64::consts::E;
        assert!((s.h(e) - (-0.5_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn power_log_evaluation() {
        let s = BandSequence::new(BandForm::PowerLog { alpha: 0.5, p: 1.0 }, 1).unwrap();
        let t = std::f64::consts::E * std::f64::consts::E;
        assert!((s.h(t) - 0.5 * (-1.0_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn classical_norming_value() {
        let s = power04();
        let lam = s.classical_norming(1e5).unwrap();
        let oracle = (1e5 * 1e-2 * 100f64.ln()).sqrt();
        assert!((lam - oracle).abs() < 1e-9, "{lam} vs {oracle}");
        assert!((lam - 67.8614).abs() < 1e-3);
        let nz = s.deviation_normalizer(1e5).unwrap();
        assert!((nz - 2f64.sqrt() * lam).abs() < 1e-9);
        assert!((nz - 95.9706).abs() < 1e-3);
    }

    #[test]
    fn norming_rejects_h_at_least_one() {
        // the critical form starts above 1 for small t
        let s = BandSequence::new(BandForm::MaxTermCritical { beta: 0.25 }, 1).unwrap();
        assert!(s.h(2.0) >= 1.0);
        assert!(matches!(
            s.classical_norming(2.0),
            Err(Error::InvalidBandwidth { .. })
        ));
    }

    #[test]
    fn normalizer_square_identity() {
        for d in 1..=3 {
            let s = BandSequence::new(BandForm::Power { alpha: 0.4 }, d).unwrap();
            for &n in &[1e3, 1e6, 1e9] {
                let nz = s.deviation_normalizer(n).unwrap();
                let h = s.h(n);
                let exact = 2.0 * d as f64 * n * h.powi(d as i32) * h.ln().abs();
                assert!((nz * nz - exact).abs() < 1e-9 * exact);
            }
        }
    }

    #[test]
    fn validator_on_pure_power() {
        let r = power04().validate();
        assert!(r.h1_ok && r.h2_ok);
        assert!((r.exponent_estimate + 0.4).abs() < 1e-3);
        let le = r.lambda_exponent.unwrap();
        assert!(le > 0.0 && le < 1.0);
        assert!((le - 0.3).abs() < 0.02);
    }

    #[test]
    fn validator_on_power_log() {
        // slope regression oracle on the closed form: the fitted slope on
        // [1e9, 1e12] equals -0.5 - mean correction from the log factor
        let s = BandSequence::new(BandForm::PowerLog { alpha: 0.5, p: 1.0 }, 1).unwrap();
        let r = s.validate();
        assert!(r.h2_ok, "{r:?}");
        assert!((r.exponent_estimate + 0.5).abs() < 0.06, "{r:?}");
    }

    #[test]
    fn validator_rejects_slowly_varying() {
        // h_t = 1/log t: exponent indistinguishable from zero
        let s = BandSequence::new(BandForm::PowerLog { alpha: 0.0, p: 1.0 }, 1).unwrap();
        let r = s.validate();
        assert!(r.h1_ok);
        assert!(!r.h2_ok, "{r:?}");
        assert!(r.exponent_estimate.abs() < 0.05);
    }

    #[test]
    fn lambda_exponent_positive_for_valid_forms() {
        let forms = [
            BandForm::Power { alpha: 0.1 },
            BandForm::Power { alpha: 0.5 },
            BandForm::Power { alpha: 0.9 },
            BandForm::PowerLog { alpha: 0.5, p: 1.0 },
            BandForm::MaxTermCritical { beta: 0.25 },
            BandForm::MaxTermCritical { beta: 0.05 },
        ];
        for f in forms {
            let s = BandSequence::new(f, 1).unwrap();
            let r = s.validate();
            if let Some(le) = r.lambda_exponent {
                assert!(le > 0.0 && le < 1.0, "{f:?}: {le}");
            } else {
                assert!(!r.h2_ok);
            }
        }
    }

    #[test]
    fn large_norming_accepts_valid_and_rejects_slow() {
        let band = power04();
        let d = LargeNorming::new(1.0, 0.7, 0.0).unwrap();
        d.validate_for(&band, 0.7).unwrap();
        // boundary case d_t = t^beta exactly passes the floor check
        let d2 = LargeNorming::new(1.0, 0.7, 1.4).unwrap();
        d2.validate_for(&band, 0.7).unwrap();
        // gamma below the lambda exponent: does not outgrow the classical scale
        let slow = LargeNorming::new(1.0, 0.2, 0.0).unwrap();
        assert!(slow.validate_for(&band, 0.2).is_err());
        // gamma below beta: violates the floor
        let low = LargeNorming::new(1.0, 0.5, 0.0).unwrap();
        assert!(low.validate_for(&band, 0.7).is_err());
    }

    #[test]
    fn constructor_rejections() {
        assert!(BandSequence::new(BandForm::Power { alpha: 1.0 }, 1).is_err());
        assert!(BandSequence::new(BandForm::Power { alpha: 0.4 }, 0).is_err());
        assert!(BandSequence::new(BandForm::MaxTermCritical { beta: 0.5 }, 1).is_err());
        assert!(BandSequence::new(BandForm::MaxTermCritical { beta: 0.25 }, 2).is_err());
        assert!(LargeNorming::new(0.0, 1.0, 0.0).is_err());
    }
}

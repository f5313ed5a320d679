//! Kernel functions supported on `[-1/2, 1/2]^d` with exact norms.
//!
//! Every family is a probability kernel (`‖K‖₁ = 1`) rescaled from its
//! familiar `[-1, 1]` parameterization to the half-unit cube, so that the
//! multivariate version is the product of one-dimensional factors and all
//! norms factor across dimensions.  The families form a closed whitelist of
//! indicator and polynomial-times-indicator shapes; arbitrary user kernels
//! are out of scope.

use crate::{Error, Result};

/// One-dimensional kernel shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// Indicator of `[-1/2, 1/2]`.
    Boxcar,
    /// `2 (1 - 2|u|)_+`.
    Triangular,
    /// `(3/2) (1 - 4u²)_+`.
    Epanechnikov,
}

impl KernelFamily {
    /// Evaluate the one-dimensional factor at `u`.
    pub fn eval_1d(self, u: f64) -> f64 {
        let a = u.abs();
        if a > 0.5 {
            return 0.0;
        }
        match self {
            KernelFamily::Boxcar => 1.0,
            KernelFamily::Triangular => 2.0 * (1.0 - 2.0 * a),
            KernelFamily::Epanechnikov => 1.5 * (1.0 - 4.0 * u * u),
        }
    }

    fn norms_1d(self) -> (f64, f64, f64) {
        match self {
            KernelFamily::Boxcar => (1.0, 1.0, 1.0),
            // ∫ 4(1-2|u|)² = 4/3 on the support
            KernelFamily::Triangular => (1.0, (4.0_f64 / 3.0).sqrt(), 2.0),
            // ∫ (9/4)(1-4u²)² = 6/5 on the support
            KernelFamily::Epanechnikov => (1.0, (6.0_f64 / 5.0).sqrt(), 1.5),
        }
    }

    /// 1d kink locations inside the open support, used to split quadratures.
    pub(crate) fn breakpoints_1d(self) -> &'static [f64] {
        match self {
            KernelFamily::Triangular => &[0.0],
            _ => &[],
        }
    }

    /// Parse a config-file family name.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "boxcar" => Ok(KernelFamily::Boxcar),
            "triangular" => Ok(KernelFamily::Triangular),
            "epanechnikov" => Ok(KernelFamily::Epanechnikov),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel family `{other}` (expected boxcar, triangular or epanechnikov)"
            ))),
        }
    }
}

/// A `d`-dimensional product kernel with its exact norms.
///
/// Immutable after construction; safe to share across worker threads.
#[derive(Debug, Clone, Copy)]
pub struct KernelSpec {
    family: KernelFamily,
    dim: usize,
    l1: f64,
    l2: f64,
    sup: f64,
}

impl KernelSpec {
    /// Half-width of the support cube.
    pub const SUPPORT_HALFWIDTH: f64 = 0.5;

    /// Build a kernel; `dim > 1` yields the product of 1d factors.
    pub fn new(family: KernelFamily, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("kernel dimension must be >= 1".into()));
        }
        let (l1, l2, sup) = family.norms_1d();
        let d = dim as i32;
        Ok(KernelSpec {
            family,
            dim,
            l1: l1.powi(d),
            l2: l2.powi(d),
            sup: sup.powi(d),
        })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `κ = ‖K‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1
    }

    /// The three norms `(‖K‖₁, ‖K‖₂, ‖K‖_∞)`.
    pub fn norms(&self) -> (f64, f64, f64) {
        (self.l1, self.l2, self.sup)
    }

    /// Evaluate at a `d`-dimensional point; exactly zero outside the
    /// support cube.
    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        let mut v = 1.0;
        for &ui in u {
            v *= self.family.eval_1d(ui);
            if v == 0.0 {
                return Ok(0.0);
            }
        }
        Ok(v)
    }
}

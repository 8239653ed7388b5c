//! Bivariate kernels `k(r, s)` on `(0, ∞)²`: the expression language, the
//! named families and a randomized homogeneity check.

mod catalog;
mod expr;
mod parser;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use catalog::{catalog, CatalogKernel};
pub use expr::{BinaryOp, KernelExpr, UnaryOp, Var};
pub use parser::{parse_kernel, parse_profile, ParseError, ParseErrorKind};

/// Tolerance used when a kernel is constructed with a claimed order.
pub const CONSTRUCTION_TOL: f64 = 1e-10;
const CONSTRUCTION_SAMPLES: usize = 1000;
const POSITIVITY_SAMPLES: usize = 256;

/// A positive kernel, optionally with a verified homogeneity order.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    expr: KernelExpr,
    text: String,
    claimed_order: Option<f64>,
    positivity_checked: bool,
}

impl Kernel {
    /// Parses `text` and builds the kernel. See [`Kernel::from_expr`].
    pub fn parse(text: &str, order: Option<f64>) -> Result<Self> {
        let expr = parse_kernel(text)?;
        let mut kernel = Self::from_expr(expr, order)?;
        kernel.text = text.trim().to_string();
        Ok(kernel)
    }

    /// Checks positivity on sampled points and, when `order` is given, the
    /// homogeneity `k(ar, as) = a^order k(r, s)` at [`CONSTRUCTION_TOL`].
    pub fn from_expr(expr: KernelExpr, order: Option<f64>) -> Result<Self> {
        let kernel = Self { text: expr.to_string(), expr, claimed_order: None, positivity_checked: false };
        kernel.check_positive()?;
        let mut kernel = Self { positivity_checked: true, ..kernel };
        if let Some(order) = order {
            if !order.is_finite() {
                return Err(Error::InvalidInput(format!("kernel order must be finite, got {order}")));
            }
            let report = check_homogeneity(&kernel, order, CONSTRUCTION_SAMPLES, CONSTRUCTION_TOL, 0)?;
            if !report.pass {
                return Err(Error::Precondition(format!(
                    "kernel `{}` is not homogeneous of order {order}: {}",
                    kernel.text,
                    report.describe()
                )));
            }
            kernel.claimed_order = Some(order);
        }
        Ok(kernel)
    }

    fn check_positive(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..POSITIVITY_SAMPLES {
            let r = 10f64.powf(rng.gen_range(-2.0..2.0));
            let s = 10f64.powf(rng.gen_range(-2.0..2.0));
            match self.expr.eval(r, s) {
                Ok(v) if v > 0.0 => {}
                Ok(v) => return Err(Error::Precondition(format!("kernel `{}` is not positive: k({r}, {s}) = {v}", self.text))),
                Err(e) => return Err(Error::Precondition(format!("kernel `{}` fails at ({r}, {s}): {e}", self.text))),
            }
        }
        Ok(())
    }

    pub fn eval(&self, r: f64, s: f64) -> Result<f64> {
        self.expr.eval(r, s)
    }

    pub fn expr(&self) -> &KernelExpr {
        &self.expr
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn claimed_order(&self) -> Option<f64> {
        self.claimed_order
    }

    pub fn positivity_checked(&self) -> bool {
        self.positivity_checked
    }

    /// `(r, s) ↦ k(s, r)`, with the same order.
    pub fn transposed(&self) -> Self {
        let expr = self.expr.transposed();
        Self { text: expr.to_string(), expr, ..self.clone() }
    }
}

/// Outcome of [`check_homogeneity`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub pass: bool,
    #[serde(with = "crate::num_serde")]
    pub max_rel_dev: f64,
    /// `(r, s, a)` where the deviation peaked, or where evaluation failed.
    pub worst: Option<[f64; 3]>,
    pub failure: Option<String>,
}

impl HomogeneityReport {
    fn describe(&self) -> String {
        match (&self.failure, self.worst) {
            (Some(msg), _) => msg.clone(),
            (None, Some([r, s, a])) => format!("relative deviation {:e} at r = {r}, s = {s}, a = {a}", self.max_rel_dev),
            (None, None) => format!("relative deviation {:e}", self.max_rel_dev),
        }
    }
}

/// Samples `(r, s)` log-uniformly in `[1e-3, 1e3]²` and `a` in `[1e-2, 1e2]`
/// and compares `k(ar, as)` with `a^order k(r, s)`.
pub fn check_homogeneity(kernel: &Kernel, order: f64, n_samples: usize, tol: f64, seed: u64) -> Result<HomogeneityReport> {
    if n_samples < 100 {
        return Err(Error::InvalidInput(format!("homogeneity check needs at least 100 samples, got {n_samples}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!("homogeneity tolerance must be positive, got {tol}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel_dev: f64 = 0.0;
    let mut worst = None;
    for _ in 0..n_samples {
        let r = 10f64.powf(rng.gen_range(-3.0..3.0));
        let s = 10f64.powf(rng.gen_range(-3.0..3.0));
        let a = 10f64.powf(rng.gen_range(-2.0..2.0));
        let values = kernel.eval(a * r, a * s).and_then(|scaled| Ok((scaled, kernel.eval(r, s)?)));
        let (scaled, base) = match values {
            Ok(v) => v,
            Err(e) => {
                return Ok(HomogeneityReport {
                    pass: false,
                    max_rel_dev: f64::INFINITY,
                    worst: Some([r, s, a]),
                    failure: Some(format!("evaluation failed at r = {r}, s = {s}, a = {a}: {e}")),
                })
            }
        };
        let expected = a.powf(order) * base;
        let dev = if scaled == expected {
            0.0
        } else if expected == 0.0 {
            f64::INFINITY
        } else {
            ((scaled - expected) / expected).abs()
        };
        if dev > max_rel_dev || worst.is_none() {
            max_rel_dev = max_rel_dev.max(dev);
            worst = Some([r, s, a]);
        }
    }
    Ok(HomogeneityReport { pass: max_rel_dev <= tol, max_rel_dev, worst, failure: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_is_order_minus_one() {
        let k = Kernel::parse("1/(r+s)", None).unwrap();
        let rep = check_homogeneity(&k, -1.0, 1000, 1e-10, 1).unwrap();
        assert!(rep.pass);
        assert!(rep.max_rel_dev <= 1e-12, "{rep:?}");
    }

    #[test]
    fn mixed_scaling_fails() {
        let k = Kernel::parse("1/(r+s^2)", None).unwrap();
        let rep = check_homogeneity(&k, -1.0, 1000, 1e-10, 1).unwrap();
        assert!(!rep.pass);
        assert!(rep.worst.is_some());
        assert!(matches!(Kernel::parse("1/(r+s^2)", Some(-1.0)), Err(Error::Precondition(_))));
    }

    #[test]
    fn cubic_denominator_is_order_minus_three() {
        let k = Kernel::parse("1/(r^3+s^3)", Some(-3.0)).unwrap();
        assert_eq!(k.claimed_order(), Some(-3.0));
        assert!(k.positivity_checked());
    }

    #[test]
    fn square_denominator_example() {
        let k = Kernel::parse("1/(r^2+s^2)", Some(-2.0)).unwrap();
        assert_eq!(k.eval(1.0, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn evaluation_failure_reports_the_point() {
        let k = Kernel::parse("1/(r+s)", None).unwrap();
        let broken = Kernel { expr: parse_kernel("log(r-s)").unwrap(), ..k };
        let rep = check_homogeneity(&broken, 0.0, 100, 1e-10, 2).unwrap();
        assert!(!rep.pass);
        assert!(rep.failure.is_some());
    }

    #[test]
    fn nonpositive_kernels_are_rejected() {
        assert!(matches!(Kernel::parse("r-s", None), Err(Error::Precondition(_))));
        assert!(matches!(Kernel::parse("log(r-s)", None), Err(Error::Precondition(_))));
    }

    #[test]
    fn too_few_samples_is_input_error() {
        let k = Kernel::parse("1/(r+s)", None).unwrap();
        assert!(matches!(check_homogeneity(&k, -1.0, 10, 1e-10, 0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn transposition_swaps_slots() {
        let k = Kernel::parse("r/(s*(r+s)^2)", Some(-2.0)).unwrap();
        let t = k.transposed();
        assert_eq!(t.eval(2.0, 3.0).unwrap(), k.eval(3.0, 2.0).unwrap());
        assert_eq!(t.claimed_order(), Some(-2.0));
    }
}

//! Radial test functions `f(x) = φ(|x|)`, represented by their profile `φ`.

use std::fmt;
use std::sync::Arc;

use crate::kernels::{parse_profile, KernelExpr};
use crate::verify::ConjugateFunction;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum RadialFunction {
    /// A profile expression in `r`.
    Expr { text: String, expr: KernelExpr },
    /// `r^{−dim/exponent − β} χ_{(1,∞)}(r)`.
    PowerCutoff { beta: f64, exponent: f64, dim: f64 },
    /// `χ_{(lo,hi)}(r)`.
    Indicator { lo: f64, hi: f64 },
    /// `φ(a·r)`, i.e. `f ∘ D_a`.
    Scaled { inner: Box<RadialFunction>, a: f64 },
    /// `φ(r) χ_{(0,r_max)}(r)`.
    Truncated { inner: Box<RadialFunction>, r_max: f64 },
    /// A tabulated conjugate function.
    Conjugate(Arc<ConjugateFunction>),
}

impl RadialFunction {
    pub fn expr(text: &str) -> Result<Self> {
        let expr = parse_profile(text)?;
        let f = RadialFunction::Expr { text: text.trim().to_string(), expr };
        f.check_nonnegative()?;
        Ok(f)
    }

    pub fn zero() -> Self {
        RadialFunction::Expr { text: "0".into(), expr: KernelExpr::Num(0.0) }
    }

    pub fn power_cutoff(beta: f64, exponent: f64, dim: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidInput(format!("power cutoff needs beta > 0, got {beta}")));
        }
        if !(exponent >= 1.0 && exponent.is_finite()) {
            return Err(Error::InvalidInput(format!("power cutoff needs an exponent >= 1, got {exponent}")));
        }
        if !(dim > 0.0 && dim.is_finite()) {
            return Err(Error::InvalidInput(format!("power cutoff needs a positive dimension, got {dim}")));
        }
        Ok(RadialFunction::PowerCutoff { beta, exponent, dim })
    }

    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidInput(format!("indicator needs 0 <= lo < hi, got ({lo}, {hi})")));
        }
        Ok(RadialFunction::Indicator { lo, hi })
    }

    pub fn scaled(self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {a}")));
        }
        Ok(RadialFunction::Scaled { inner: Box::new(self), a })
    }

    pub fn truncated(self, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidInput(format!("truncation radius must be positive, got {r_max}")));
        }
        Ok(RadialFunction::Truncated { inner: Box::new(self), r_max })
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        match self {
            RadialFunction::Expr { expr, .. } => expr.eval(r, 0.0),
            RadialFunction::PowerCutoff { beta, exponent, dim } => Ok(if r > 1.0 { r.powf(-dim / exponent - beta) } else { 0.0 }),
            RadialFunction::Indicator { lo, hi } => Ok(if r > *lo && r < *hi { 1.0 } else { 0.0 }),
            RadialFunction::Scaled { inner, a } => inner.eval(a * r),
            RadialFunction::Truncated { inner, r_max } => {
                if r < *r_max {
                    inner.eval(r)
                } else {
                    Ok(0.0)
                }
            }
            RadialFunction::Conjugate(c) => c.eval(r),
        }
    }

    /// Radius beyond which the profile vanishes, when known.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            RadialFunction::Indicator { hi, .. } => Some(*hi),
            RadialFunction::Scaled { inner, a } => inner.support_radius().map(|r| r / a),
            RadialFunction::Truncated { inner, r_max } => Some(inner.support_radius().map_or(*r_max, |r| r.min(*r_max))),
            _ => None,
        }
    }

    /// Radii where the profile jumps or has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialFunction::PowerCutoff { .. } => vec![1.0],
            RadialFunction::Indicator { lo, hi } => [*lo, *hi].into_iter().filter(|&b| b > 0.0).collect(),
            RadialFunction::Scaled { inner, a } => inner.breakpoints().into_iter().map(|b| b / a).collect(),
            RadialFunction::Truncated { inner, r_max } => {
                let mut b: Vec<f64> = inner.breakpoints().into_iter().filter(|b| b < r_max).collect();
                b.push(*r_max);
                b
            }
            RadialFunction::Expr { .. } | RadialFunction::Conjugate(_) => Vec::new(),
        }
    }

    /// Samples the profile on a log grid over `[1e-6, 1e6]` and rejects
    /// negative values or evaluation failures.
    pub fn check_nonnegative(&self) -> Result<()> {
        for i in 0..241 {
            let r = 10f64.powf(-6.0 + 0.05 * i as f64);
            let v = self.eval(r)?;
            if v < 0.0 {
                return Err(Error::Domain(format!("test function `{self}` is negative at r = {r}: {v}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialFunction::Expr { text, .. } => write!(f, "{text}"),
            RadialFunction::PowerCutoff { beta, exponent, dim } => {
                write!(f, "power_cutoff(beta={beta}, exponent={exponent}, dim={dim})")
            }
            RadialFunction::Indicator { lo, hi } => write!(f, "indicator({lo}, {hi})"),
            RadialFunction::Scaled { inner, a } => write!(f, "({inner})∘D_{a}"),
            RadialFunction::Truncated { inner, r_max } => write!(f, "({inner})·χ(r<{r_max})"),
            RadialFunction::Conjugate(c) => write!(f, "conjugate[{}]", c.describe()),
        }
    }
}

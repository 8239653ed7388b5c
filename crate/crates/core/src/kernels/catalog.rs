use serde::{Deserialize, Serialize};

use super::expr::{BinaryOp, KernelExpr, Var};
use super::Kernel;
use crate::{Error, Result};

/// Named kernel families with their parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "catalog", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogKernel {
    /// `1/(r+s)`, order −1.
    Hilbert {},
    /// `1/(r^λ+s^λ)`, order −λ.
    HilbertLambda { lambda: f64 },
    /// `r^{−1+λ/k+1/p} s^{−1+λ/m+1/q} / (r^λ+s^λ)` with `1/k+1/m = 1`, order −1.
    WeightedHilbert { lambda: f64, p: f64, k_exp: f64 },
    /// `1/max(r,s)`, order −1.
    #[serde(alias = "max")]
    MaxKernel {},
    /// `c·r^{(1−Q)/q} s^{(1−Q)/p} / (r+s)`, order −Q.
    GroupWeightedHilbert { p: f64, q_dim: f64, c: f64 },
}

/// Real literal; negative values become a negated positive literal so the
/// printed form stays inside the grammar.
fn lit(v: f64) -> KernelExpr {
    if v < 0.0 {
        KernelExpr::unary(super::expr::UnaryOp::Neg, KernelExpr::Num(-v))
    } else {
        KernelExpr::Num(v)
    }
}

fn var(v: Var) -> KernelExpr {
    KernelExpr::Var(v)
}

fn pow(base: KernelExpr, e: f64) -> KernelExpr {
    KernelExpr::binary(BinaryOp::Pow, base, lit(e))
}

fn mul(a: KernelExpr, b: KernelExpr) -> KernelExpr {
    KernelExpr::binary(BinaryOp::Mul, a, b)
}

fn div(a: KernelExpr, b: KernelExpr) -> KernelExpr {
    KernelExpr::binary(BinaryOp::Div, a, b)
}

fn add(a: KernelExpr, b: KernelExpr) -> KernelExpr {
    KernelExpr::binary(BinaryOp::Add, a, b)
}

fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn require_exponent(name: &str, v: f64) -> Result<()> {
    if v > 1.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be a finite real > 1, got {v}")))
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be a finite positive real, got {v}")))
    }
}

impl CatalogKernel {
    pub fn name(&self) -> &'static str {
        match self {
            CatalogKernel::Hilbert {} => "hilbert",
            CatalogKernel::HilbertLambda { .. } => "hilbert_lambda",
            CatalogKernel::WeightedHilbert { .. } => "weighted_hilbert",
            CatalogKernel::MaxKernel {} => "max_kernel",
            CatalogKernel::GroupWeightedHilbert { .. } => "group_weighted_hilbert",
        }
    }

    /// Homogeneity order of the family.
    pub fn order(&self) -> f64 {
        match self {
            CatalogKernel::HilbertLambda { lambda } => -lambda,
            CatalogKernel::GroupWeightedHilbert { q_dim, .. } => -q_dim,
            _ => -1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CatalogKernel::Hilbert {} | CatalogKernel::MaxKernel {} => Ok(()),
            CatalogKernel::HilbertLambda { lambda } => require_positive("lambda", lambda),
            CatalogKernel::WeightedHilbert { lambda, p, k_exp } => {
                require_positive("lambda", lambda)?;
                require_exponent("p", p)?;
                require_exponent("k_exp", k_exp)
            }
            CatalogKernel::GroupWeightedHilbert { p, q_dim, c } => {
                require_exponent("p", p)?;
                require_positive("Q", q_dim)?;
                require_positive("c", c)
            }
        }
    }

    fn expr(&self) -> KernelExpr {
        let (r, s) = (var(Var::R), var(Var::S));
        match *self {
            CatalogKernel::Hilbert {} => div(lit(1.0), add(r, s)),
            CatalogKernel::HilbertLambda { lambda } => div(lit(1.0), add(pow(r, lambda), pow(s, lambda))),
            CatalogKernel::WeightedHilbert { lambda, p, k_exp } => {
                let (q, m) = (conjugate(p), conjugate(k_exp));
                let a = -1.0 + lambda / k_exp + 1.0 / p;
                let b = -1.0 + lambda / m + 1.0 / q;
                div(mul(pow(r.clone(), a), pow(s.clone(), b)), add(pow(r, lambda), pow(s, lambda)))
            }
            CatalogKernel::MaxKernel {} => div(lit(1.0), KernelExpr::binary(BinaryOp::Max, r, s)),
            CatalogKernel::GroupWeightedHilbert { p, q_dim, c } => {
                let q = conjugate(p);
                let weights = mul(pow(r.clone(), (1.0 - q_dim) / q), pow(s.clone(), (1.0 - q_dim) / p));
                div(mul(lit(c), weights), add(r, s))
            }
        }
    }

    /// Builds the kernel and checks it against its declared order.
    pub fn build(&self) -> Result<Kernel> {
        self.validate()?;
        Kernel::from_expr(self.expr(), Some(self.order()))
    }
}

/// Shorthand for [`CatalogKernel::build`].
pub fn catalog(kind: &CatalogKernel) -> Result<Kernel> {
    kind.build()
}

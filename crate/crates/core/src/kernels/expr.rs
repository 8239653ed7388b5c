use std::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    R,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Min,
    Max,
}

/// Expression tree over the variables `r` and `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelExpr {
    Num(f64),
    Pi,
    Var(Var),
    Unary(UnaryOp, Box<KernelExpr>),
    Binary(BinaryOp, Box<KernelExpr>, Box<KernelExpr>),
}

impl KernelExpr {
    pub fn num(v: f64) -> Self {
        KernelExpr::Num(v)
    }

    pub fn var(v: Var) -> Self {
        KernelExpr::Var(v)
    }

    pub fn unary(op: UnaryOp, arg: KernelExpr) -> Self {
        KernelExpr::Unary(op, Box::new(arg))
    }

    pub fn binary(op: BinaryOp, lhs: KernelExpr, rhs: KernelExpr) -> Self {
        KernelExpr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Evaluates at `(r, s)`. Returns a domain error for `log` of a
    /// nonpositive value, a negative base under a non-integer power, or a
    /// non-finite result.
    pub fn eval(&self, r: f64, s: f64) -> Result<f64> {
        let v = self.eval_raw(r, s)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("`{self}` is not finite at r = {r}, s = {s}")))
        }
    }

    fn eval_raw(&self, r: f64, s: f64) -> Result<f64> {
        Ok(match self {
            KernelExpr::Num(v) => *v,
            KernelExpr::Pi => std::f64::consts::PI,
            KernelExpr::Var(Var::R) => r,
            KernelExpr::Var(Var::S) => s,
            KernelExpr::Unary(op, arg) => {
                let x = arg.eval_raw(r, s)?;
                match op {
                    UnaryOp::Neg => -x,
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Log => {
                        if x.is_nan() || x <= 0.0 {
                            return Err(Error::Domain(format!("log of nonpositive value {x} at r = {r}, s = {s}")));
                        }
                        x.ln()
                    }
                }
            }
            KernelExpr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_raw(r, s)?;
                let b = rhs.eval_raw(r, s)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => a / b,
                    BinaryOp::Min => a.min(b),
                    BinaryOp::Max => a.max(b),
                    BinaryOp::Pow => power(a, b).ok_or_else(|| Error::Domain(format!("{a}^{b} is undefined at r = {r}, s = {s}")))?,
                }
            }
        })
    }

    /// Same tree with `r` and `s` exchanged.
    pub fn transposed(&self) -> Self {
        match self {
            KernelExpr::Var(Var::R) => KernelExpr::Var(Var::S),
            KernelExpr::Var(Var::S) => KernelExpr::Var(Var::R),
            KernelExpr::Unary(op, arg) => KernelExpr::unary(*op, arg.transposed()),
            KernelExpr::Binary(op, l, r) => KernelExpr::binary(*op, l.transposed(), r.transposed()),
            other => other.clone(),
        }
    }

    pub fn uses(&self, var: Var) -> bool {
        match self {
            KernelExpr::Var(v) => *v == var,
            KernelExpr::Unary(_, arg) => arg.uses(var),
            KernelExpr::Binary(_, l, r) => l.uses(var) || r.uses(var),
            _ => false,
        }
    }
}

fn power(base: f64, exp: f64) -> Option<f64> {
    if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
        return Some(base.powi(exp as i32));
    }
    if base < 0.0 {
        return None;
    }
    Some(base.powf(exp))
}

// Fully parenthesised, so re-parsing the output reproduces the tree.
impl fmt::Display for KernelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelExpr::Num(v) => write!(f, "{v}"),
            KernelExpr::Pi => write!(f, "pi"),
            KernelExpr::Var(Var::R) => write!(f, "r"),
            KernelExpr::Var(Var::S) => write!(f, "s"),
            KernelExpr::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            KernelExpr::Unary(UnaryOp::Exp, a) => write!(f, "exp({a})"),
            KernelExpr::Unary(UnaryOp::Log, a) => write!(f, "log({a})"),
            KernelExpr::Binary(BinaryOp::Min, a, b) => write!(f, "min({a}, {b})"),
            KernelExpr::Binary(BinaryOp::Max, a, b) => write!(f, "max({a}, {b})"),
            KernelExpr::Binary(op, a, b) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                    BinaryOp::Pow => "^",
                    BinaryOp::Min | BinaryOp::Max => unreachable!(),
                };
                write!(f, "({a} {sym} {b})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_of_negative_is_domain_error() {
        let e = KernelExpr::unary(UnaryOp::Log, KernelExpr::binary(BinaryOp::Sub, KernelExpr::var(Var::R), KernelExpr::var(Var::S)));
        assert!(matches!(e.eval(1.0, 2.0), Err(Error::Domain(_))));
        assert!((e.eval(3.0, 2.0).unwrap() - 0.0).abs() < 1e-15);
    }

    #[test]
    fn negative_base_fractional_power_is_domain_error() {
        let e = KernelExpr::binary(BinaryOp::Pow, KernelExpr::unary(UnaryOp::Neg, KernelExpr::var(Var::R)), KernelExpr::num(0.5));
        assert!(e.eval(2.0, 1.0).is_err());
        let sq = KernelExpr::binary(BinaryOp::Pow, KernelExpr::unary(UnaryOp::Neg, KernelExpr::var(Var::R)), KernelExpr::num(2.0));
        assert_eq!(sq.eval(3.0, 1.0).unwrap(), 9.0);
    }

    #[test]
    fn division_by_zero_is_not_finite() {
        let e = KernelExpr::binary(
            BinaryOp::Div,
            KernelExpr::num(1.0),
            KernelExpr::binary(BinaryOp::Sub, KernelExpr::var(Var::R), KernelExpr::var(Var::S)),
        );
        assert!(e.eval(1.0, 1.0).is_err());
    }

    #[test]
    fn transpose_swaps_arguments() {
        let e = KernelExpr::binary(BinaryOp::Div, KernelExpr::var(Var::R), KernelExpr::var(Var::S));
        assert_eq!(e.transposed().eval(2.0, 8.0).unwrap(), 4.0);
    }
}

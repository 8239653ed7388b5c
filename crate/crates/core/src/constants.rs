//! Sharp constants: the numeric `C*_p` of a homogeneous kernel and the
//! closed forms known for the named families.
//!
//! `C*_p = |𝔖| ∫_0^∞ k(1,s) s^{Q−1−Q/p} ds` (with `|𝔖| = Q = 1` on the half
//! line) is the norm of the operator `f ↦ ∫ k(·,s) f(s) s^{Q−1} ds` on
//! `L^p`. The bilinear form `∫∫ k(r,s) f(r) g(s)` and the operator acting in
//! the first slot have the constant of the transposed kernel instead; see
//! [`cstar_bilinear`]. For symmetric kernels the two agree.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::group::{gamma_half_integer, HomogeneousGroup};
use crate::kernels::{check_homogeneity, Kernel, CONSTRUCTION_TOL};
use crate::quad::{try_integrate_half_line, QuadResult, Tolerance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Half line, kernels of order −1.
    Classical,
    /// Homogeneous group, kernels of order −Q.
    Group,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    NumericQuadrature,
    ClosedForm,
}

/// Which operator the constant bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `f ↦ ∫ k(r,s) f(s) ds`, integrating the second slot.
    Operator,
    /// The bilinear form, equivalently the operator on the first slot.
    Bilinear,
}

/// Agreement between the two defining integrals of `C*_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    #[serde(with = "crate::num_serde")]
    pub rel_dev: f64,
    #[serde(with = "crate::num_serde")]
    pub allowed: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpConstant {
    /// `C*_p`; infinite when the defining integral diverges.
    #[serde(with = "crate::num_serde")]
    pub value: f64,
    pub mode: Mode,
    pub p: f64,
    pub q: f64,
    pub source: Source,
    pub orientation: Orientation,
    pub quad: Option<QuadResult>,
    /// The second defining integral, `|𝔖| ∫ k(r,1) r^{Q−1−Q/q} dr`.
    pub cross_check: Option<QuadResult>,
    pub agreement: Option<Agreement>,
}

impl SharpConstant {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// Relative error estimate of the value; zero for closed forms.
    pub fn rel_err(&self) -> f64 {
        self.quad.map_or(0.0, |q| q.rel_err())
    }
}

/// `p/(p−1)`, rejecting `p ≤ 1`.
pub fn conjugate_exponent(p: f64) -> Result<f64> {
    if p > 1.0 && p.is_finite() {
        Ok(p / (p - 1.0))
    } else {
        Err(Error::InvalidInput(format!("exponent must be a finite real > 1, got {p}")))
    }
}

fn require_order(kernel: &Kernel, expected: f64) -> Result<()> {
    match kernel.claimed_order() {
        Some(order) => {
            if (order - expected).abs() <= 1e-12 * expected.abs().max(1.0) {
                Ok(())
            } else {
                Err(Error::Precondition(format!(
                    "kernel `{}` has order {order}; the inequality can only hold at order {expected}",
                    kernel.text()
                )))
            }
        }
        None => {
            let report = check_homogeneity(kernel, expected, 1000, CONSTRUCTION_TOL, 0)?;
            if report.pass {
                Ok(())
            } else {
                Err(Error::Precondition(format!(
                    "kernel `{}` is not homogeneous of order {expected} (max relative deviation {:e})",
                    kernel.text(),
                    report.max_rel_dev
                )))
            }
        }
    }
}

fn compute(
    kernel: &Kernel,
    p: f64,
    mode: Mode,
    group: &HomogeneousGroup,
    orientation: Orientation,
    tol: &Tolerance,
) -> Result<SharpConstant> {
    let q = conjugate_exponent(p)?;
    tol.validate()?;
    let q_dim = group.homogeneous_dim();
    let expected = match mode {
        Mode::Classical => -1.0,
        Mode::Group => -q_dim,
    };
    require_order(kernel, expected)?;
    let sphere = group.sphere_value()?;

    let primary = try_integrate_half_line(|s| Ok(kernel.eval(1.0, s)? * s.powf(q_dim - 1.0 - q_dim / p)), tol)?.scaled(sphere);
    let cross = try_integrate_half_line(|r| Ok(kernel.eval(r, 1.0)? * r.powf(q_dim - 1.0 - q_dim / q)), tol)?.scaled(sphere);

    let divergent = primary.is_divergent() || cross.is_divergent();
    let agreement = if divergent {
        None
    } else {
        let rel_dev = (primary.value - cross.value).abs() / primary.value.abs().max(cross.value.abs());
        let allowed = 2.0 * tol.rel.max(primary.rel_err() + cross.rel_err());
        Some(Agreement { rel_dev, allowed, ok: rel_dev <= allowed })
    };
    Ok(SharpConstant {
        value: if divergent { f64::INFINITY } else { primary.value },
        mode,
        p,
        q,
        source: Source::NumericQuadrature,
        orientation,
        quad: Some(primary),
        cross_check: Some(cross),
        agreement,
    })
}

/// `C*_p = ∫_0^∞ k(1,s) s^{−1/p} ds` for a kernel of order −1.
pub fn cstar_classical(kernel: &Kernel, p: f64, tol: &Tolerance) -> Result<SharpConstant> {
    compute(kernel, p, Mode::Classical, &HomogeneousGroup::half_line(), Orientation::Operator, tol)
}

/// `C*_p = |𝔖| ∫_0^∞ k(1,s) s^{Q−1−Q/p} ds` for a kernel of order −Q.
pub fn cstar_group(kernel: &Kernel, p: f64, group: &HomogeneousGroup, tol: &Tolerance) -> Result<SharpConstant> {
    compute(kernel, p, Mode::Group, group, Orientation::Operator, tol)
}

/// Sharp constant of `∫∫ k f g ≤ C ‖f‖_p ‖g‖_q`: `C*_p` of the transposed
/// kernel, which equals `C*_q` of the kernel itself. In classical mode the
/// group argument is ignored.
pub fn cstar_bilinear(kernel: &Kernel, p: f64, mode: Mode, group: &HomogeneousGroup, tol: &Tolerance) -> Result<SharpConstant> {
    let line;
    let group = match mode {
        Mode::Classical => {
            line = HomogeneousGroup::half_line();
            &line
        }
        Mode::Group => group,
    };
    compute(&kernel.transposed(), p, mode, group, Orientation::Bilinear, tol)
}

/// Constants known in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClosedForm {
    /// `π/sin(π/p)`.
    HardyHilbert { p: f64 },
    /// `π/(λ sin(π/m))` for the weighted kernel with parameters `(λ, p, k)`,
    /// `1/k + 1/m = 1`.
    TheoremC { lambda: f64, m: f64, p: f64 },
    /// `Qπ/sin(π/p)`.
    GroupHilbert { q_dim: f64, p: f64 },
    /// `(nπ/sin(π/p))·π^{n/2}/Γ(n/2+1)`.
    RnHilbert { n: u32, p: f64 },
    /// `Qπ/(λ sin(π/m))`.
    Prop35 { q_dim: f64, lambda: f64, m: f64, p: f64 },
    /// `(|𝔖|/Q)·π/sin(π/p)`, the constant of `1/(r^Q+s^Q)`.
    PowerDenominator { q_dim: f64, sphere: f64, p: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
    }
}

pub fn closed_form(case: &ClosedForm) -> Result<SharpConstant> {
    let (value, mode, p) = match *case {
        ClosedForm::HardyHilbert { p } => {
            conjugate_exponent(p)?;
            (PI / (PI / p).sin(), Mode::Classical, p)
        }
        ClosedForm::TheoremC { lambda, m, p } => {
            positive("lambda", lambda)?;
            conjugate_exponent(m)?;
            conjugate_exponent(p)?;
            (PI / (lambda * (PI / m).sin()), Mode::Classical, p)
        }
        ClosedForm::GroupHilbert { q_dim, p } => {
            positive("Q", q_dim)?;
            conjugate_exponent(p)?;
            (q_dim * PI / (PI / p).sin(), Mode::Group, p)
        }
        ClosedForm::RnHilbert { n, p } => {
            if n == 0 {
                return Err(Error::InvalidInput("dimension n must be at least 1".into()));
            }
            conjugate_exponent(p)?;
            let ball = PI.powf(n as f64 / 2.0) / gamma_half_integer(n + 2);
            (n as f64 * PI / (PI / p).sin() * ball, Mode::Group, p)
        }
        ClosedForm::Prop35 { q_dim, lambda, m, p } => {
            positive("Q", q_dim)?;
            positive("lambda", lambda)?;
            conjugate_exponent(m)?;
            conjugate_exponent(p)?;
            (q_dim * PI / (lambda * (PI / m).sin()), Mode::Group, p)
        }
        ClosedForm::PowerDenominator { q_dim, sphere, p } => {
            positive("Q", q_dim)?;
            positive("sphere measure", sphere)?;
            conjugate_exponent(p)?;
            (sphere / q_dim * PI / (PI / p).sin(), Mode::Group, p)
        }
    };
    Ok(SharpConstant {
        value,
        mode,
        p,
        q: conjugate_exponent(p)?,
        source: Source::ClosedForm,
        orientation: Orientation::Bilinear,
        quad: None,
        cross_check: None,
        agreement: None,
    })
}

use hh_core::constants::{closed_form, cstar_bilinear, cstar_classical, cstar_group, ClosedForm, Mode, SharpConstant, Source};
use hh_core::kernels::CatalogKernel;
use serde::{Deserialize, Serialize};

use super::CommandOutput;
use crate::config::{Experiment, KernelSpec, ModeSpec};
use crate::error::Result;
use crate::report::{flag, num, Diagnostic, Outcome, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCheck {
    pub case: ClosedForm,
    pub value: f64,
    /// Relative deviation of the numeric constant from the closed form.
    #[serde(with = "hh_core::num_serde")]
    pub rel_dev: f64,
    pub allowed: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantResult {
    pub kernel: String,
    pub order: Option<f64>,
    pub mode: ModeSpec,
    pub p: f64,
    pub q: f64,
    /// The constant of `∫∫ k f g ≤ C ‖f‖_p ‖g‖_q`.
    #[serde(with = "hh_core::num_serde")]
    pub value: f64,
    #[serde(with = "hh_core::num_serde")]
    pub err_estimate: f64,
    pub source: Source,
    pub converged: bool,
    pub bilinear: SharpConstant,
    /// `|𝔖| ∫ k(1,s) s^{Q−1−Q/p} ds`, the constant of the operator that
    /// integrates the second slot; equal to `value` for symmetric kernels.
    pub operator: SharpConstant,
    pub closed_form: Option<ClosedFormCheck>,
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// The closed form that applies to the configured kernel, if any.
pub fn applicable_closed_form(exp: &Experiment) -> Option<ClosedForm> {
    let p = exp.config.p;
    let q_dim = exp.group.homogeneous_dim();
    let sphere = exp.group.sphere_value().ok()?;
    let KernelSpec::Catalog(kernel) = &exp.config.kernel else {
        return None;
    };
    match (exp.config.mode, kernel) {
        (ModeSpec::Theorem31, _) => Some(ClosedForm::GroupHilbert { q_dim, p }),
        (ModeSpec::Classical, CatalogKernel::Hilbert {}) => Some(ClosedForm::HardyHilbert { p }),
        (ModeSpec::Classical, CatalogKernel::HilbertLambda { lambda }) if same(*lambda, 1.0) => Some(ClosedForm::HardyHilbert { p }),
        (ModeSpec::Classical, CatalogKernel::WeightedHilbert { lambda, p: kp, k_exp }) if same(*kp, p) => {
            Some(ClosedForm::TheoremC { lambda: *lambda, m: k_exp / (k_exp - 1.0), p })
        }
        (ModeSpec::Group, CatalogKernel::HilbertLambda { lambda }) if same(*lambda, q_dim) => {
            Some(ClosedForm::PowerDenominator { q_dim, sphere, p })
        }
        (ModeSpec::Group, CatalogKernel::GroupWeightedHilbert { p: kp, q_dim: kq, c })
            if same(*kp, p) && same(*kq, q_dim) && same(*c, q_dim / sphere) =>
        {
            Some(ClosedForm::GroupHilbert { q_dim, p })
        }
        _ => None,
    }
}

fn constant_diagnostics(label: &str, c: &SharpConstant, out: &mut Vec<Diagnostic>) {
    if let Some(q) = c.quad {
        out.push(Diagnostic::new(format!("{label}: first-slot integral"), q));
    }
    if let Some(q) = c.cross_check {
        out.push(Diagnostic::new(format!("{label}: second-slot integral"), q));
    }
}

pub fn cmd_constant(exp: &Experiment) -> Result<CommandOutput> {
    let (p, q) = (exp.config.p, exp.q);
    let mode = exp.mode();
    // the operator constant first, so order errors name the kernel as written
    let operator = match mode {
        Mode::Classical => cstar_classical(&exp.kernel, p, &exp.tol)?,
        Mode::Group => cstar_group(&exp.kernel, p, &exp.group, &exp.tol)?,
    };
    let bilinear = cstar_bilinear(&exp.kernel, p, mode, &exp.group, &exp.tol)?;

    let closed = applicable_closed_form(exp)
        .map(|case| -> Result<ClosedFormCheck> {
            let exact = closed_form(&case)?.value;
            let rel_dev = ((bilinear.value - exact) / exact).abs();
            let allowed = 10.0 * exp.tol.rel.max(bilinear.rel_err());
            Ok(ClosedFormCheck { case, value: exact, rel_dev, allowed, ok: rel_dev <= allowed })
        })
        .transpose()?;

    let converged = bilinear.quad.is_none_or(|r| r.converged) && bilinear.cross_check.is_none_or(|r| r.converged);
    let outcome = if !bilinear.is_finite() {
        Outcome::Divergence
    } else if !converged || bilinear.agreement.is_some_and(|a| !a.ok) || closed.as_ref().is_some_and(|c| !c.ok) {
        Outcome::CheckFailed
    } else {
        Outcome::Ok
    };

    let mut diagnostics = Vec::new();
    constant_diagnostics("bilinear constant", &bilinear, &mut diagnostics);
    constant_diagnostics("operator constant", &operator, &mut diagnostics);

    let mut table = Table::new(format!("constant of `{}` at p = {p}", exp.kernel.text()), &["quantity", "value", "err_estimate"]);
    let err = |c: &SharpConstant| c.quad.map_or(0.0, |r| r.err_estimate);
    table.push(vec!["bilinear constant".into(), num(bilinear.value, converged), format!("{:.3e}", err(&bilinear))]);
    let op_converged = operator.quad.is_none_or(|r| r.converged);
    table.push(vec!["operator constant".into(), num(operator.value, op_converged), format!("{:.3e}", err(&operator))]);
    if let Some(c) = &closed {
        table.push(vec!["closed form".into(), num(c.value, true), "0".into()]);
        table.push(vec![
            "relative deviation".into(),
            format!("{:.3e}", c.rel_dev),
            format!("allowed {:.1e}, ok {}", c.allowed, flag(c.ok)),
        ]);
    }

    let result = ConstantResult {
        kernel: exp.kernel.text().to_string(),
        order: exp.kernel.claimed_order(),
        mode: exp.config.mode,
        p,
        q,
        value: bilinear.value,
        err_estimate: err(&bilinear),
        source: bilinear.source,
        converged,
        bilinear,
        operator,
        closed_form: closed,
    };
    CommandOutput::new(&result, diagnostics, outcome, table)
}

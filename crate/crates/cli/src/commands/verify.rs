use hh_core::constants::{closed_form, cstar_bilinear, cstar_classical, cstar_group, ClosedForm, Mode, SharpConstant};
use hh_core::verify::{equivalence_check, verify_dual, verify_hardy, verify_hh, verify_theorem31, EquivalenceCheck, VerificationReport};
use hh_core::Error;
use serde::{Deserialize, Serialize};

use super::CommandOutput;
use crate::config::{Experiment, ModeSpec};
use crate::error::{CliError, Result};
use crate::report::{flag, num, Diagnostic, ErrorEntry, Outcome, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub index: usize,
    pub f: String,
    pub g: String,
    /// `∫∫ k f g ≤ C ‖f‖_p ‖g‖_q`.
    pub hh: VerificationReport,
    /// `‖∫ k(|x|,|·|) f(x) dx‖_p ≤ C ‖f‖_p`.
    pub hardy: VerificationReport,
    /// `‖∫ k(|·|,|y|) g(y) dy‖_q ≤ C ‖g‖_q`.
    pub dual: VerificationReport,
    pub equivalence: Option<EquivalenceCheck>,
    pub equivalence_error: Option<ErrorEntry>,
}

impl PairResult {
    /// Every inequality holds and every integral behind it converged.
    pub fn holds(&self) -> bool {
        let settled = |r: &VerificationReport| r.holds && r.quad_diagnostics.iter().all(|q| q.converged);
        settled(&self.hh)
            && settled(&self.hardy)
            && settled(&self.dual)
            && self.equivalence.as_ref().is_some_and(|e| e.holds && e.bilinear.converged && e.operator_power.converged)
    }

    fn divergent(&self) -> bool {
        self.hh.divergent || self.hardy.divergent || self.dual.divergent || self.equivalence_error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub kernel: String,
    pub mode: ModeSpec,
    pub p: f64,
    pub q: f64,
    /// Constant used for the bilinear and the operator form.
    pub constant: SharpConstant,
    /// Constant used for the dual form; numerically the same.
    pub dual_constant: SharpConstant,
    /// In theorem31 mode, the quadrature value of the closed-form constant.
    pub numeric_constant: Option<SharpConstant>,
    pub pairs: Vec<PairResult>,
    pub all_hold: bool,
}

fn report_diagnostics(label: &str, r: &VerificationReport, out: &mut Vec<Diagnostic>) {
    let names = ["lhs", "norm", "norm", "constant"];
    for (i, q) in r.quad_diagnostics.iter().enumerate() {
        out.push(Diagnostic::new(format!("{label}: {}", names.get(i).copied().unwrap_or("integral")), *q));
    }
}

fn report_row(table: &mut Table, pair: usize, form: &str, r: &VerificationReport) {
    let converged = r.quad_diagnostics.iter().all(|q| q.converged);
    table.push(vec![
        pair.to_string(),
        form.into(),
        num(r.lhs, converged),
        num(r.constant.value * r.rhs_norms, converged),
        num(r.ratio, converged),
        format!("{:.1e}", r.slack),
        flag(r.holds),
    ]);
}

pub fn cmd_verify(exp: &Experiment) -> Result<CommandOutput> {
    let (p, q) = (exp.config.p, exp.q);
    let (group, tol, kernel) = (&exp.group, &exp.tol, &exp.kernel);
    let transposed = kernel.transposed();

    let (constant, dual_constant, numeric_constant) = if exp.theorem31() {
        let exact = closed_form(&ClosedForm::GroupHilbert { q_dim: group.homogeneous_dim(), p })?;
        let numeric = cstar_bilinear(kernel, p, Mode::Group, group, tol)?;
        (exact.clone(), exact, Some(numeric))
    } else {
        let dual = match exp.mode() {
            Mode::Classical => cstar_classical(kernel, q, tol)?,
            Mode::Group => cstar_group(kernel, q, group, tol)?,
        };
        let bilinear = cstar_bilinear(kernel, p, exp.mode(), group, tol)?;
        (bilinear, dual, None)
    };

    let mut diagnostics = Vec::new();
    let mut table =
        Table::new(format!("inequalities for `{}` at p = {p}", kernel.text()), &["pair", "form", "lhs", "rhs", "ratio", "slack", "holds"]);
    let mut pairs = Vec::with_capacity(exp.pairs.len());
    for (index, (f, g)) in exp.pairs.iter().enumerate() {
        let hh = if exp.theorem31() { verify_theorem31(f, g, p, group, tol)? } else { verify_hh(kernel, f, g, p, group, &constant, tol)? };
        let hardy = verify_hardy(&transposed, f, p, group, &constant, tol)?;
        let dual = verify_dual(kernel, g, q, group, &dual_constant, tol)?;
        let (equivalence, equivalence_error) = match equivalence_check(kernel, f, p, group, tol) {
            Ok(check) => (Some(check), None),
            Err(e @ (Error::Divergence { .. } | Error::InnerDivergence { .. })) => (None, Some(ErrorEntry::from(&CliError::Core(e)))),
            Err(e) => return Err(e.into()),
        };

        report_diagnostics(&format!("pair {index} hh"), &hh, &mut diagnostics);
        report_diagnostics(&format!("pair {index} hardy"), &hardy, &mut diagnostics);
        report_diagnostics(&format!("pair {index} dual"), &dual, &mut diagnostics);
        report_row(&mut table, index, "hh", &hh);
        report_row(&mut table, index, "hardy", &hardy);
        report_row(&mut table, index, "dual", &dual);
        match &equivalence {
            Some(e) => {
                diagnostics.push(Diagnostic::new(format!("pair {index} equivalence: bilinear"), e.bilinear));
                diagnostics.push(Diagnostic::new(format!("pair {index} equivalence: operator power"), e.operator_power));
                let converged = e.bilinear.converged && e.operator_power.converged;
                table.push(vec![
                    index.to_string(),
                    "equivalence".into(),
                    num(e.bilinear.value, converged),
                    num(e.operator_power.value, converged),
                    format!("residual {:.1e}", e.residual),
                    format!("{:.1e}", e.tolerance),
                    flag(e.holds),
                ]);
            }
            None => table.push(vec![
                index.to_string(),
                "equivalence".into(),
                "inf".into(),
                "inf".into(),
                "divergent".into(),
                "-".into(),
                flag(false),
            ]),
        }
        pairs.push(PairResult { index, f: f.to_string(), g: g.to_string(), hh, hardy, dual, equivalence, equivalence_error });
    }

    let all_hold = pairs.iter().all(PairResult::holds);
    let outcome = if pairs.iter().any(PairResult::divergent) {
        Outcome::Divergence
    } else if all_hold {
        Outcome::Ok
    } else {
        Outcome::CheckFailed
    };
    let result = VerifyResult {
        kernel: kernel.text().to_string(),
        mode: exp.config.mode,
        p,
        q,
        constant,
        dual_constant,
        numeric_constant,
        pairs,
        all_hold,
    };
    CommandOutput::new(&result, diagnostics, outcome, table)
}

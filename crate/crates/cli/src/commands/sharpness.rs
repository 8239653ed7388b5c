use hh_core::verify::{sharpness_sweep, SharpnessSweep};
use serde::{Deserialize, Serialize};

use super::CommandOutput;
use crate::config::Experiment;
use crate::error::Result;
use crate::report::{flag, num, Diagnostic, Outcome, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub kernel: String,
    pub p: f64,
    pub sweep: SharpnessSweep,
    pub passes: bool,
}

pub fn cmd_sharpness(exp: &Experiment) -> Result<CommandOutput> {
    let p = exp.config.p;
    // the group Hilbert form is stated for the first slot; its transpose
    // carries that constant as an operator constant
    let kernel = if exp.theorem31() { exp.kernel.transposed() } else { exp.kernel.clone() };
    let sweep = sharpness_sweep(&kernel, p, exp.mode(), &exp.group, &exp.config.betas, &exp.tol)?;

    let mut table =
        Table::new(format!("sharpness of `{}` at p = {p}, C = {}", kernel.text(), sweep.constant.value), &["beta", "ratio", "converged"]);
    let mut diagnostics = Vec::new();
    for e in &sweep.entries {
        table.push(vec![e.beta.to_string(), num(e.ratio, e.converged), flag(e.converged)]);
        diagnostics.push(Diagnostic::new(format!("beta {}", e.beta), e.quad));
    }
    if let Some(q) = sweep.constant.quad {
        diagnostics.push(Diagnostic::new("constant", q));
    }

    let passes = sweep.passes();
    let outcome = if passes {
        Outcome::Ok
    } else if sweep.entries.iter().any(|e| !e.ratio.is_finite()) {
        Outcome::Divergence
    } else {
        Outcome::CheckFailed
    };
    let result = SharpnessResult { kernel: kernel.text().to_string(), p, sweep, passes };
    CommandOutput::new(&result, diagnostics, outcome, table)
}

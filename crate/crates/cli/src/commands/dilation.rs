use hh_core::verify::{dilation_probe, lp_norm, DilationProbe};
use serde::{Deserialize, Serialize};

use super::CommandOutput;
use crate::config::Experiment;
use crate::error::Result;
use crate::report::{flag, num, Diagnostic, Outcome, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairProbe {
    pub index: usize,
    pub f: String,
    pub g: String,
    pub probe: DilationProbe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationResult {
    pub kernel: String,
    pub q_dim: f64,
    pub order: Option<f64>,
    pub probes: Vec<PairProbe>,
    /// Pairs with a zero function, whose normalized ratio is undefined.
    pub skipped: Vec<SkippedPair>,
    pub all_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPair {
    pub index: usize,
    pub f: String,
    pub g: String,
    pub reason: String,
}

pub fn cmd_dilation_probe(exp: &Experiment) -> Result<CommandOutput> {
    let p = exp.config.p;
    let mut table = Table::new(
        format!("dilation probe for `{}` on Q = {}", exp.kernel.text(), exp.group.homogeneous_dim()),
        &["pair", "a", "ratio", "fitted_slope", "expected_slope", "ok"],
    );
    let mut diagnostics = Vec::new();
    let mut probes = Vec::with_capacity(exp.pairs.len());
    let mut skipped = Vec::new();
    for (index, (f, g)) in exp.pairs.iter().enumerate() {
        let zero_f = lp_norm(f, p, &exp.group, &exp.tol)?.value == 0.0;
        if zero_f || lp_norm(g, exp.q, &exp.group, &exp.tol)?.value == 0.0 {
            let which = if zero_f { "f" } else { "g" };
            let reason = format!("{which} has zero norm");
            table.push(vec![index.to_string(), "-".into(), format!("skipped, {reason}"), "-".into(), "-".into(), "-".into()]);
            skipped.push(SkippedPair { index, f: f.to_string(), g: g.to_string(), reason });
            continue;
        }
        let probe = dilation_probe(&exp.kernel, f, g, p, &exp.group, &exp.config.scales, &exp.tol)?;
        for e in &probe.entries {
            table.push(vec![
                index.to_string(),
                e.a.to_string(),
                num(e.ratio, e.converged),
                format!("{:.6}", probe.fitted_slope),
                format!("{}", probe.expected_slope),
                flag(probe.slope_ok),
            ]);
            diagnostics.push(Diagnostic::new(format!("pair {index} a = {}: bilinear", e.a), e.bilinear));
            diagnostics.push(Diagnostic::new(format!("pair {index} a = {}: norm f", e.a), e.norm_f));
            diagnostics.push(Diagnostic::new(format!("pair {index} a = {}: norm g", e.a), e.norm_g));
        }
        probes.push(PairProbe { index, f: f.to_string(), g: g.to_string(), probe });
    }

    if probes.is_empty() {
        return Err(hh_core::Error::Precondition("every configured pair has a zero function; nothing to probe".into()).into());
    }
    let all_ok = probes.iter().all(|p| p.probe.slope_ok && p.probe.entries.iter().all(|e| e.converged));
    let outcome = if all_ok {
        Outcome::Ok
    } else if probes.iter().any(|p| !p.probe.fitted_slope.is_finite()) {
        Outcome::Divergence
    } else {
        Outcome::CheckFailed
    };
    let result = DilationResult {
        kernel: exp.kernel.text().to_string(),
        q_dim: exp.group.homogeneous_dim(),
        order: exp.kernel.claimed_order(),
        probes,
        skipped,
        all_ok,
    };
    CommandOutput::new(&result, diagnostics, outcome, table)
}
